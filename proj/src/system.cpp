#include "swarm/system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "swarm/error.hpp"
#include "swarm/expression.hpp"

namespace swarm {

using Json = nlohmann::ordered_json;

std::size_t SystemDefinition::particle_count() const {
    std::size_t total = 0;
    for (const auto& g : groups) total += g.count;
    return total;
}

const StateVariable* SystemDefinition::find_variable(std::string_view n) const {
    auto it = std::find_if(state_variables.begin(), state_variables.end(),
                           [&](const StateVariable& v) { return v.name == n; });
    return it == state_variables.end() ? nullptr : &*it;
}

const Parameter* SystemDefinition::find_parameter(std::string_view n) const {
    auto it = std::find_if(parameters.begin(), parameters.end(), [&](const Parameter& p) { return p.name == n; });
    return it == parameters.end() ? nullptr : &*it;
}

const RenderTechnique* SystemDefinition::find_technique(std::string_view id) const {
    auto it = std::find_if(techniques.begin(), techniques.end(), [&](const RenderTechnique& t) { return t.id == id; });
    return it == techniques.end() ? nullptr : &*it;
}

std::optional<std::size_t> SystemDefinition::variable_index(std::string_view n) const {
    for (std::size_t i = 0; i < state_variables.size(); ++i) {
        if (state_variables[i].name == n) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> SystemDefinition::parameter_index(std::string_view n) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].name == n) return i;
    }
    return std::nullopt;
}

Interval SystemDefinition::ic_range(const ParticleGroup& group, std::size_t index) const {
    const auto& var = state_variables.at(index);
    auto it = group.ic.find(var.name);
    return it == group.ic.end() ? var.bounds : it->second;
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) out += "; ";
        out += e;
    }
    return out;
}

std::string_view to_string(Projection p) { return p == Projection::Planar2D ? "2d" : "3d"; }
std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_name(const std::string& name, std::string_view what, std::vector<std::string>& errors) {
    if (!is_identifier(name)) {
        errors.push_back(std::string(what) + " '" + name + "': invalid identifier");
    } else if (is_reserved_name(name)) {
        errors.push_back(std::string(what) + " '" + name + "': reserved name");
    }
}

}  // namespace

ValidationReport validate_system(const SystemDefinition& def) noexcept {
    ValidationReport report;
    auto& errors = report.errors;

    if (def.state_variables.empty()) errors.push_back("system has no state variables");

    std::set<std::string> vars;
    for (const auto& v : def.state_variables) {
        check_name(v.name, "state variable", errors);
        if (!vars.insert(v.name).second) errors.push_back("duplicate state variable " + v.name);
        if (!finite(v.bounds.lo) || !finite(v.bounds.hi)) {
            errors.push_back(v.name + ": bounds must be finite");
        } else if (v.bounds.empty()) {
            errors.push_back(v.name + ": lower bound must be below upper bound");
        }
    }

    std::set<std::string> params;
    for (const auto& p : def.parameters) {
        check_name(p.name, "parameter", errors);
        if (!params.insert(p.name).second) errors.push_back("duplicate parameter " + p.name);
        if (vars.count(p.name)) errors.push_back("parameter " + p.name + " shadows a state variable");
        if (!finite(p.default_value) || !finite(p.min) || !finite(p.max)) {
            errors.push_back("parameter " + p.name + ": values must be finite");
        } else if (p.min > p.max) {
            errors.push_back("parameter " + p.name + ": min exceeds max");
        } else if (p.default_value < p.min || p.default_value > p.max) {
            errors.push_back("parameter " + p.name + ": default outside [min, max]");
        }
    }

    for (const auto& v : def.state_variables) {
        try {
            Expr ast = parse(v.rhs);
            for (const auto& id : free_identifiers(ast)) {
                if (!vars.count(id) && !params.count(id)) {
                    errors.push_back("unknown identifier " + id + " in " + v.name + ".rhs");
                }
            }
        } catch (const SyntaxError& e) {
            errors.push_back(v.name + ".rhs: cannot parse \"" + v.rhs + "\": " + e.what());
        }
    }

    std::set<std::string> technique_ids;
    for (const auto& t : def.techniques) {
        const std::string label = "technique " + t.id;
        if (t.id.empty()) errors.push_back("technique with empty id");
        if (!technique_ids.insert(t.id).second) errors.push_back("duplicate technique id " + t.id);
        const std::size_t want = t.projection == Projection::Planar2D ? 2 : 3;
        if (t.axes.size() != want) {
            errors.push_back(label + ": " + std::string(to_string(t.projection)) + " projection needs " +
                             std::to_string(want) + " axes");
        }
        for (const auto& a : t.axes) {
            if (!vars.count(a)) errors.push_back(label + ": unknown axis variable " + a);
        }
        if (t.color.kind == ColorMode::Kind::Fixed) {
            for (double c : t.color.rgb) {
                if (!(c >= 0.0 && c <= 1.0)) {
                    errors.push_back(label + ": color channel outside [0, 1]");
                    break;
                }
            }
        }
    }

    for (std::size_t gi = 0; gi < def.groups.size(); ++gi) {
        const auto& g = def.groups[gi];
        const std::string label = "group " + std::to_string(gi);
        if (g.count < 1) errors.push_back(label + ": count must be at least 1");
        if (!technique_ids.count(g.technique)) errors.push_back(label + ": unknown technique " + g.technique);
        for (const auto& [name, range] : g.ic) {
            const StateVariable* var = def.find_variable(name);
            if (!var) {
                errors.push_back(label + ": initial condition for unknown variable " + name);
                continue;
            }
            if (!finite(range.lo) || !finite(range.hi)) {
                errors.push_back(label + ": non-finite initial-condition interval for " + name);
            } else if (range.empty()) {
                errors.push_back(label + ": empty initial-condition interval for " + name);
            } else if (range.lo < var->bounds.lo || range.hi > var->bounds.hi) {
                errors.push_back(label + ": initial-condition interval for " + name + " exceeds its bounds");
            }
        }
        if (g.max_age && !(*g.max_age > 0.0)) errors.push_back(label + ": max_age must be positive");
    }

    return report;
}

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path, std::string("missing field '") + key + "'");
    return *it;
}

double as_real(const Json& j, const std::string& path) {
    if (!j.is_number()) schema_fail(path, "expected a number");
    return j.get<double>();
}

std::string as_text(const Json& j, const std::string& path) {
    if (!j.is_string()) schema_fail(path, "expected a string");
    return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
    if (!j.is_array()) schema_fail(path, "expected an array");
    return j;
}

Interval as_interval(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [lo, hi]");
    return {as_real(j[0], path + "[0]"), as_real(j[1], path + "[1]")};
}

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

}  // namespace

SystemDefinition load_system(std::string_view doc) {
    if (doc.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        schema_fail("document", "empty document, expected a system object");
    }
    Json root;
    try {
        root = Json::parse(doc.begin(), doc.end());
    } catch (const Json::parse_error& e) {
        throw SyntaxError("malformed system document: " + std::string(e.what()), e.byte > 0 ? e.byte - 1 : 0);
    }
    if (!root.is_object()) schema_fail("document", "expected an object at top level");

    SystemDefinition def;
    def.name = as_text(field(root, "name", "document"), "name");

    const Json& vars = as_array(field(root, "state_variables", "document"), "state_variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string path = "state_variables[" + std::to_string(i) + "]";
        StateVariable v;
        v.name = as_text(field(vars[i], "name", path), path + ".name");
        v.rhs = as_text(field(vars[i], "rhs", path), path + ".rhs");
        v.bounds = as_interval(field(vars[i], "bounds", path), path + ".bounds");
        def.state_variables.push_back(std::move(v));
    }

    if (auto it = root.find("parameters"); it != root.end()) {
        const Json& params = as_array(*it, "parameters");
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::string path = "parameters[" + std::to_string(i) + "]";
            Parameter p;
            p.name = as_text(field(params[i], "name", path), path + ".name");
            p.default_value = as_real(field(params[i], "default", path), path + ".default");
            p.min = as_real(field(params[i], "min", path), path + ".min");
            p.max = as_real(field(params[i], "max", path), path + ".max");
            def.parameters.push_back(std::move(p));
        }
    }

    if (auto it = root.find("techniques"); it != root.end()) {
        const Json& techniques = as_array(*it, "techniques");
        for (std::size_t i = 0; i < techniques.size(); ++i) {
            const std::string path = "techniques[" + std::to_string(i) + "]";
            const Json& tj = techniques[i];
            RenderTechnique t;
            t.id = as_text(field(tj, "id", path), path + ".id");
            const std::string proj = as_text(field(tj, "projection", path), path + ".projection");
            if (proj == "2d") {
                t.projection = Projection::Planar2D;
            } else if (proj == "3d") {
                t.projection = Projection::Perspective3D;
            } else {
                schema_fail(path + ".projection", "expected \"2d\" or \"3d\"");
            }
            const Json& axes = as_array(field(tj, "axes", path), path + ".axes");
            for (std::size_t a = 0; a < axes.size(); ++a) {
                t.axes.push_back(as_text(axes[a], path + ".axes[" + std::to_string(a) + "]"));
            }
            const Json& color = field(tj, "color", path);
            const std::string mode = as_text(field(color, "mode", path + ".color"), path + ".color.mode");
            if (mode == "position") {
                t.color = ColorMode::position();
            } else if (mode == "fixed") {
                const Json& rgb = field(color, "rgb", path + ".color");
                if (!rgb.is_array() || rgb.size() != 3) schema_fail(path + ".color.rgb", "expected [r, g, b]");
                t.color = ColorMode::fixed(as_real(rgb[0], path + ".color.rgb[0]"),
                                           as_real(rgb[1], path + ".color.rgb[1]"),
                                           as_real(rgb[2], path + ".color.rgb[2]"));
            } else {
                schema_fail(path + ".color.mode", "expected \"fixed\" or \"position\"");
            }
            def.techniques.push_back(std::move(t));
        }
    }

    if (auto it = root.find("groups"); it != root.end()) {
        const Json& groups = as_array(*it, "groups");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const std::string path = "groups[" + std::to_string(i) + "]";
            const Json& gj = groups[i];
            ParticleGroup g;
            const Json& count = field(gj, "count", path);
            if (!count.is_number_unsigned() && !(count.is_number_integer() && count.get<long long>() >= 0)) {
                schema_fail(path + ".count", "expected a non-negative integer");
            }
            g.count = count.get<std::size_t>();
            g.technique = as_text(field(gj, "technique", path), path + ".technique");
            const std::string dir = as_text(field(gj, "direction", path), path + ".direction");
            if (dir == "forward") {
                g.direction = Direction::Forward;
            } else if (dir == "backward") {
                g.direction = Direction::Backward;
            } else {
                schema_fail(path + ".direction", "expected \"forward\" or \"backward\"");
            }
            if (auto ic = gj.find("ic"); ic != gj.end()) {
                if (!ic->is_object()) schema_fail(path + ".ic", "expected an object");
                for (const auto& [name, range] : ic->items()) {
                    g.ic[name] = as_interval(range, path + ".ic." + name);
                }
            }
            if (auto age = gj.find("max_age"); age != gj.end() && !age->is_null()) {
                g.max_age = as_real(*age, path + ".max_age");
            }
            def.groups.push_back(std::move(g));
        }
    }

    ValidationReport report = validate_system(def);
    if (!report.ok()) throw ValidationError("invalid system '" + def.name + "': " + report.summary());
    return def;
}

std::string save_system(const SystemDefinition& def) {
    Json root;
    root["name"] = def.name;

    Json vars = Json::array();
    for (const auto& v : def.state_variables) {
        Json j;
        j["name"] = v.name;
        j["rhs"] = v.rhs;
        j["bounds"] = interval_json(v.bounds);
        vars.push_back(std::move(j));
    }
    root["state_variables"] = std::move(vars);

    Json params = Json::array();
    for (const auto& p : def.parameters) {
        Json j;
        j["name"] = p.name;
        j["default"] = p.default_value;
        j["min"] = p.min;
        j["max"] = p.max;
        params.push_back(std::move(j));
    }
    root["parameters"] = std::move(params);

    Json techniques = Json::array();
    for (const auto& t : def.techniques) {
        Json j;
        j["id"] = t.id;
        j["projection"] = std::string(to_string(t.projection));
        j["axes"] = t.axes;
        Json color;
        if (t.color.kind == ColorMode::Kind::Fixed) {
            color["mode"] = "fixed";
            color["rgb"] = Json::array({t.color.rgb[0], t.color.rgb[1], t.color.rgb[2]});
        } else {
            color["mode"] = "position";
        }
        j["color"] = std::move(color);
        techniques.push_back(std::move(j));
    }
    root["techniques"] = std::move(techniques);

    Json groups = Json::array();
    for (const auto& g : def.groups) {
        Json j;
        j["count"] = g.count;
        j["technique"] = g.technique;
        j["direction"] = std::string(to_string(g.direction));
        Json ic = Json::object();
        // State-variable order first, then anything validation would reject anyway.
        for (const auto& v : def.state_variables) {
            if (auto it = g.ic.find(v.name); it != g.ic.end()) ic[v.name] = interval_json(it->second);
        }
        for (const auto& [name, range] : g.ic) {
            if (!def.find_variable(name)) ic[name] = interval_json(range);
        }
        j["ic"] = std::move(ic);
        if (g.max_age) j["max_age"] = *g.max_age;
        groups.push_back(std::move(j));
    }
    root["groups"] = std::move(groups);

    return root.dump(2, ' ', true) + "\n";
}

SystemDefinition lift_parameter(const SystemDefinition& def, std::string_view param, Interval ic_range,
                                Interval bounds) {
    auto index = def.parameter_index(param);
    if (!index) throw UnknownParameter(std::string(param));

    SystemDefinition out = def;
    out.parameters.erase(out.parameters.begin() + static_cast<std::ptrdiff_t>(*index));
    out.state_variables.push_back(StateVariable{std::string(param), "0", bounds});
    for (auto& g : out.groups) g.ic[std::string(param)] = ic_range;
    return out;
}

}  // namespace swarm
