#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool empty() const { return !(lo < hi); }
    double width() const { return hi - lo; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct StateVariable {
    std::string name;
    std::string rhs;  // time derivative, in the expression grammar
    Interval bounds;

    friend bool operator==(const StateVariable&, const StateVariable&) = default;
};

struct Parameter {
    std::string name;
    double default_value = 0.0;
    double min = 0.0;
    double max = 0.0;

    double clamp(double v) const { return v < min ? min : (v > max ? max : v); }

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

enum class Projection { Planar2D, Perspective3D };

struct ColorMode {
    enum class Kind { Fixed, PositionLinear };
    Kind kind = Kind::PositionLinear;
    std::array<double, 3> rgb{1.0, 1.0, 1.0};  // meaningful for Fixed only

    static ColorMode fixed(double r, double g, double b) { return {Kind::Fixed, {r, g, b}}; }
    static ColorMode position() { return {Kind::PositionLinear, {1.0, 1.0, 1.0}}; }

    friend bool operator==(const ColorMode&, const ColorMode&) = default;
};

struct RenderTechnique {
    std::string id;
    Projection projection = Projection::Perspective3D;
    std::vector<std::string> axes;
    ColorMode color;

    friend bool operator==(const RenderTechnique&, const RenderTechnique&) = default;
};

enum class Direction { Forward, Backward };

struct ParticleGroup {
    std::size_t count = 1;
    std::string technique;
    Direction direction = Direction::Forward;
    /// Initial-condition cube, keyed by state-variable name. A variable without an
    /// entry samples from its full bounds.
    std::map<std::string, Interval> ic;
    std::optional<double> max_age;  // unbounded when empty

    friend bool operator==(const ParticleGroup&, const ParticleGroup&) = default;
};

struct SystemDefinition {
    std::string name;
    std::vector<StateVariable> state_variables;
    std::vector<Parameter> parameters;
    std::vector<RenderTechnique> techniques;
    std::vector<ParticleGroup> groups;

    std::size_t dimension() const { return state_variables.size(); }
    std::size_t particle_count() const;

    const StateVariable* find_variable(std::string_view name) const;
    const Parameter* find_parameter(std::string_view name) const;
    const RenderTechnique* find_technique(std::string_view id) const;
    std::optional<std::size_t> variable_index(std::string_view name) const;
    std::optional<std::size_t> parameter_index(std::string_view name) const;

    /// Initial-condition interval of `group` for state variable `index`.
    Interval ic_range(const ParticleGroup& group, std::size_t index) const;

    friend bool operator==(const SystemDefinition&, const SystemDefinition&) = default;
};

struct ValidationReport {
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
    std::string summary() const;
};

/// Checks every invariant and reports all violations. Never throws.
ValidationReport validate_system(const SystemDefinition& def) noexcept;

/// Parses a system document (see README for the schema). Throws SyntaxError for
/// malformed text, SchemaError for missing or mistyped fields, ValidationError if
/// the result fails validate_system.
SystemDefinition load_system(std::string_view doc);

/// Deterministic, ASCII-only serialization with a stable key order.
std::string save_system(const SystemDefinition& def);

/// Turns parameter `param` into a state variable with zero derivative, appended last.
/// Every group samples it from `ic_range`; `bounds` become its reset bounds.
/// Throws UnknownParameter.
SystemDefinition lift_parameter(const SystemDefinition& def, std::string_view param, Interval ic_range,
                                Interval bounds);

std::string_view to_string(Projection p);
std::string_view to_string(Direction d);

}  // namespace swarm
