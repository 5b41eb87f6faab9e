#include "swarm/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "swarm/bench.hpp"
#include "swarm/builtins.hpp"
#include "swarm/engine.hpp"
#include "swarm/error.hpp"
#include "swarm/snapshot.hpp"

namespace swarm {

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

struct SnapshotArgs {
    std::string source;
    std::size_t steps = 0;
    double dt = 0.01;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::string backend = "cpu";
    std::string layout = "column";
    std::size_t particles = 0;
    std::size_t reset_batch = 0;
    std::vector<std::string> sets;
};

struct BenchArgs {
    std::string source;
    std::size_t particles = 0;
    std::size_t steps = 1000;
    std::size_t warmup = 10;
    double dt = 0.01;
    std::vector<std::string> backends{"cpu", "native", "gpu"};
    std::vector<std::string> layouts{"column"};
    std::string report;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

std::pair<std::string, double> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw OutOfRange("--set expects name=value, got '" + text + "'");
    const std::string value = text.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw OutOfRange("--set value for " + text.substr(0, eq) + " is not a number");
    return {text.substr(0, eq), v};
}

int run_validate(const std::string& source, std::ostream& out) {
    const SystemDefinition def = load_source(source);
    out << "ok: " << def.name << " (" << def.dimension() << " variables, " << def.parameters.size() << " parameters, "
        << def.groups.size() << " groups, " << def.particle_count() << " particles)\n";
    return kExitOk;
}

int run_export(const std::string& source, const std::string& path, std::ostream& out) {
    const std::string doc = save_system(load_source(source));
    if (path.empty() || path == "-") {
        out << doc;
        return kExitOk;
    }
    std::ofstream file(path, std::ios::binary);
    file << doc;
    if (!file) throw Error("cannot write " + path);
    return kExitOk;
}

int run_snapshot(const SnapshotArgs& a, std::ostream& err) {
    SystemDefinition def = load_source(a.source);
    if (a.particles > 0) def = with_particle_count(def, a.particles);
    std::vector<std::pair<std::string, double>> sets;
    for (const auto& s : a.sets) sets.push_back(parse_assignment(s));
    for (const auto& [name, value] : sets) {
        const Parameter* p = def.find_parameter(name);
        if (!p) throw UnknownParameter(name);
        if (value < p->min || value > p->max) {
            err << "warning: " << name << "=" << value << " clamped to [" << p->min << ", " << p->max << "]\n";
        }
    }
    const SnapshotFormat format = parse_snapshot_format(a.format);

    SimulationConfig config;
    config.step_size = a.dt;
    config.seed = a.seed;
    config.layout = parse_layout(a.layout);
    config.reset_batch = a.reset_batch;
    Simulation sim(def, config, parse_backend(a.backend));
    for (const auto& [name, value] : sets) sim.set_parameter(name, value);
    for (std::size_t i = 0; i < a.steps; ++i) {
        sim.step();
        sim.scan_and_reset();
    }
    std::ofstream file(a.out, std::ios::binary);
    if (!file) throw Error("cannot open " + a.out + " for writing");
    write_snapshot(file, sim, format);
    file.close();
    if (!file) throw Error("cannot write " + a.out);
    return kExitOk;
}

int run_bench(const BenchArgs& a, std::ostream& out) {
    const SystemDefinition def = load_source(a.source);
    BenchOptions options;
    options.particles = a.particles > 0 ? a.particles : def.particle_count();
    options.steps = a.steps;
    options.warmup = a.warmup;
    options.step_size = a.dt;
    options.backends.clear();
    for (const auto& b : split_list(a.backends)) options.backends.push_back(parse_backend(b));
    options.layouts.clear();
    for (const auto& l : split_list(a.layouts)) {
        if (l == "both") {
            options.layouts = {Layout::RowMajor, Layout::ColumnMajor};
            break;
        }
        options.layouts.push_back(parse_layout(l));
    }
    const BenchReport report = bench(def, options);
    out << format_table(report);
    const std::string json = to_json(report);
    if (a.report.empty()) return kExitOk;
    if (a.report == "-") {
        out << json;
        return kExitOk;
    }
    std::ofstream file(a.report, std::ios::binary);
    file << json;
    if (!file) throw Error("cannot write " + a.report);
    return kExitOk;
}

}  // namespace

SystemDefinition load_source(const std::string& source) {
    if (source.rfind(kBuiltinPrefix, 0) == 0) {
        const std::string name = source.substr(kBuiltinPrefix.size());
        auto def = find_builtin(name);
        if (!def) throw SchemaError("unknown builtin '" + name + "' (lorenz, stn_gpe, hh, hh_ring:N)");
        return *def;
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + source);
    std::stringstream text;
    text << in.rdbuf();
    return load_system(text.str());
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Particle-swarm phase-space explorer for ODE systems", "swarm"};
    app.require_subcommand(1);

    std::string validate_source;
    auto* validate = app.add_subcommand("validate", "Check a system document");
    validate->add_option("source", validate_source, "system file or builtin:NAME")->required();

    std::string export_source, export_out;
    auto* exporter = app.add_subcommand("export", "Write a system document");
    exporter->add_option("source", export_source, "system file or builtin:NAME")->required();
    exporter->add_option("--out", export_out, "output path (default stdout)");

    SnapshotArgs snap;
    auto* snapshot = app.add_subcommand("snapshot", "Integrate headless and write particle positions");
    snapshot->add_option("source", snap.source, "system file or builtin:NAME")->required();
    snapshot->add_option("--steps", snap.steps, "RK4 steps")->required();
    snapshot->add_option("--dt", snap.dt, "step size");
    snapshot->add_option("--out", snap.out, "output path")->required();
    snapshot->add_option("--format", snap.format, "csv or bin");
    snapshot->add_option("--seed", snap.seed, "initial-condition seed");
    snapshot->add_option("--backend", snap.backend, "cpu, native or gpu");
    snapshot->add_option("--layout", snap.layout, "row or column");
    snapshot->add_option("--particles", snap.particles, "override the total particle count");
    snapshot->add_option("--reset-batch", snap.reset_batch, "particles scanned per step (0 = auto)");
    snapshot->add_option("--set", snap.sets, "parameter override name=value")->take_all();

    BenchArgs ben;
    auto* benchmark = app.add_subcommand("bench", "Time single RK4 steps per backend and layout");
    benchmark->add_option("source", ben.source, "system file or builtin:NAME")->required();
    benchmark->add_option("--particles", ben.particles, "particle count (default: the system's)");
    benchmark->add_option("--steps", ben.steps, "timed steps (>= 100)");
    benchmark->add_option("--warmup", ben.warmup, "untimed steps before timing");
    benchmark->add_option("--dt", ben.dt, "step size");
    benchmark->add_option("--backends", ben.backends, "cpu,native,gpu")->delimiter(',');
    benchmark->add_option("--layouts", ben.layouts, "row,column or both")->delimiter(',');
    benchmark->add_option("--report", ben.report, "write the JSON report here ('-' for stdout)");

    std::string run_source;
    auto* run = app.add_subcommand("run", "Open the interactive viewer");
    run->add_option("source", run_source, "system file or builtin:NAME")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (*validate) return run_validate(validate_source, out);
        if (*exporter) return run_export(export_source, export_out, out);
        if (*snapshot) return run_snapshot(snap, err);
        if (*benchmark) return run_bench(ben, out);
        if (*run) {
            load_source(run_source);
            err << "error: ui-shell not built; use snapshot or bench for headless runs\n";
            return kExitRuntime;
        }
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const UnknownParameter& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const OutOfRange& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace swarm
