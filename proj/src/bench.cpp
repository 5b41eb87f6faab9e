#include "swarm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "swarm/engine.hpp"
#include "swarm/error.hpp"

namespace swarm {

SystemDefinition with_particle_count(const SystemDefinition& def, std::size_t particles) {
    if (particles < 1) throw OutOfRange("particle count must be at least 1");
    SystemDefinition out = def;
    if (out.groups.empty()) throw ValidationError("system '" + def.name + "' has no particle groups");
    const std::size_t g = out.groups.size();
    if (particles < g) out.groups.resize(particles);
    const std::size_t total = def.particle_count();
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < out.groups.size(); ++i) {
        std::size_t share = total > 0 ? static_cast<std::size_t>(static_cast<double>(particles) *
                                                                 static_cast<double>(def.groups[i].count) /
                                                                 static_cast<double>(total))
                                      : 0;
        share = std::max<std::size_t>(share, 1);
        if (i + 1 == out.groups.size()) share = particles - assigned;
        out.groups[i].count = share;
        assigned += share;
    }
    return out;
}

namespace {

std::string compiler_id() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

BenchRow time_one(const SystemDefinition& def, const BenchOptions& options, BackendKind kind, Layout layout,
                  BenchEnvironment& env) {
    BenchRow row;
    row.system = def.name;
    row.particles = options.particles;
    row.backend = kind;
    row.layout = layout;
    if (!backend_available(kind)) {
        row.skipped = true;
        row.note = "backend unavailable";
        return row;
    }
    try {
        SimulationConfig config;
        config.step_size = options.step_size;
        config.layout = layout;
        Simulation sim(def, config, kind);
        if (std::none_of(env.devices.begin(), env.devices.end(), [&](const auto& d) { return d.first == kind; })) {
            env.devices.emplace_back(kind, sim.backend().device_name());
        }
        sim.run(options.warmup);
        sim.backend().finish();

        std::vector<double> ms;
        ms.reserve(options.steps);
        for (std::size_t i = 0; i < options.steps; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            sim.step();
            sim.backend().finish();
            const auto t1 = std::chrono::steady_clock::now();
            ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        double sum = 0.0;
        for (double v : ms) sum += v;
        const double mean = sum / static_cast<double>(ms.size());
        double sq = 0.0;
        for (double v : ms) sq += (v - mean) * (v - mean);
        row.steps = ms.size();
        row.mean_ms = mean;
        row.std_ms = ms.size() > 1 ? std::sqrt(sq / static_cast<double>(ms.size() - 1)) : 0.0;
    } catch (const BackendError& e) {
        row.skipped = true;
        row.note = e.what();
    }
    return row;
}

}  // namespace

BenchReport bench(const SystemDefinition& def, const BenchOptions& options) {
    if (options.particles < 1) throw OutOfRange("bench needs at least one particle");
    if (options.steps < kMinBenchSteps) {
        throw OutOfRange("bench needs at least " + std::to_string(kMinBenchSteps) + " timed steps, got " +
                         std::to_string(options.steps));
    }
    if (options.backends.empty() || options.layouts.empty()) throw OutOfRange("bench needs a backend and a layout");
    const SystemDefinition sized = with_particle_count(def, options.particles);

    BenchReport report;
    report.environment.compiler = compiler_id();
    report.environment.hardware_threads = std::thread::hardware_concurrency();
    for (BackendKind kind : options.backends) {
        for (Layout layout : options.layouts) {
            report.rows.push_back(time_one(sized, options, kind, layout, report.environment));
        }
    }
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.system != b.system) return a.system < b.system;
        return to_string(a.backend) < to_string(b.backend);
    });
    return report;
}

std::string format_table(const BenchReport& report) {
    const std::vector<std::string> head{"system", "particles", "backend", "layout", "steps", "mean ms", "std ms"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : report.rows) {
        auto fixed = [](double v) {
            std::ostringstream s;
            s << std::fixed << std::setprecision(3) << v;
            return s.str();
        };
        cells.push_back({r.system, std::to_string(r.particles), std::string(to_string(r.backend)),
                         std::string(to_string(r.layout)), r.skipped ? "-" : std::to_string(r.steps),
                         r.skipped ? "skipped" : fixed(r.mean_ms), r.skipped ? "-" : fixed(r.std_ms)});
    }
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << "  ";
            // text columns left-aligned, numbers right-aligned
            if (c == 0 || c == 2 || c == 3) {
                out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
            } else {
                out << std::right << std::setw(static_cast<int>(width[c])) << row[c];
            }
        }
        out << '\n';
    };
    line(head);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& row : cells) line(row);
    for (const auto& r : report.rows) {
        if (r.skipped) out << "skipped " << to_string(r.backend) << '/' << to_string(r.layout) << ": " << r.note << '\n';
    }
    out << "precision: " << report.environment.precision << '\n';
    out << "compiler: " << report.environment.compiler << '\n';
    out << "hardware threads: " << report.environment.hardware_threads << '\n';
    for (const auto& [kind, name] : report.environment.devices) out << "device " << to_string(kind) << ": " << name << '\n';
    return out.str();
}

std::string to_json(const BenchReport& report) {
    nlohmann::ordered_json doc;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["system"] = r.system;
        row["particles"] = r.particles;
        row["backend"] = to_string(r.backend);
        row["layout"] = to_string(r.layout);
        row["status"] = r.skipped ? "skipped" : "ok";
        if (r.skipped) {
            row["note"] = r.note;
        } else {
            row["steps"] = r.steps;
            row["mean_ms"] = r.mean_ms;
            row["std_ms"] = r.std_ms;
        }
        doc["rows"].push_back(row);
    }
    nlohmann::ordered_json env;
    env["precision"] = report.environment.precision;
    env["compiler"] = report.environment.compiler;
    env["hardware_threads"] = report.environment.hardware_threads;
    env["devices"] = nlohmann::ordered_json::object();
    for (const auto& [kind, name] : report.environment.devices) env["devices"][std::string(to_string(kind))] = name;
    doc["environment"] = env;
    return doc.dump(2, ' ', true) + "\n";
}

}  // namespace swarm
