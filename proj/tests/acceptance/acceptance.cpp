// Acceptance suite: one PASS/FAIL/SKIP line per primary criterion.
// Exit status is nonzero if any criterion fails; skips do not fail the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"
#include "swarm/backend.hpp"
#include "swarm/builtins.hpp"
#include "swarm/codegen.hpp"
#include "swarm/engine.hpp"
#include "swarm/random.hpp"
#include "swarm/reference.hpp"

#ifndef SWARM_CLI_PATH
#define SWARM_CLI_PATH "swarm"
#endif

using namespace swarm;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

int failures = 0;

void run_criterion(const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failures;
    std::printf("%s  %-28s %s (%.1f s)\n", tag, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}


fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "swarm-acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string("'") + SWARM_CLI_PATH + "' " + args + " > '" + stdout_file.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// --- RK4 order ------------------------------------------------------------------

Outcome rk4_order() {
    SystemDefinition def;
    def.name = "decay";
    def.state_variables = {{"x", "-x", {-10.0, 10.0}}};
    auto error_at_one = [&](double h) {
        std::vector<double> x{1.0};
        const int n = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < n; ++i) x = rk4_step_reference(def, x, {}, h);
        return std::abs(x[0] - std::exp(-1.0));
    };
    const double e1 = error_at_one(0.1), e2 = error_at_one(0.05), e3 = error_at_one(0.025);
    const double r1 = e1 / e2, r2 = e2 / e3;
    const double single = rk4_step_reference(def, std::vector<double>{1.0}, {}, 0.1)[0];
    const bool ok = r1 >= 12 && r1 <= 20 && r2 >= 12 && r2 <= 20 && std::abs(single - 0.9048375) <= 1e-9;
    return {ok ? Status::Pass : Status::Fail,
            fmt("ratios %.3f, ", r1) + fmt("%.3f; ", r2) + fmt("single step %.10f", single)};
}

// --- Backend equivalence ----------------------------------------------------------

std::vector<float> lorenz_run(BackendKind kind) {
    SystemDefinition def = builtin_lorenz();
    def.groups[0].count = 1024;
    SimulationConfig config;
    config.step_size = 0.01;
    config.seed = 1;
    Simulation sim(def, config, kind);
    sim.set_parameter("r", 0.5);
    sim.run(1000);
    return sim.read_back();
}

double max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a[i] - b[i])));
    return std::isnan(m) ? INFINITY : m;
}

Outcome backend_equivalence() {
    const auto cpu = lorenz_run(BackendKind::Cpu);
    std::string detail;
    bool host_ok = true;
    if (backend_available(BackendKind::Native)) {
        const double d = max_abs_diff(cpu, lorenz_run(BackendKind::Native));
        host_ok = d <= 1e-4;
        detail = fmt("native vs cpu max |diff| %.3g; ", d);
    }
    if (!backend_available(BackendKind::Gpu)) {
        return {host_ok ? Status::Skip : Status::Fail, detail + "no OpenCL GPU device, gpu comparison skipped"};
    }
    const double d = max_abs_diff(cpu, lorenz_run(BackendKind::Gpu));
    return {d <= 1e-4 && host_ok ? Status::Pass : Status::Fail, detail + fmt("gpu vs cpu max |diff| %.3g", d)};
}

// --- Lorenz landmarks ----------------------------------------------------------------

Outcome lorenz_landmarks() {
    SimulationConfig config;
    config.step_size = 0.01;
    config.seed = 2;
    std::string detail;
    bool ok = true;

    {  // r = 0.5: the origin attracts everything
        Simulation sim(builtin_lorenz(), config);
        sim.set_parameter("r", 0.5);
        for (int i = 0; i < 5000; ++i) {
            sim.step();
            sim.scan_and_reset();
        }
        const auto pos = sim.read_back();
        std::size_t near = 0;
        for (std::size_t p = 0; p < sim.particle_count(); ++p) {
            near += std::hypot(pos[3 * p], pos[3 * p + 1], pos[3 * p + 2]) < 1e-2;
        }
        const double frac = static_cast<double>(near) / static_cast<double>(sim.particle_count());
        ok = ok && frac >= 0.99;
        detail += fmt("r=0.5 %.2f%% at origin; ", 100 * frac);
    }
    {  // r = 5: two stable equilibria
        Simulation sim(builtin_lorenz(), config);
        sim.set_parameter("r", 5.0);
        for (int i = 0; i < 10000; ++i) {
            sim.step();
            sim.scan_and_reset();
        }
        const auto pos = sim.read_back();
        const double c = std::sqrt(32.0 / 3.0);
        std::size_t survivors = 0, settled = 0;
        double worst = 0.0;
        for (std::size_t p = 0; p < sim.particle_count(); ++p) {
            if (sim.reset_epochs()[p] != 0) continue;
            ++survivors;
            const double s = pos[3 * p] >= 0 ? 1.0 : -1.0;
            const double d = std::hypot(pos[3 * p] - s * c, pos[3 * p + 1] - s * c, pos[3 * p + 2] - 4.0);
            worst = std::max(worst, d);
            settled += d < 1e-2;
        }
        ok = ok && survivors > 0 && settled == survivors;
        detail += fmt("r=5 %.0f survivors, ", static_cast<double>(survivors)) + fmt("worst distance %.2g; ", worst);
    }
    {  // r = 28: bounded strange attractor, no resets
        Simulation sim(builtin_lorenz(), config);
        for (int i = 0; i < 2000; ++i) sim.step();
        std::vector<char> inside(sim.particle_count(), 1);
        for (int i = 2000; i <= 4000; ++i) {
            if (i > 2000) sim.step();
            const auto pos = sim.read_back();
            for (std::size_t p = 0; p < sim.particle_count(); ++p) {
                const float x = pos[3 * p], y = pos[3 * p + 1], z = pos[3 * p + 2];
                if (!(std::abs(x) < 30 && std::abs(y) < 30 && z > 0 && z < 60)) inside[p] = 0;
            }
        }
        const double frac = static_cast<double>(std::count(inside.begin(), inside.end(), 1)) /
                            static_cast<double>(sim.particle_count());
        ok = ok && frac >= 0.99;
        detail += fmt("r=28 %.2f%% bounded over t in [20,40]", 100 * frac);
    }
    return {ok ? Status::Pass : Status::Fail, detail};
}

// --- Lift exactness ------------------------------------------------------------------

Outcome lift_exactness() {
    bool ok = true;
    std::string detail;
    struct Case {
        SystemDefinition def;
        const char* param;
    };
    const std::vector<Case> cases{{lift_parameter(builtin_lorenz(), "r", {0.0, 110.0}, {0.0, 110.0}), "r"},
                                  {lift_parameter(builtin_stn_gpe(), "w_ss", {0.0, 15.0}, {0.0, 15.0}), "w_ss"}};
    std::vector<BackendKind> kinds{BackendKind::Cpu};
    if (backend_available(BackendKind::Native)) kinds.push_back(BackendKind::Native);
    for (const auto& c : cases) {
        for (BackendKind kind : kinds) {
            SimulationConfig config;
            config.step_size = 0.01;
            config.seed = 3;
            Simulation sim(c.def, config, kind);
            const std::size_t n = sim.dimension();
            const auto before = sim.read_back();
            sim.run(10000);
            const auto after = sim.read_back();
            std::size_t changed = 0;
            for (std::size_t p = 0; p < sim.particle_count(); ++p) {
                const std::size_t i = p * n + (n - 1);
                if (std::memcmp(&before[i], &after[i], sizeof(float)) != 0) ++changed;
            }
            ok = ok && changed == 0;
            detail += std::string(c.param) + "/" + std::string(to_string(kind)) + ": " + std::to_string(changed) +
                      " of " + std::to_string(sim.particle_count()) + " changed; ";
        }
    }
    return {ok ? Status::Pass : Status::Fail, detail + "10000 steps"};
}

// --- Hodgkin-Huxley ------------------------------------------------------------------

constexpr double kHhStep = 0.025;  // ms

struct SpikeStats {
    std::size_t spikes = 0;
    double cv = 0.0;
    std::size_t late_crossings = 0;  // after 50 ms
};

// Single neuron current-step experiment from the resting state.
SpikeStats single_neuron(double current) {
    SystemDefinition def = builtin_hh_ring(1);
    def.groups[0].count = 1;
    SimulationConfig config;
    config.step_size = kHhStep;
    config.reset_batch = 1;
    Simulation sim(def, config, BackendKind::Cpu);
    const double am = 2.5 / (std::exp(2.5) - 1), bm = 4.0;
    const double ah = 0.07, bh = 1.0 / (std::exp(3.0) + 1);
    const double an = 0.1 / (std::exp(1.0) - 1), bn = 0.125;
    const std::vector<float> rest{0.0f, static_cast<float>(ah / (ah + bh)), static_cast<float>(am / (am + bm)),
                                  static_cast<float>(an / (an + bn)), 0.0f};
    sim.write_particles(0, rest);
    sim.set_parameter("I_1", current);

    std::vector<double> times;
    SpikeStats s;
    float v_prev = sim.read_back(0, 1)[0];
    const int steps = static_cast<int>(std::lround(200.0 / kHhStep));
    for (int i = 1; i <= steps; ++i) {
        sim.step();
        sim.scan_and_reset();
        const float v = sim.read_back(0, 1)[0];
        if (v_prev < 20.0f && v >= 20.0f) {
            const double t = i * kHhStep;
            times.push_back(t);
            if (t > 50.0) ++s.late_crossings;
        }
        v_prev = v;
    }
    s.spikes = times.size();
    if (times.size() >= 3) {
        std::vector<double> isi;
        for (std::size_t i = 1; i < times.size(); ++i) isi.push_back(times[i] - times[i - 1]);
        double mean = 0.0, var = 0.0;
        for (double d : isi) mean += d;
        mean /= static_cast<double>(isi.size());
        for (double d : isi) var += (d - mean) * (d - mean);
        var /= static_cast<double>(isi.size());
        s.cv = std::sqrt(var) / mean;
    }
    return s;
}

Outcome hh_dynamics() {
    const SpikeStats on = single_neuron(10.0);
    const SpikeStats off = single_neuron(5.0);
    bool ok = on.spikes >= 5 && on.spikes > 1 && on.cv < 0.05 && off.late_crossings == 0;
    std::string detail = "N=1 I=10: " + std::to_string(on.spikes) + " spikes, ISI CV " + fmt("%.4f; ", on.cv) +
                         "I=5: " + std::to_string(off.late_crossings) + " crossings after 50 ms; ";

    // Three-neuron ring from random initial conditions.
    SimulationConfig config;
    config.step_size = kHhStep;
    config.seed = 4;
    Simulation sim(builtin_hh_ring(3), config, BackendKind::Cpu);
    const std::size_t P = sim.particle_count();
    const int settle = static_cast<int>(std::lround(500.0 / kHhStep));
    for (int i = 0; i < settle; ++i) {
        sim.step();
        sim.scan_and_reset();
    }
    // Watch 30 ms (two periods of the ~14 ms cycle) without resets.
    const int window = static_cast<int>(std::lround(30.0 / kHhStep));
    std::vector<char> sync(P, 1);
    std::vector<int> crossings(P, 0);
    std::vector<float> prev = sim.read_back();
    const auto epochs_before = std::vector<std::uint32_t>(sim.reset_epochs().begin(), sim.reset_epochs().end());
    for (int i = 0; i < window; ++i) {
        sim.step();
        const auto pos = sim.read_back();
        for (std::size_t p = 0; p < P; ++p) {
            const float v1 = pos[15 * p], v2 = pos[15 * p + 5], v3 = pos[15 * p + 10];
            const float spread = std::max({v1, v2, v3}) - std::min({v1, v2, v3});
            if (!(spread < 5.0f)) sync[p] = 0;
            if (prev[15 * p] < 20.0f && v1 >= 20.0f) ++crossings[p];
        }
        prev = pos;
    }
    std::size_t synchronous = 0;
    for (std::size_t p = 0; p < P; ++p) {
        // at least two spikes in the window, so a full period was observed
        synchronous += sync[p] && crossings[p] >= 2 && sim.reset_epochs()[p] == epochs_before[p];
    }
    const double frac = static_cast<double>(synchronous) / static_cast<double>(P);
    ok = ok && frac > 0.5;
    detail += fmt("N=3 ring: %.1f%% of 10k synchronous after 500 ms", 100 * frac);
    return {ok ? Status::Pass : Status::Fail, detail};
}

// --- Codegen oracle ------------------------------------------------------------------

Outcome codegen_oracle() {
    const std::vector<SystemDefinition> systems{builtin_lorenz(), builtin_stn_gpe(), builtin_hh_ring(1),
                                                builtin_hh_ring(3)};
    std::size_t branchy = 0;
    for (const auto& def : systems) {
        for (Layout layout : {Layout::RowMajor, Layout::ColumnMajor}) {
            branchy += !find_branch_constructs(emit_kernel_source(def, layout).source).empty();
        }
    }
    std::string detail = std::string("branch scan ") + (branchy == 0 ? "clean" : "FOUND BRANCHES") + "; ";

    std::vector<BackendKind> devices;
    if (backend_available(BackendKind::Gpu)) devices.push_back(BackendKind::Gpu);
    if (backend_available(BackendKind::Native)) devices.push_back(BackendKind::Native);
    if (devices.empty()) {
        return {branchy == 0 ? Status::Skip : Status::Fail, detail + "no kernel compiler available, oracle skipped"};
    }

    bool ok = branchy == 0;
    const double h = 0.01;
    for (BackendKind kind : devices) {
        double worst = 0.0;  // error relative to the allowed tolerance
        for (const auto& def : systems) {
            const std::size_t n = def.dimension();
            const std::size_t count = 100;
            std::vector<float> points(count * n);
            for (std::size_t p = 0; p < count; ++p) {
                for (std::size_t d = 0; d < n; ++d) {
                    const double u = uniform01(2024, p, 0, static_cast<std::uint32_t>(d));
                    points[p * n + d] = sample_interval(def.state_variables[d].bounds, u);
                }
            }
            for (Layout layout : {Layout::RowMajor, Layout::ColumnMajor}) {
                auto backend = make_backend(kind, def, layout, count);
                std::vector<float> params;
                for (const auto& prm : def.parameters) params.push_back(static_cast<float>(prm.default_value));
                backend->set_parameters(params);
                backend->upload(points);
                backend->dispatch(0, count, static_cast<float>(h));
                backend->finish();
                std::vector<float> out(count * n);
                backend->read(0, count, out);

                Bindings bindings;
                for (std::size_t i = 0; i < params.size(); ++i) bindings[def.parameters[i].name] = params[i];
                const ReferenceSystem ref(def);
                for (std::size_t p = 0; p < count; ++p) {
                    std::vector<double> start(points.begin() + static_cast<std::ptrdiff_t>(p * n),
                                              points.begin() + static_cast<std::ptrdiff_t>((p + 1) * n));
                    const auto expected = ref.rk4_step(start, bindings, h);
                    for (std::size_t d = 0; d < n; ++d) {
                        const double err = std::abs(out[p * n + d] - expected[d]);
                        const double allowed = std::max(1e-6, 1e-5 * std::abs(expected[d]));
                        worst = std::max(worst, std::isnan(err) ? INFINITY : err / allowed);
                    }
                }
            }
        }
        ok = ok && worst <= 1.0;
        detail += std::string(to_string(kind)) + fmt(" kernel worst error/tolerance %.3f; ", worst);
    }
    if (!backend_available(BackendKind::Gpu)) detail += "no GPU, checked the host-compiled kernel";
    return {ok ? Status::Pass : Status::Fail, detail};
}

// --- Reset liveness -------------------------------------------------------------------

Outcome reset_liveness() {
    SystemDefinition def;
    def.name = "drift";
    def.state_variables = {{"x", "1", {0.0, 1.0}}, {"y", "0", {0.0, 1.0}}};
    def.techniques = {{"t", Projection::Planar2D, {"x", "y"}, ColorMode::position()}};
    ParticleGroup g;
    g.count = 100;
    g.technique = "t";
    def.groups = {g};
    SimulationConfig config;
    config.step_size = 0.05;
    config.reset_batch = 10;
    Simulation sim(def, config);

    std::vector<int> escaped_at(100, -1);
    std::size_t late = 0, disturbed = 0, resets = 0;
    for (int scan = 0; scan < 1000; ++scan) {
        sim.step();
        const auto before = sim.read_back();
        const std::vector<std::uint32_t> epochs(sim.reset_epochs().begin(), sim.reset_epochs().end());
        sim.scan_and_reset();
        const auto after = sim.read_back();
        for (std::size_t p = 0; p < 100; ++p) {
            const bool out = !(before[2 * p] >= 0.0f && before[2 * p] <= 1.0f);
            const bool reset = sim.reset_epochs()[p] != epochs[p];
            if (out && escaped_at[p] < 0) escaped_at[p] = scan;
            if (reset) {
                ++resets;
                if (escaped_at[p] >= 0 && scan - escaped_at[p] >= 10) ++late;
                escaped_at[p] = -1;
            } else {
                if (escaped_at[p] >= 0 && scan - escaped_at[p] >= 10) ++late;
                if (!out && std::memcmp(&before[2 * p], &after[2 * p], 2 * sizeof(float)) != 0) ++disturbed;
            }
        }
    }
    const bool ok = late == 0 && disturbed == 0 && resets > 100;
    return {ok ? Status::Pass : Status::Fail, std::to_string(resets) + " resets, " + std::to_string(late) +
                                                  " later than 10 scans, " + std::to_string(disturbed) +
                                                  " in-bounds particles disturbed"};
}

// --- Benchmark harness -------------------------------------------------------------------

Outcome bench_harness() {
    const fs::path dir = scratch_dir();
    const fs::path report = dir / "bench.json", table = dir / "bench.txt";
    const int code = run_cli("bench builtin:lorenz --particles 3000000 --steps 1000 --report '" + report.string() + "'",
                             table);
    if (code != 0) return {Status::Fail, "bench exited with " + std::to_string(code) + ": " + slurp(table)};
    const auto doc = nlohmann::json::parse(slurp(report));
    std::size_t timed = 0;
    std::string rows;
    bool ok = doc.contains("environment") && doc["environment"].contains("precision") &&
              doc["environment"].contains("devices") && doc["rows"].is_array() && !doc["rows"].empty();
    for (const auto& r : doc["rows"]) {
        ok = ok && r["system"] == "lorenz" && r["particles"] == 3000000;
        if (r["status"] == "ok") {
            ok = ok && r["steps"] == 1000 && r["mean_ms"].get<double>() > 0 && r["std_ms"].get<double>() >= 0;
            ++timed;
            rows += r["backend"].get<std::string>() + fmt(" %.2f ms/step; ", r["mean_ms"].get<double>());
        } else {
            rows += r["backend"].get<std::string>() + " skipped; ";
        }
    }
    ok = ok && timed >= 1 && slurp(table).find("mean ms") != std::string::npos;
    return {ok ? Status::Pass : Status::Fail, rows + "report well-formed"};
}

// --- Determinism --------------------------------------------------------------------------

Outcome determinism() {
    const fs::path dir = scratch_dir();
    std::string detail;
    bool ok = true;
    for (const char* format : {"csv", "bin"}) {
        const fs::path a = dir / (std::string("a.") + format), b = dir / (std::string("b.") + format);
        const std::string common =
            std::string("snapshot builtin:lorenz --steps 5000 --dt 0.01 --seed 7 --backend cpu --format ") + format;
        const int ca = run_cli(common + " --out '" + a.string() + "'", dir / "snap_a.log");
        const int cb = run_cli(common + " --out '" + b.string() + "'", dir / "snap_b.log");
        const std::string sa = slurp(a), sb = slurp(b);
        const bool same = ca == 0 && cb == 0 && !sa.empty() && sa == sb;
        ok = ok && same;
        detail += std::string(format) + (same ? " identical (" + std::to_string(sa.size()) + " bytes); " : " DIFFER; ");
    }
    return {ok ? Status::Pass : Status::Fail, detail};
}

}  // namespace

int main() {
    std::printf("backends: cpu yes, native %s, gpu %s\n", backend_available(BackendKind::Native) ? "yes" : "no",
                backend_available(BackendKind::Gpu) ? "yes" : "no");
    run_criterion("rk4-order", rk4_order);
    run_criterion("backend-equivalence", backend_equivalence);
    run_criterion("lorenz-landmarks", lorenz_landmarks);
    run_criterion("lift-exactness", lift_exactness);
    run_criterion("hh-dynamics", hh_dynamics);
    run_criterion("codegen-oracle", codegen_oracle);
    run_criterion("reset-liveness", reset_liveness);
    run_criterion("bench-harness", bench_harness);
    run_criterion("determinism", determinism);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
