#include <cmath>
#include <numeric>
#include <thread>

#include "doctest.h"
#include "swarm/builtins.hpp"
#include "swarm/engine.hpp"
#include "swarm/error.hpp"
#include "swarm/random.hpp"

using namespace swarm;

namespace {

SystemDefinition decay(std::size_t count) {
    SystemDefinition def;
    def.name = "decay";
    def.state_variables = {{"x", "-k*x", {-10.0, 10.0}}, {"y", "x - y", {-10.0, 10.0}}};
    def.parameters = {{"k", 1.0, 0.0, 5.0}};
    def.techniques = {{"t", Projection::Planar2D, {"x", "y"}, ColorMode::position()}};
    ParticleGroup g;
    g.count = count;
    g.technique = "t";
    g.ic = {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}};
    def.groups = {g};
    return def;
}

// Drifts upward at unit speed from (0, 1); leaves the (0, 2) box around t = 1.
SystemDefinition drift(std::size_t count) {
    SystemDefinition def;
    def.name = "drift";
    def.state_variables = {{"x", "v", {0.0, 2.0}}, {"v", "0", {0.0, 2.0}}};
    def.techniques = {{"t", Projection::Planar2D, {"x", "v"}, ColorMode::position()}};
    ParticleGroup g;
    g.count = count;
    g.technique = "t";
    g.ic = {{"x", {0.0, 1.0}}, {"v", {0.5, 1.5}}};
    def.groups = {g};
    return def;
}

std::vector<BackendKind> host_backends() {
    std::vector<BackendKind> out{BackendKind::Cpu};
    if (backend_available(BackendKind::Native)) out.push_back(BackendKind::Native);
    return out;
}

}  // namespace

TEST_CASE("uniform sampling is deterministic and half-open") {
    CHECK(uniform01(1, 2, 3, 4) == uniform01(1, 2, 3, 4));
    CHECK(uniform01(1, 2, 3, 4) != uniform01(1, 2, 3, 5));
    CHECK(uniform01(1, 2, 3, 4) != uniform01(1, 2, 4, 4));
    CHECK(uniform01(1, 2, 3, 4) != uniform01(2, 2, 3, 4));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double u = uniform01(7, i, 0, 0);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
    const Interval r{-0.1f, 0.3f};
    CHECK(sample_interval(r, 0.0) >= static_cast<float>(r.lo));
    CHECK(sample_interval(r, std::nextafter(1.0, 0.0)) < static_cast<float>(r.hi));
    CHECK(sample_interval({0.0, 1.0}, 0.25) == 0.25f);
}

TEST_CASE("initial conditions lie in the group cube and follow the seed") {
    SimulationConfig config;
    config.seed = 11;
    Simulation a(builtin_lorenz(), config);
    Simulation b(builtin_lorenz(), config);
    config.seed = 12;
    Simulation c(builtin_lorenz(), config);
    const auto pa = a.read_back();
    CHECK(pa == b.read_back());
    CHECK(pa != c.read_back());
    for (std::size_t i = 0; i < a.particle_count(); ++i) {
        REQUIRE(pa[3 * i] >= -10.0f);
        REQUIRE(pa[3 * i] < 10.0f);
        REQUIRE(pa[3 * i + 1] >= -30.0f);
        REQUIRE(pa[3 * i + 1] < 30.0f);
        REQUIRE(pa[3 * i + 2] >= 0.0f);
        REQUIRE(pa[3 * i + 2] < 50.0f);
    }
    const auto x0 = initial_condition(a.system(), 0, 11, 5, 0);
    CHECK(std::equal(x0.begin(), x0.end(), pa.begin() + 15));
    CHECK(a.read_back(3, 10).size() == 30);
    CHECK(a.read_back() == a.read_back());
    CHECK_THROWS_AS(a.read_back(9995, 10), OutOfRange);
}

TEST_CASE("constructor checks its configuration") {
    SimulationConfig config;
    config.step_size = 0.0;
    CHECK_THROWS_AS(Simulation(decay(10), config), OutOfRange);
    config.step_size = 0.01;
    config.reset_batch = 11;
    CHECK_THROWS_AS(Simulation(decay(10), config), OutOfRange);
    config.reset_batch = 0;
    CHECK(Simulation(decay(10), config).reset_batch() == 10);
    CHECK(Simulation(decay(5000), config).reset_batch() == 1024);
    SystemDefinition no_groups = decay(10);
    no_groups.groups.clear();
    CHECK_THROWS_AS(Simulation(no_groups, config), ValidationError);
    SystemDefinition broken = decay(10);
    broken.state_variables[0].rhs = "q";
    CHECK_THROWS_AS(Simulation(broken, config), ValidationError);
}

TEST_CASE("layouts and host backends agree") {
    std::vector<std::vector<float>> results;
    for (BackendKind kind : host_backends()) {
        for (Layout layout : {Layout::RowMajor, Layout::ColumnMajor}) {
            SimulationConfig config;
            config.layout = layout;
            config.seed = 3;
            SystemDefinition def = builtin_lorenz();
            def.groups[0].count = 333;
            Simulation sim(def, config, kind);
            sim.run(200);
            results.push_back(sim.read_back());
        }
    }
    for (std::size_t i = 1; i < results.size(); ++i) {
        REQUIRE(results[i].size() == results[0].size());
        for (std::size_t j = 0; j < results[0].size(); ++j) {
            REQUIRE(std::abs(results[i][j] - results[0][j]) <= 1e-4f * std::max(1.0f, std::abs(results[0][j])));
        }
    }
}

TEST_CASE("backward groups integrate with negative step") {
    SystemDefinition def = decay(4);
    ParticleGroup back = def.groups[0];
    back.direction = Direction::Backward;
    def.groups.push_back(back);
    SimulationConfig config;
    config.step_size = 0.01;
    Simulation sim(def, config);
    const auto before = sim.read_back();
    sim.run(10);
    const auto after = sim.read_back();
    for (std::size_t p = 0; p < 4; ++p) CHECK(std::abs(after[2 * p]) < std::abs(before[2 * p]));
    for (std::size_t p = 4; p < 8; ++p) CHECK(std::abs(after[2 * p]) > std::abs(before[2 * p]));
    CHECK(sim.group_offsets()[1] == 4);
    CHECK(sim.group_ids()[5] == 1);
}

TEST_CASE("scan resets escaped, stale and non-finite particles only") {
    SystemDefinition def = decay(8);
    def.groups[0].max_age = 10.0;
    SimulationConfig config;
    config.reset_batch = 8;
    config.step_size = 1.0;
    Simulation sim(def, config);
    std::vector<float> escaped{20.0f, 0.5f};
    sim.write_particles(2, escaped);
    std::vector<float> nan_particle{std::nanf(""), 0.5f};
    sim.write_particles(5, nan_particle);
    const auto before = sim.read_back();
    const ScanResult r = sim.scan_and_reset(0);
    CHECK(r.reset_count == 2);
    CHECK(r.next_cursor == 0);
    const auto after = sim.read_back();
    for (std::size_t p : {0u, 1u, 3u, 4u, 6u, 7u}) {
        CHECK(after[2 * p] == before[2 * p]);
        CHECK(after[2 * p + 1] == before[2 * p + 1]);
    }
    CHECK(sim.reset_epochs()[2] == 1);
    CHECK(sim.reset_epochs()[5] == 1);
    CHECK(after[4] >= 0.0f);
    CHECK(after[4] < 1.0f);

    sim.set_parameter("k", 0.0);
    sim.run(11);  // ages 11 > max_age 10
    CHECK(sim.scan_and_reset(0).reset_count == 8);
    CHECK(sim.ages()[0] == 0.0);
}

TEST_CASE("scan cursor wraps") {
    SimulationConfig config;
    config.reset_batch = 4;
    Simulation sim(decay(10), config);
    CHECK(sim.scan_and_reset().next_cursor == 4);
    CHECK(sim.scan_and_reset().next_cursor == 8);
    CHECK(sim.scan_and_reset().next_cursor == 2);
    CHECK_THROWS_AS(sim.scan_and_reset(10), OutOfRange);
}

TEST_CASE("escaped particles are reset within ceil(P / batch) scans") {
    SimulationConfig config;
    config.reset_batch = 7;
    config.step_size = 0.05;
    Simulation sim(drift(50), config);
    const std::size_t window = (50 + 6) / 7;
    std::vector<int> out_since(50, -1);
    for (int scan = 0; scan < 400; ++scan) {
        sim.step();
        const auto pos = sim.read_back();
        sim.scan_and_reset();
        const auto after = sim.read_back();
        for (std::size_t p = 0; p < 50; ++p) {
            const bool out = pos[2 * p] > 2.0f;
            const bool reset = after[2 * p] != pos[2 * p];
            if (out && out_since[p] < 0) out_since[p] = scan;
            if (reset) {
                out_since[p] = -1;
            } else if (out_since[p] >= 0) {
                REQUIRE(static_cast<std::size_t>(scan - out_since[p]) < window);
            }
        }
    }
    const auto epochs = sim.reset_epochs();
    CHECK(std::accumulate(epochs.begin(), epochs.end(), 0u) > 50);
}

TEST_CASE("parameters clamp, reject junk and queue across threads") {
    Simulation sim(decay(4), SimulationConfig{});
    sim.set_parameter("k", 7.0);
    CHECK(sim.parameter("k") == 5.0);
    sim.set_parameter("k", -1.0);
    CHECK(sim.parameter("k") == 0.0);
    CHECK_THROWS_AS(sim.set_parameter("q", 1.0), UnknownParameter);
    CHECK_THROWS_AS(sim.set_parameter("k", std::nan("")), OutOfRange);
    CHECK_THROWS_AS(sim.enqueue_parameter("q", 1.0), UnknownParameter);

    std::thread producer([&] { sim.enqueue_parameter("k", 2.5); });
    producer.join();
    CHECK(sim.parameter("k") == 0.0);
    sim.step();
    CHECK(sim.parameter("k") == 2.5);
}

TEST_CASE("particle independence") {
    // The same start point gives the same trajectory whatever its slot or neighbours.
    SystemDefinition def = builtin_lorenz();
    def.groups[0].count = 100;
    Simulation a(def, SimulationConfig{});
    Simulation b(def, SimulationConfig{});
    auto pos = a.read_back();
    std::vector<float> reversed(pos.size());
    for (std::size_t p = 0; p < 100; ++p) std::copy_n(pos.begin() + 3 * p, 3, reversed.begin() + 3 * (99 - p));
    b.write_particles(0, reversed);
    a.run(300);
    b.run(300);
    const auto ra = a.read_back();
    const auto rb = b.read_back();
    for (std::size_t p = 0; p < 100; ++p) {
        for (std::size_t d = 0; d < 3; ++d) REQUIRE(ra[3 * p + d] == rb[3 * (99 - p) + d]);
    }
}
