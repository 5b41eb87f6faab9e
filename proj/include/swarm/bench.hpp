#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "swarm/backend.hpp"
#include "swarm/codegen.hpp"
#include "swarm/system.hpp"

namespace swarm {

struct BenchRow {
    std::string system;
    std::size_t particles = 0;
    BackendKind backend = BackendKind::Cpu;
    Layout layout = Layout::ColumnMajor;
    std::size_t steps = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    bool skipped = false;
    std::string note;  // why a row was skipped
};

struct BenchEnvironment {
    std::vector<std::pair<BackendKind, std::string>> devices;
    std::string precision = "float32";
    std::string compiler;
    unsigned hardware_threads = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    BenchEnvironment environment;
};

struct BenchOptions {
    std::size_t particles = 0;
    std::size_t steps = 1000;
    std::size_t warmup = 10;
    double step_size = 0.01;
    std::vector<BackendKind> backends{BackendKind::Cpu, BackendKind::Native, BackendKind::Gpu};
    std::vector<Layout> layouts{Layout::ColumnMajor};
};

/// Copy of `def` whose groups keep their proportions but total `particles`.
SystemDefinition with_particle_count(const SystemDefinition& def, std::size_t particles);

inline constexpr std::size_t kMinBenchSteps = 100;

/// Times `steps` individual steps (after `warmup` untimed ones) per backend x layout,
/// synchronizing the device around every timed step. Groups keep their proportions
/// and are rescaled to `particles`. Unavailable backends give skipped rows.
/// Throws OutOfRange if particles < 1 or steps < kMinBenchSteps.
BenchReport bench(const SystemDefinition& def, const BenchOptions& options);

/// Aligned plain-text table followed by the environment block.
std::string format_table(const BenchReport& report);
std::string to_json(const BenchReport& report);

}  // namespace swarm
