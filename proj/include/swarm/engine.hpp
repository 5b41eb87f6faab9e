#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarm/backend.hpp"
#include "swarm/codegen.hpp"
#include "swarm/system.hpp"

namespace swarm {

struct SimulationConfig {
    double step_size = 0.01;  // magnitude; the sign comes from each group's direction
    Layout layout = Layout::ColumnMajor;
    /// Particles read back per scan_and_reset call. 0 picks min(P, 1024).
    std::size_t reset_batch = 0;
    std::uint64_t seed = 0;
};

struct ScanResult {
    std::size_t next_cursor = 0;
    std::size_t reset_count = 0;
};

/// Initial condition of `particle` (a global index) for reset epoch `epoch`, sampled
/// componentwise from the half-open ic cube of its group.
std::vector<float> initial_condition(const SystemDefinition& def, std::size_t group, std::uint64_t seed,
                                     std::uint64_t particle, std::uint32_t epoch);

/// Owns the particle buffers of one compiled system and runs the loop body:
/// step, batched host-side reset, parameter updates and read-back.
///
/// A single owner drives step/scan/read_back. Other threads may call
/// enqueue_parameter; queued updates are applied at the start of the next step().
class Simulation {
public:
    /// Validates the definition, builds the backend and samples initial conditions.
    Simulation(SystemDefinition def, SimulationConfig config, BackendKind backend = BackendKind::Cpu);

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const SystemDefinition& system() const { return def_; }
    const SimulationConfig& config() const { return config_; }
    std::size_t particle_count() const { return group_of_.size(); }
    std::size_t dimension() const { return def_.dimension(); }
    Backend& backend() { return *backend_; }
    std::size_t reset_batch() const { return reset_batch_; }

    /// One RK4 step for every particle: one dispatch per group with h signed by its direction.
    void step();
    void run(std::size_t steps);

    void set_step_size(double h);

    /// Values are clamped to the parameter's [min, max]. Throws UnknownParameter, or
    /// OutOfRange for a non-finite value.
    void set_parameter(std::string_view name, double value);
    double parameter(std::string_view name) const;
    std::span<const float> parameter_values() const { return params_; }

    /// Thread-safe; checked for the name immediately, applied before the next step.
    void enqueue_parameter(std::string_view name, double value);

    /// Reads back reset_batch particles starting at `cursor` (wrapping) and re-samples any
    /// that are out of bounds, non-finite, or older than their group's max_age. Only the
    /// re-sampled particles are written back.
    ScanResult scan_and_reset(std::size_t cursor);
    /// Same, continuing from the internal cursor.
    ScanResult scan_and_reset();
    std::size_t cursor() const { return cursor_; }

    /// Particle-major copy of particles [first, first + count).
    std::vector<float> read_back(std::size_t first, std::size_t count);
    std::vector<float> read_back();

    /// Overwrites particles [first, first + count) from particle-major data, resetting their ages.
    void write_particles(std::size_t first, std::span<const float> positions);

    std::span<const double> ages() const { return ages_; }
    std::span<const std::uint32_t> group_ids() const { return group_of_; }
    std::span<const std::uint32_t> reset_epochs() const { return epoch_; }
    std::uint64_t steps_taken() const { return steps_; }
    /// Group index -> first particle index.
    std::span<const std::size_t> group_offsets() const { return offsets_; }

private:
    void drain_queue();
    bool needs_reset(std::size_t particle, std::span<const float> position) const;
    void scan_range(std::size_t first, std::size_t count, std::size_t& resets);

    SystemDefinition def_;
    SimulationConfig config_;
    std::unique_ptr<Backend> backend_;
    std::vector<float> params_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> group_of_;
    std::vector<std::uint32_t> epoch_;
    std::vector<double> ages_;
    std::size_t reset_batch_ = 0;
    std::size_t cursor_ = 0;
    std::uint64_t steps_ = 0;
    bool params_dirty_ = false;

    std::mutex queue_mutex_;
    std::vector<std::pair<std::size_t, double>> queue_;
};

}  // namespace swarm
