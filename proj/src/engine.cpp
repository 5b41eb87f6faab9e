#include "swarm/engine.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/error.hpp"
#include "swarm/random.hpp"

namespace swarm {

std::vector<float> initial_condition(const SystemDefinition& def, std::size_t group, std::uint64_t seed,
                                     std::uint64_t particle, std::uint32_t epoch) {
    const ParticleGroup& g = def.groups.at(group);
    std::vector<float> x(def.dimension());
    for (std::size_t d = 0; d < x.size(); ++d) {
        x[d] = sample_interval(def.ic_range(g, d), uniform01(seed, particle, epoch, static_cast<std::uint32_t>(d)));
    }
    return x;
}

Simulation::Simulation(SystemDefinition def, SimulationConfig config, BackendKind backend)
    : def_(std::move(def)), config_(config) {
    ValidationReport report = validate_system(def_);
    if (!report.ok()) throw ValidationError("invalid system '" + def_.name + "': " + report.summary());
    if (def_.groups.empty()) throw ValidationError("system '" + def_.name + "' has no particle groups");
    if (!(config_.step_size > 0.0) || !std::isfinite(config_.step_size)) {
        throw OutOfRange("step size must be positive and finite");
    }

    const std::size_t total = def_.particle_count();
    reset_batch_ = config_.reset_batch == 0 ? std::min<std::size_t>(total, 1024) : config_.reset_batch;
    if (reset_batch_ < 1 || reset_batch_ > total) {
        throw OutOfRange("reset batch must lie in [1, " + std::to_string(total) + "]");
    }

    group_of_.reserve(total);
    for (std::size_t g = 0; g < def_.groups.size(); ++g) {
        offsets_.push_back(group_of_.size());
        group_of_.insert(group_of_.end(), def_.groups[g].count, static_cast<std::uint32_t>(g));
    }
    epoch_.assign(total, 0);
    ages_.assign(total, 0.0);

    for (const auto& p : def_.parameters) params_.push_back(static_cast<float>(p.default_value));

    backend_ = make_backend(backend, def_, config_.layout, total);
    backend_->set_parameters(params_);

    const std::size_t n = def_.dimension();
    std::vector<float> positions(total * n);
    for (std::size_t i = 0; i < total; ++i) {
        auto x = initial_condition(def_, group_of_[i], config_.seed, i, 0);
        std::copy(x.begin(), x.end(), positions.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    backend_->upload(positions);
}

void Simulation::step() {
    drain_queue();
    if (params_dirty_) {
        backend_->set_parameters(params_);
        params_dirty_ = false;
    }
    const auto h = static_cast<float>(config_.step_size);
    for (std::size_t g = 0; g < def_.groups.size(); ++g) {
        const float signed_h = def_.groups[g].direction == Direction::Forward ? h : -h;
        backend_->dispatch(offsets_[g], def_.groups[g].count, signed_h);
    }
    for (double& a : ages_) a += config_.step_size;
    ++steps_;
}

void Simulation::run(std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) step();
}

void Simulation::set_step_size(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw OutOfRange("step size must be positive and finite");
    config_.step_size = h;
}

void Simulation::set_parameter(std::string_view name, double value) {
    auto index = def_.parameter_index(name);
    if (!index) throw UnknownParameter(std::string(name));
    if (!std::isfinite(value)) throw OutOfRange("parameter " + std::string(name) + " must be finite");
    const auto clamped = static_cast<float>(def_.parameters[*index].clamp(value));
    if (params_[*index] != clamped) {
        params_[*index] = clamped;
        params_dirty_ = true;
    }
}

double Simulation::parameter(std::string_view name) const {
    auto index = def_.parameter_index(name);
    if (!index) throw UnknownParameter(std::string(name));
    return params_[*index];
}

void Simulation::enqueue_parameter(std::string_view name, double value) {
    auto index = def_.parameter_index(name);
    if (!index) throw UnknownParameter(std::string(name));
    if (!std::isfinite(value)) throw OutOfRange("parameter " + std::string(name) + " must be finite");
    std::lock_guard lock(queue_mutex_);
    queue_.emplace_back(*index, value);
}

void Simulation::drain_queue() {
    std::vector<std::pair<std::size_t, double>> pending;
    {
        std::lock_guard lock(queue_mutex_);
        pending.swap(queue_);
    }
    for (const auto& [index, value] : pending) set_parameter(def_.parameters[index].name, value);
}

bool Simulation::needs_reset(std::size_t particle, std::span<const float> x) const {
    for (std::size_t d = 0; d < x.size(); ++d) {
        // NaN fails both comparisons.
        if (!def_.state_variables[d].bounds.contains(x[d])) return true;
    }
    const auto& max_age = def_.groups[group_of_[particle]].max_age;
    return max_age && ages_[particle] > *max_age;
}

void Simulation::scan_range(std::size_t first, std::size_t count, std::size_t& resets) {
    const std::size_t n = def_.dimension();
    std::vector<float> batch(count * n);
    backend_->read(first, count, batch);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t p = first + i;
        if (!needs_reset(p, std::span<const float>(batch).subspan(i * n, n))) continue;
        ++epoch_[p];
        ages_[p] = 0.0;
        auto x = initial_condition(def_, group_of_[p], config_.seed, p, epoch_[p]);
        backend_->write(p, 1, x);
        ++resets;
    }
}

ScanResult Simulation::scan_and_reset(std::size_t cursor) {
    const std::size_t total = particle_count();
    if (cursor >= total) throw OutOfRange("scan cursor beyond particle count");
    std::size_t resets = 0;
    const std::size_t head = std::min(reset_batch_, total - cursor);
    scan_range(cursor, head, resets);
    if (head < reset_batch_) scan_range(0, reset_batch_ - head, resets);
    cursor_ = (cursor + reset_batch_) % total;
    return {cursor_, resets};
}

ScanResult Simulation::scan_and_reset() { return scan_and_reset(cursor_); }

std::vector<float> Simulation::read_back(std::size_t first, std::size_t count) {
    if (first > particle_count() || count > particle_count() - first) {
        throw OutOfRange("read_back range beyond particle count");
    }
    std::vector<float> out(count * def_.dimension());
    backend_->read(first, count, out);
    return out;
}

std::vector<float> Simulation::read_back() { return read_back(0, particle_count()); }

void Simulation::write_particles(std::size_t first, std::span<const float> positions) {
    const std::size_t n = def_.dimension();
    if (positions.size() % n != 0) throw OutOfRange("position data is not a whole number of particles");
    const std::size_t count = positions.size() / n;
    if (first > particle_count() || count > particle_count() - first) {
        throw OutOfRange("write range beyond particle count");
    }
    backend_->write(first, count, positions);
    std::fill_n(ages_.begin() + static_cast<std::ptrdiff_t>(first), count, 0.0);
}

}  // namespace swarm
