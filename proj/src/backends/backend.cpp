#include "backends.hpp"

namespace swarm {

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Cpu: return "cpu";
        case BackendKind::Native: return "native";
        case BackendKind::Gpu: return "gpu";
    }
    return "cpu";
}

BackendKind parse_backend(std::string_view text) {
    if (text == "cpu") return BackendKind::Cpu;
    if (text == "native") return BackendKind::Native;
    if (text == "gpu") return BackendKind::Gpu;
    throw OutOfRange("unknown backend '" + std::string(text) + "' (expected cpu, native or gpu)");
}

HostBuffer::HostBuffer(Layout layout, std::size_t particles, std::size_t dimension)
    : layout_(layout), particles_(particles), dimension_(dimension), data_(particles * dimension, 0.0f) {}

void HostBuffer::check_range(std::size_t first, std::size_t count, std::size_t span_size) const {
    if (first > particles_ || count > particles_ - first) throw BackendError("particle range out of bounds");
    if (span_size != count * dimension_) throw BackendError("host span size does not match particle range");
}

void HostBuffer::upload(std::span<const float> positions) {
    check_range(0, particles_, positions.size());
    write(0, particles_, positions);
}

void HostBuffer::read(std::size_t first, std::size_t count, std::span<float> out) const {
    check_range(first, count, out.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t d = 0; d < dimension_; ++d) out[i * dimension_ + d] = data_[index(first + i, d)];
    }
}

void HostBuffer::write(std::size_t first, std::size_t count, std::span<const float> values) {
    check_range(first, count, values.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t d = 0; d < dimension_; ++d) data_[index(first + i, d)] = values[i * dimension_ + d];
    }
}

std::unique_ptr<Backend> make_backend(BackendKind kind, const SystemDefinition& def, Layout layout,
                                      std::size_t particle_count) {
    switch (kind) {
        case BackendKind::Cpu: return make_cpu_backend(def, layout, particle_count);
        case BackendKind::Native: return make_native_backend(def, layout, particle_count);
        case BackendKind::Gpu: return make_gpu_backend(def, layout, particle_count);
    }
    throw BackendUnavailable("unknown backend");
}

bool backend_available(BackendKind kind) {
    switch (kind) {
        case BackendKind::Cpu: return true;
        case BackendKind::Native: return native_backend_available();
        case BackendKind::Gpu: return gpu_backend_available();
    }
    return false;
}

}  // namespace swarm
