#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/codegen.hpp"
#include "swarm/system.hpp"

namespace swarm {

/// cpu: block bytecode interpreter, always available.
/// native: the generated OpenCL C kernel compiled for the host with the system C++ compiler.
/// gpu: the generated kernel on an OpenCL GPU device.
enum class BackendKind { Cpu, Native, Gpu };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend(std::string_view text);

/// Device-side particle buffer plus the compiled RK4 step for one system.
///
/// read() and write() always exchange particle-major host data (N floats per particle)
/// regardless of the buffer layout.
class Backend {
public:
    virtual ~Backend() = default;

    virtual BackendKind kind() const = 0;
    virtual std::string device_name() const = 0;
    virtual Layout layout() const = 0;
    virtual std::size_t particle_count() const = 0;
    virtual std::size_t dimension() const = 0;

    /// Replaces the whole buffer; `positions` is particle-major.
    virtual void upload(std::span<const float> positions) = 0;
    virtual void set_parameters(std::span<const float> values) = 0;
    /// Advances particles [offset, offset + count) by one RK4 step of signed size h.
    virtual void dispatch(std::size_t offset, std::size_t count, float h) = 0;
    virtual void read(std::size_t first, std::size_t count, std::span<float> out) = 0;
    virtual void write(std::size_t first, std::size_t count, std::span<const float> values) = 0;
    /// Blocks until every queued dispatch and transfer has completed.
    virtual void finish() {}
};

std::unique_ptr<Backend> make_backend(BackendKind kind, const SystemDefinition& def, Layout layout,
                                      std::size_t particle_count);

/// Whether `kind` can be constructed here. For gpu this probes for an OpenCL runtime
/// with a GPU device; for native it checks that the host compiler can build a kernel.
bool backend_available(BackendKind kind);

/// Host-memory particle buffer shared by the CPU-resident backends.
class HostBuffer {
public:
    HostBuffer(Layout layout, std::size_t particles, std::size_t dimension);

    Layout layout() const { return layout_; }
    std::size_t particles() const { return particles_; }
    std::size_t dimension() const { return dimension_; }
    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    std::size_t index(std::size_t particle, std::size_t component) const {
        return layout_ == Layout::RowMajor ? particle * dimension_ + component : component * particles_ + particle;
    }

    void upload(std::span<const float> positions);
    void read(std::size_t first, std::size_t count, std::span<float> out) const;
    void write(std::size_t first, std::size_t count, std::span<const float> values);

private:
    void check_range(std::size_t first, std::size_t count, std::size_t span_size) const;

    Layout layout_;
    std::size_t particles_;
    std::size_t dimension_;
    std::vector<float> data_;
};

}  // namespace swarm
