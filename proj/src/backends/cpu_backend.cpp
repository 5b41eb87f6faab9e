#include "backends.hpp"

#include <algorithm>

#include "swarm/program.hpp"

namespace swarm {

namespace {

class CpuBackend final : public Backend {
public:
    CpuBackend(const SystemDefinition& def, Layout layout, std::size_t particles)
        : program_(def),
          integrator_(program_),
          buffer_(layout, particles, def.dimension()),
          block_(def.dimension() * BlockIntegrator::kBlock, 0.0f) {}

    BackendKind kind() const override { return BackendKind::Cpu; }
    std::string device_name() const override { return "host cpu (bytecode interpreter, 1 thread)"; }
    Layout layout() const override { return buffer_.layout(); }
    std::size_t particle_count() const override { return buffer_.particles(); }
    std::size_t dimension() const override { return buffer_.dimension(); }

    void upload(std::span<const float> positions) override { buffer_.upload(positions); }
    void set_parameters(std::span<const float> values) override { integrator_.set_parameters(values); }
    void read(std::size_t first, std::size_t count, std::span<float> out) override { buffer_.read(first, count, out); }
    void write(std::size_t first, std::size_t count, std::span<const float> values) override {
        buffer_.write(first, count, values);
    }

    void dispatch(std::size_t offset, std::size_t count, float h) override {
        if (offset > buffer_.particles() || count > buffer_.particles() - offset) {
            throw BackendError("dispatch range out of bounds");
        }
        constexpr std::size_t B = BlockIntegrator::kBlock;
        const std::size_t dim = buffer_.dimension();
        auto data = buffer_.data();
        for (std::size_t start = offset; start < offset + count; start += B) {
            const std::size_t n = std::min(B, offset + count - start);
            for (std::size_t d = 0; d < dim; ++d) {
                for (std::size_t j = 0; j < n; ++j) block_[d * B + j] = data[buffer_.index(start + j, d)];
            }
            integrator_.rk4(block_, n, h);
            for (std::size_t d = 0; d < dim; ++d) {
                for (std::size_t j = 0; j < n; ++j) data[buffer_.index(start + j, d)] = block_[d * B + j];
            }
        }
    }

private:
    Program program_;
    BlockIntegrator integrator_;
    HostBuffer buffer_;
    std::vector<float> block_;
};

}  // namespace

std::unique_ptr<Backend> make_cpu_backend(const SystemDefinition& def, Layout layout, std::size_t particles) {
    return std::make_unique<CpuBackend>(def, layout, particles);
}

}  // namespace swarm
