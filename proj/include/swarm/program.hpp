#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swarm/system.hpp"

namespace swarm {

/// Register-machine form of a system's derivative, evaluated in 32-bit floats over
/// blocks of particles by the CPU backend.
///
/// Register file: [0, N) state variables, [N, N+M) parameters, then constants, then
/// temporaries. Every register holds one value per particle in the block.
class Program {
public:
    enum class Op : std::uint8_t {
        Add, Sub, Mul, Div, Pow, Neg,
        Exp, Log, Sin, Cos, Tan, Tanh, Sqrt, Abs, Min, Max, Sigmoid,
    };

    struct Instruction {
        Op op;
        std::uint32_t dst;
        std::uint32_t a;
        std::uint32_t b;
    };

    explicit Program(const SystemDefinition& def);

    std::size_t dimension() const { return dimension_; }
    std::size_t parameter_count() const { return parameter_count_; }
    std::size_t register_count() const { return register_count_; }
    std::uint32_t constant_base() const { return static_cast<std::uint32_t>(dimension_ + parameter_count_); }
    const std::vector<float>& constants() const { return constants_; }
    const std::vector<Instruction>& code() const { return code_; }
    /// Register that holds d(x_i)/dt after execution.
    const std::vector<std::uint32_t>& outputs() const { return outputs_; }

private:
    std::size_t dimension_ = 0;
    std::size_t parameter_count_ = 0;
    std::size_t register_count_ = 0;
    std::vector<float> constants_;
    std::vector<Instruction> code_;
    std::vector<std::uint32_t> outputs_;
};

/// Scratch register file plus the block RK4 driver.
class BlockIntegrator {
public:
    static constexpr std::size_t kBlock = 64;

    explicit BlockIntegrator(const Program& program);

    void set_parameters(std::span<const float> values);

    /// Advances `count` (<= kBlock) particles held structure-of-arrays in `state`
    /// (component d of particle j at state[d * kBlock + j]) by one RK4 step of size h.
    void rk4(std::span<float> state, std::size_t count, float h);

    /// Evaluates the derivative for `count` particles, same layout as rk4().
    void derivative(std::span<const float> state, std::span<float> out, std::size_t count);

private:
    void run(std::size_t count);
    float* reg(std::uint32_t r) { return registers_.data() + static_cast<std::size_t>(r) * kBlock; }

    const Program* program_;
    std::vector<float> registers_;
    std::vector<float> k_;  // k1..k4, dimension * kBlock each
};

}  // namespace swarm
