#include "swarm/program.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>

#include "swarm/error.hpp"
#include "swarm/expression.hpp"
#include "interpreter.hpp"


namespace swarm {

namespace {

Program::Op op_for(Function f) {
    switch (f) {
        case Function::Exp: return Program::Op::Exp;
        case Function::Log: return Program::Op::Log;
        case Function::Sin: return Program::Op::Sin;
        case Function::Cos: return Program::Op::Cos;
        case Function::Tan: return Program::Op::Tan;
        case Function::Tanh: return Program::Op::Tanh;
        case Function::Sqrt: return Program::Op::Sqrt;
        case Function::Abs: return Program::Op::Abs;
        case Function::Pow: return Program::Op::Pow;
        case Function::Min: return Program::Op::Min;
        case Function::Max: return Program::Op::Max;
        case Function::Sigmoid: return Program::Op::Sigmoid;
    }
    return Program::Op::Exp;
}

Program::Op op_for(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return Program::Op::Add;
        case BinaryOp::Sub: return Program::Op::Sub;
        case BinaryOp::Mul: return Program::Op::Mul;
        case BinaryOp::Div: return Program::Op::Div;
        case BinaryOp::Pow: return Program::Op::Pow;
    }
    return Program::Op::Add;
}

struct Compiler {
    const SystemDefinition& def;
    std::vector<float> constants;
    std::map<std::uint32_t, std::uint32_t> constant_slot;  // float bits -> index
    std::vector<Program::Instruction> code;
    std::uint32_t temporaries = 0;

    std::uint32_t constant(double v) {
        const float f = static_cast<float>(v);
        const auto bits = std::bit_cast<std::uint32_t>(f);
        auto [it, inserted] = constant_slot.emplace(bits, static_cast<std::uint32_t>(constants.size()));
        if (inserted) constants.push_back(f);
        return it->second;
    }

    // Constants are numbered before temporaries are known, so registers are encoded
    // as tagged values and resolved in a second pass.
    static constexpr std::uint32_t kConstTag = 1u << 30;
    static constexpr std::uint32_t kTempTag = 1u << 31;

    std::uint32_t compile(const Expr& e) {
        switch (e.kind()) {
            case Expr::Kind::Number:
                return kConstTag | constant(e.value());
            case Expr::Kind::Variable: {
                if (auto i = def.variable_index(e.name())) return static_cast<std::uint32_t>(*i);
                if (auto i = def.parameter_index(e.name())) {
                    return static_cast<std::uint32_t>(def.dimension() + *i);
                }
                throw Error("unresolved identifier " + e.name());
            }
            case Expr::Kind::Negate: {
                const std::uint32_t a = compile(e.children()[0]);
                return push(Program::Op::Neg, a, a);
            }
            case Expr::Kind::Binary: {
                const std::uint32_t a = compile(e.children()[0]);
                const std::uint32_t b = compile(e.children()[1]);
                return push(op_for(e.op()), a, b);
            }
            case Expr::Kind::Call: {
                const std::uint32_t a = compile(e.children()[0]);
                const std::uint32_t b = e.children().size() > 1 ? compile(e.children()[1]) : a;
                return push(op_for(e.function()), a, b);
            }
        }
        return 0;
    }

    // Identical (op, a, b) always yields the same bits, so repeats share one register.
    std::map<std::tuple<Program::Op, std::uint32_t, std::uint32_t>, std::uint32_t> seen;

    std::uint32_t push(Program::Op op, std::uint32_t a, std::uint32_t b) {
        auto [it, inserted] = seen.emplace(std::make_tuple(op, a, b), kTempTag | temporaries);
        if (!inserted) return it->second;
        ++temporaries;
        code.push_back({op, it->second, a, b});
        return it->second;
    }
};

}  // namespace

Program::Program(const SystemDefinition& def) : dimension_(def.dimension()), parameter_count_(def.parameters.size()) {
    Compiler c{def, {}, {}, {}, 0, {}};
    std::vector<std::uint32_t> roots;
    for (const auto& v : def.state_variables) roots.push_back(c.compile(parse(v.rhs)));

    constants_ = std::move(c.constants);
    const auto const_base = static_cast<std::uint32_t>(dimension_ + parameter_count_);
    const auto temp_base = static_cast<std::uint32_t>(const_base + constants_.size());
    auto resolve = [&](std::uint32_t r) -> std::uint32_t {
        if (r & Compiler::kTempTag) return temp_base + (r & ~Compiler::kTempTag);
        if (r & Compiler::kConstTag) return const_base + (r & ~Compiler::kConstTag);
        return r;
    };
    code_ = std::move(c.code);

    // Recycle temporaries once their last reader has run; keeps the register file in L1.
    constexpr std::size_t kForever = static_cast<std::size_t>(-1);
    std::vector<std::size_t> last_use(c.temporaries, 0);
    auto touch = [&](std::uint32_t r, std::size_t at) {
        if (r & Compiler::kTempTag) {
            auto& slot = last_use[r & ~Compiler::kTempTag];
            if (slot != kForever) slot = std::max(slot, at);
        }
    };
    for (std::size_t i = 0; i < code_.size(); ++i) {
        touch(code_[i].a, i);
        touch(code_[i].b, i);
    }
    for (auto r : roots) {
        if (r & Compiler::kTempTag) last_use[r & ~Compiler::kTempTag] = kForever;
    }
    std::vector<std::uint32_t> physical(c.temporaries, 0);
    std::vector<std::uint32_t> free_slots;
    std::uint32_t slots = 0;
    std::vector<std::vector<std::uint32_t>> expiring(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const std::uint32_t t = code_[i].dst & ~Compiler::kTempTag;
        // Operands are read before dst is written, so a slot freed by this
        // instruction's own operands could be reused; stay conservative and free after.
        if (free_slots.empty()) {
            physical[t] = slots++;
        } else {
            physical[t] = free_slots.back();
            free_slots.pop_back();
        }
        if (last_use[t] != kForever) {
            expiring[last_use[t] > i ? last_use[t] : i].push_back(physical[t]);
        }
        for (auto slot : expiring[i]) free_slots.push_back(slot);
    }
    auto resolve_physical = [&](std::uint32_t r) -> std::uint32_t {
        if (r & Compiler::kTempTag) return temp_base + physical[r & ~Compiler::kTempTag];
        return resolve(r);
    };
    for (auto& ins : code_) {
        ins.dst = resolve_physical(ins.dst);
        ins.a = resolve_physical(ins.a);
        ins.b = resolve_physical(ins.b);
    }
    for (auto r : roots) outputs_.push_back(resolve_physical(r));
    register_count_ = temp_base + slots;
}

BlockIntegrator::BlockIntegrator(const Program& program)
    : program_(&program),
      registers_(program.register_count() * kBlock, 0.0f),
      k_(4 * program.dimension() * kBlock, 0.0f) {
    const auto& constants = program.constants();
    for (std::size_t i = 0; i < constants.size(); ++i) {
        float* r = reg(static_cast<std::uint32_t>(program.constant_base() + i));
        for (std::size_t j = 0; j < kBlock; ++j) r[j] = constants[i];
    }
}

void BlockIntegrator::set_parameters(std::span<const float> values) {
    if (values.size() != program_->parameter_count()) throw Error("parameter count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        float* r = reg(static_cast<std::uint32_t>(program_->dimension() + i));
        for (std::size_t j = 0; j < kBlock; ++j) r[j] = values[i];
    }
}

void BlockIntegrator::run(std::size_t) {
#if SWARM_HAVE_AVX2_INTERPRETER
    static const bool avx2 = __builtin_cpu_supports("avx2");
    if (avx2) {
        detail::run_program_avx2(*program_, registers_.data());
        return;
    }
#endif
    detail::run_program(*program_, registers_.data());
}

void BlockIntegrator::derivative(std::span<const float> state, std::span<float> out, std::size_t n) {
    const std::size_t dim = program_->dimension();
    for (std::size_t d = 0; d < dim; ++d) {
        std::copy_n(state.data() + d * kBlock, n, reg(static_cast<std::uint32_t>(d)));
    }
    run(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::copy_n(reg(program_->outputs()[d]), n, out.data() + d * kBlock);
    }
}

void BlockIntegrator::rk4(std::span<float> state, std::size_t n, float h) {
    const std::size_t dim = program_->dimension();
    const float half_h = h * 0.5f;
    const float sixth_h = h / 6.0f;
    float* k1 = k_.data();
    float* k2 = k1 + dim * kBlock;
    float* k3 = k2 + dim * kBlock;
    float* k4 = k3 + dim * kBlock;
    const auto& outputs = program_->outputs();

    auto evaluate_into = [&](float* k) {
        run(n);
        for (std::size_t d = 0; d < dim; ++d) std::copy_n(reg(outputs[d]), n, k + d * kBlock);
    };
    auto load_stage = [&](const float* k, float scale) {
        for (std::size_t d = 0; d < dim; ++d) {
            const float* __restrict x = state.data() + d * kBlock;
            const float* __restrict kd = k + d * kBlock;
            float* __restrict t = reg(static_cast<std::uint32_t>(d));
            for (std::size_t j = 0; j < n; ++j) t[j] = x[j] + scale * kd[j];
        }
    };

    for (std::size_t d = 0; d < dim; ++d) {
        std::copy_n(state.data() + d * kBlock, n, reg(static_cast<std::uint32_t>(d)));
    }
    evaluate_into(k1);
    load_stage(k1, half_h);
    evaluate_into(k2);
    load_stage(k2, half_h);
    evaluate_into(k3);
    load_stage(k3, h);
    evaluate_into(k4);

    for (std::size_t d = 0; d < dim; ++d) {
        float* __restrict x = state.data() + d * kBlock;
        const std::size_t o = d * kBlock;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = x[j] + sixth_h * (k1[o + j] + 2.0f * k2[o + j] + 2.0f * k3[o + j] + k4[o + j]);
        }
    }
}

}  // namespace swarm
