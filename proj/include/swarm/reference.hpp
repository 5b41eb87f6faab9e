#pragma once

#include <span>
#include <vector>

#include "swarm/expression.hpp"
#include "swarm/system.hpp"

namespace swarm {

/// Double-precision evaluation of a system's right-hand sides through the AST
/// evaluator. This is the oracle the compiled backends are checked against.
class ReferenceSystem {
public:
    explicit ReferenceSystem(const SystemDefinition& def);

    std::size_t dimension() const { return rhs_.size(); }

    /// `params` must bind every parameter the right-hand sides use (UnboundIdentifier otherwise).
    std::vector<double> derivative(std::span<const double> point, const Bindings& params) const;

    /// Classical RK4 with signed step h.
    std::vector<double> rk4_step(std::span<const double> point, const Bindings& params, double h) const;

private:
    std::vector<std::string> names_;
    std::vector<Expr> rhs_;
};

Bindings default_parameters(const SystemDefinition& def);

std::vector<double> rk4_step_reference(const SystemDefinition& def, std::span<const double> point,
                                       const Bindings& params, double h);

}  // namespace swarm
