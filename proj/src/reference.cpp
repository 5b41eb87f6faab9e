#include "swarm/reference.hpp"

#include "swarm/error.hpp"

namespace swarm {

ReferenceSystem::ReferenceSystem(const SystemDefinition& def) {
    for (const auto& v : def.state_variables) {
        names_.push_back(v.name);
        rhs_.push_back(parse(v.rhs));
    }
}

std::vector<double> ReferenceSystem::derivative(std::span<const double> point, const Bindings& params) const {
    if (point.size() != rhs_.size()) throw Error("point dimension does not match the system");
    Bindings b = params;
    for (std::size_t i = 0; i < names_.size(); ++i) b.insert_or_assign(names_[i], point[i]);
    std::vector<double> out(rhs_.size());
    for (std::size_t i = 0; i < rhs_.size(); ++i) out[i] = eval(rhs_[i], b);
    return out;
}

std::vector<double> ReferenceSystem::rk4_step(std::span<const double> x, const Bindings& params, double h) const {
    const std::size_t n = x.size();
    std::vector<double> t(n);
    const auto k1 = derivative(x, params);
    for (std::size_t i = 0; i < n; ++i) t[i] = x[i] + h / 2 * k1[i];
    const auto k2 = derivative(t, params);
    for (std::size_t i = 0; i < n; ++i) t[i] = x[i] + h / 2 * k2[i];
    const auto k3 = derivative(t, params);
    for (std::size_t i = 0; i < n; ++i) t[i] = x[i] + h * k3[i];
    const auto k4 = derivative(t, params);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

Bindings default_parameters(const SystemDefinition& def) {
    Bindings b;
    for (const auto& p : def.parameters) b.emplace(p.name, p.default_value);
    return b;
}

std::vector<double> rk4_step_reference(const SystemDefinition& def, std::span<const double> point,
                                       const Bindings& params, double h) {
    return ReferenceSystem(def).rk4_step(point, params, h);
}

}  // namespace swarm
