#pragma once

#include <optional>
#include <string_view>

#include "swarm/system.hpp"

namespace swarm {

/// Lorenz system with the classic sigma = 10, beta = 8/3, r = 28.
SystemDefinition builtin_lorenz();

/// Two-population STN-GPe rate model. Both populations share the sigmoid
/// Z(u) = sigmoid(a (u - theta_z)); a forward and a backward group start on (0,1)^2.
SystemDefinition builtin_stn_gpe();

/// Ring of N Hodgkin-Huxley neurons (rest at 0 mV), neuron i driven by the synaptic
/// gate of neuron i-1 mod N. Throws OutOfRange for N < 1.
SystemDefinition builtin_hh_ring(int n);

/// Resolves "lorenz", "stn_gpe", "hh" (single neuron) or "hh_ring:N".
std::optional<SystemDefinition> find_builtin(std::string_view name);

}  // namespace swarm
