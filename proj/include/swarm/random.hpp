#pragma once

#include <cstdint>

#include "swarm/system.hpp"

namespace swarm {

/// Counter-based uniform variate in [0, 1), a pure function of its four keys.
/// Streams for different particles, reset epochs and components are independent, so
/// resets can be replayed in any order.
double uniform01(std::uint64_t seed, std::uint64_t particle, std::uint32_t epoch, std::uint32_t component);

/// Maps u in [0, 1) onto the half-open interval [lo, hi) in single precision. The result
/// is never below lo nor at or above hi once rounded to float.
float sample_interval(Interval range, double u);

}  // namespace swarm
