#include "swarm/random.hpp"

#include <cmath>
#include <limits>

namespace swarm {

namespace {

constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

double uniform01(std::uint64_t seed, std::uint64_t particle, std::uint32_t epoch, std::uint32_t component) {
    std::uint64_t h = mix(seed + kGolden);
    h = mix(h ^ (particle + 2 * kGolden));
    h = mix(h ^ ((static_cast<std::uint64_t>(epoch) << 32 | component) + 3 * kGolden));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

float sample_interval(Interval range, double u) {
    auto v = static_cast<float>(range.lo + (range.hi - range.lo) * u);
    if (static_cast<double>(v) < range.lo) v = std::nextafter(v, std::numeric_limits<float>::infinity());
    if (static_cast<double>(v) >= range.hi) {
        v = static_cast<float>(range.hi);
        while (static_cast<double>(v) >= range.hi) v = std::nextafter(v, -std::numeric_limits<float>::infinity());
    }
    return v;
}

}  // namespace swarm
