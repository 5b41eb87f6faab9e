#pragma once

#include "swarm/program.hpp"

namespace swarm::detail {

/// Executes the program once over all BlockIntegrator::kBlock lanes of `registers`.
void run_program(const Program& program, float* registers);

#if SWARM_HAVE_AVX2_INTERPRETER
/// Same, built for AVX2; callers check the CPU first.
void run_program_avx2(const Program& program, float* registers);
#endif

}  // namespace swarm::detail
