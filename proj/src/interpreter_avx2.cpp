// Compiled with -mavx2; only reached after a runtime CPU check.
#include "interpreter.hpp"

#define SWARM_RUN_PROGRAM run_program_avx2
#define SWARM_VEC_WIDTH 8
#include "interpreter.inc"
