#include "interpreter.hpp"

#define SWARM_RUN_PROGRAM run_program
#define SWARM_VEC_WIDTH 4
#include "interpreter.inc"
