#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "swarm/expression.hpp"
#include "swarm/system.hpp"

namespace swarm {

/// Particle buffer organisation. RowMajor stores the N components of each particle
/// contiguously; ColumnMajor stores all P values of component 0, then component 1, ...
enum class Layout { RowMajor = 0, ColumnMajor = 1 };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

enum class Precision { Float32 };

/// OpenCL C source for one system: a generated derivative function plus the fixed
/// RK4 driver. Kernel signature:
///
///   __kernel void swarm_rk4(__global float* positions, __global const float* params,
///                           const float h, const uint offset, const uint stride)
///
/// Work item i advances particle `offset + i` by the signed step `h`. `stride` is the
/// total particle count (used by the column-major indexing). Parameters are read from
/// `params` in SystemDefinition order.
struct KernelSource {
    std::string source;
    std::string entry_point;
    Layout layout = Layout::ColumnMajor;
};

inline constexpr std::string_view kKernelEntryPoint = "swarm_rk4";

KernelSource emit_kernel_source(const SystemDefinition& def, Layout layout,
                                Precision precision = Precision::Float32);

/// Emits one right-hand side as a C expression. State variables map to `x_<name>`,
/// parameters to `p_<name>`.
std::string emit_c_expression(const Expr& expr, const SystemDefinition& def);

/// Conditional or looping constructs found in kernel source (comments ignored).
/// Empty for every source produced by emit_kernel_source.
std::vector<std::string> find_branch_constructs(std::string_view source);

}  // namespace swarm
