#pragma once

#include <map>
#include <string>

#include "tensorc/grid.hpp"
#include "tensorc/kernel.hpp"

namespace tensorc {

using ParamMap = std::map<std::string, double>;

/// Runs a kernel over the interior, OpenMP-parallel over (k, j) rows.
/// Arithmetic follows emit_c's evaluation order, so results match the
/// compiled C source bit for bit on IEEE hardware without FMA contraction.
/// Ghost zones of the outputs are left untouched.
void execute_kernel(const KernelIR& kernel, GridState& state, const ParamMap& params);

/// Single-threaded reference that resolves every name through a map at each
/// point. Kept for equivalence tests and benchmarks.
void execute_kernel_serial(const KernelIR& kernel, GridState& state, const ParamMap& params);

}  // namespace tensorc
