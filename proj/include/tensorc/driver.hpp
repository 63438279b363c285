#pragma once

#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tensorc/kernel.hpp"
#include "tensorc/mol.hpp"
#include "tensorc/params.hpp"
#include "tensorc/system.hpp"

namespace tensorc {

/// Component equations and kernels of a system definition.
struct CompiledSystem {
  std::vector<std::string> evolved;  // component names in definition order
  std::vector<ComponentEquation> rhs;
  std::vector<ComponentEquation> constraints;
  std::optional<KernelIR> rhs_kernel;
  std::optional<KernelIR> constraint_kernel;
  std::vector<KernelIR> setter_kernels;  // one per equation setter, in order
  std::set<std::string> grid_functions;
  std::set<std::string> parameters;

  std::vector<const KernelIR*> kernels() const;
};

CompiledSystem compile_system(const SystemDefinition& system);

/// Replaces every kernel by `<dir>/<kernel name>.ir.json`.
void load_kernels(CompiledSystem& compiled, const std::string& dir);

EvolutionSystem make_evolution_system(const SystemDefinition& system, const CompiledSystem& compiled,
                                      const RunParams& params);

struct RunOutcome {
  RunResult result;
  GridState state;
  EvolutionSystem system;
};

/// Full run from a parameter set; `ir_dir` loads kernels written by
/// generate instead of compiling in process.
RunOutcome run_system(const SystemDefinition& system, const RunParams& params, const std::string& ir_dir = {});

/// `<x>[<tag>]: <expr> = 0` for every projection of every equation.
void cmd_decompose(const SystemDefinition& system, std::ostream& out);
void cmd_expand(const SystemDefinition& system, std::ostream& out);
/// Returns the written paths, in write order.
std::vector<std::string> cmd_generate(const SystemDefinition& system, const std::string& out_dir);

void write_norms_csv(const std::vector<NormRecord>& norms, std::ostream& out);
/// Header of three little-endian u32 interior extents, then the interior
/// values as doubles, x fastest.
void write_snapshot(const GridState& state, const std::string& name, const std::string& path);

/// CSV to `<out_dir>/<name>_norms.csv` plus final snapshots of the evolved
/// functions, or CSV to `out` when out_dir is empty.
void cmd_run(const SystemDefinition& system, const RunParams& params, const std::string& out_dir,
             const std::string& ir_dir, std::ostream& out);

struct ConvergenceRow {
  int resolution = 0;
  double error = 0;   // max-norm solution error at t_final
  std::string order;  // "-" for the first row, "exact" when both errors vanish
};

/// Scales every axis that has the base nx points, and the spacing with it.
RunParams scale_params(const RunParams& base, int resolution);

std::vector<ConvergenceRow> converge(const SystemDefinition& system, const RunParams& params,
                                     const std::vector<int>& resolutions);
void cmd_converge(const SystemDefinition& system, const RunParams& params, const std::vector<int>& resolutions,
                  std::ostream& out);

}  // namespace tensorc
