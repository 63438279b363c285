#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tensorc/analytic.hpp"
#include "tensorc/execute.hpp"
#include "tensorc/grid.hpp"
#include "tensorc/kernel.hpp"

namespace tensorc {

enum class IntegratorKind { Rk2, Rk4, Icn };

struct Integrator {
  IntegratorKind kind = IntegratorKind::Rk4;
  int icn_iterations = 3;
};

Integrator parse_integrator(const std::string& name, int icn_iterations = 3);
std::string to_string(IntegratorKind kind);

enum class Schedule { Initial, EveryStep };
enum class Boundary { Periodic, None };

/// Assigns non-evolved functions (or initial data): either a kernel or an
/// analytic solution sampled on the listed fields.
struct Setter {
  std::string name;
  Schedule schedule = Schedule::Initial;
  std::optional<KernelIR> kernel;
  const AnalyticSolution* analytic = nullptr;
  std::vector<std::string> fields;  // analytic setters
};

/// Diagnostic kernel; the norms of its outputs are recorded every `every`
/// steps (step 0 included).
struct Evaluator {
  std::string name;
  KernelIR kernel;
  int every = 1;
};

/// Evolved function X has its right-hand side in the grid function
/// "Xrhs", written by one of the rhs kernels.
struct EvolutionSystem {
  std::vector<std::string> evolved;
  std::vector<KernelIR> rhs;
  std::vector<Setter> setters;
  std::vector<Evaluator> evaluators;
  ParamMap parameters;
  Boundary boundary = Boundary::Periodic;

  /// Every grid function any kernel or setter touches.
  std::vector<std::string> grid_functions() const;
  /// Throws unless each evolved function has exactly one rhs output.
  void validate() const;
};

/// Allocates all grid functions of the system in `state`.
void allocate(const EvolutionSystem& system, GridState& state);

/// Fills boundaries of evolved and setter-owned functions.
void fill_boundaries(const EvolutionSystem& system, GridState& state);

/// One step of size dt. Each substage: every-step setters, boundary fill,
/// rhs kernels. `step` is only used in error messages.
void mol_step(const EvolutionSystem& system, GridState& state, const Integrator& integrator, double dt,
              int step = 0);

struct NormRecord {
  int step = 0;
  double time = 0;
  std::string name;
  double l2 = 0;
  double linf = 0;
};

struct RunHooks {
  /// Called after initial data (step 0) and after every step.
  std::function<void(int step, const GridState&)> on_step;
  /// When set, a "solution_error" record over all evolved functions is
  /// added at every output step.
  const AnalyticSolution* solution = nullptr;
  int output_every = 0;  // 0: only the final step
};

struct RunResult {
  std::vector<NormRecord> norms;
  int steps = 0;
};

/// Initial setters, then steps until t_final (the last step is shortened
/// to land on it exactly).
RunResult run(const EvolutionSystem& system, GridState& state, const Integrator& integrator, double dt,
              double t_final, const RunHooks& hooks = {});

/// Max-norm and RMS difference between the evolved functions and an
/// analytic solution at the state's time.
Norms solution_error(const EvolutionSystem& system, const GridState& state, const AnalyticSolution& solution);

}  // namespace tensorc
