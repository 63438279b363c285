#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "tensorc/grid.hpp"
#include "tensorc/mol.hpp"

namespace tensorc {

/// Contents of a `key = value` parameter file.
struct RunParams {
  std::array<int, 3> n{0, 0, 0};
  int ghost = 1;
  std::array<double, 3> spacing{0, 0, 0};
  Integrator integrator;
  std::optional<double> courant;
  std::optional<double> dt;
  double t_final = 0;
  int constraint_every = 1;
  int output_every = 0;
  std::string output_dir;
  std::string solution;  // overrides the system's analytic solution
  std::map<std::string, double> system_params;

  Grid grid() const;
  /// dt if given, else courant * min spacing (courant defaults to 0.25).
  double time_step() const;
};

/// Required: nx, ny, nz, ghost, dx, integrator, courant or dt, t_final.
/// Optional: dy, dz, icn_iterations, constraint_every, output_every,
/// output_dir, solution, plus any name in `system_params`. Unknown keys
/// raise Error(Param) naming the key.
RunParams parse_params(std::string_view text, const std::set<std::string>& system_params);
RunParams load_params(const std::string& path, const std::set<std::string>& system_params);

}  // namespace tensorc
