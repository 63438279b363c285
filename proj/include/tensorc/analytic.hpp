#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tensorc/grid.hpp"

namespace tensorc {

/// value(field, x, y, z, t, params); fields the solution does not know
/// are zero.
struct AnalyticSolution {
  std::string name;
  std::string description;
  std::function<double(const std::string&, double, double, double, double,
                       const std::map<std::string, double>&)>
      value;
};

/// maxwell_plane_wave, maxwell_oblique_wave, static_sine, ode_decay, rotation.
const AnalyticSolution& find_solution(const std::string& name);
std::vector<std::string> solution_names();

/// Sets every stored point (ghosts included) of the listed functions.
void fill_analytic(GridState& state, const AnalyticSolution& solution,
                   const std::vector<std::string>& fields, const std::map<std::string, double>& params);

}  // namespace tensorc
