#include "tensorc/grid.hpp"

#include <algorithm>
#include <cmath>

#include "tensorc/error.hpp"

namespace tensorc {

void Grid::validate() const {
  if (ghost < 0) throw Error(ErrorCode::Grid, "ghost width must be non-negative");
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (n[ua] < 1) {
      throw Error(ErrorCode::Grid, "axis " + std::to_string(a) + " needs at least one interior point");
    }
    if (!(spacing[ua] > 0)) throw Error(ErrorCode::Grid, "grid spacing must be positive");
  }
}

GridState::GridState(Grid grid) : grid_(grid) { grid_.validate(); }

std::vector<double>& GridState::add(const std::string& name) {
  auto it = fields_.find(name);
  if (it == fields_.end()) it = fields_.emplace(name, std::vector<double>(grid_.size(), 0.0)).first;
  return it->second;
}

std::vector<double>& GridState::at(const std::string& name) {
  auto it = fields_.find(name);
  if (it == fields_.end()) throw Error(ErrorCode::Grid, "missing grid function '" + name + "'");
  return it->second;
}

const std::vector<double>& GridState::at(const std::string& name) const {
  auto it = fields_.find(name);
  if (it == fields_.end()) throw Error(ErrorCode::Grid, "missing grid function '" + name + "'");
  return it->second;
}

void apply_periodic_bc(GridState& state, const std::string& name) {
  const Grid& g = state.grid();
  auto& f = state.at(name);
  const int gh = g.ghost;
  for (int axis = 0; axis < 3; ++axis) {
    const int n = g.n[static_cast<std::size_t>(axis)];
    int ext[3] = {g.extent(0), g.extent(1), g.extent(2)};
    int s[3];
    for (s[2] = 0; s[2] < ext[2]; ++s[2]) {
      for (s[1] = 0; s[1] < ext[1]; ++s[1]) {
        for (s[0] = 0; s[0] < ext[0]; ++s[0]) {
          const int p = s[axis];
          if (p >= gh && p < gh + n) continue;
          // Wrap modulo n, so ghost layers wider than the interior repeat it.
          const int src = gh + ((p - gh) % n + n) % n;
          int t[3] = {s[0], s[1], s[2]};
          t[axis] = src;
          f[g.index(s[0], s[1], s[2])] = f[g.index(t[0], t[1], t[2])];
        }
      }
    }
  }
}

std::vector<double> fd_derivative(const GridState& state, const std::string& name, int direction) {
  if (direction < 1 || direction > 3) {
    throw Error(ErrorCode::Grid, "derivative direction " + std::to_string(direction) + " out of range 1..3");
  }
  const Grid& g = state.grid();
  if (g.ghost < 1) throw Error(ErrorCode::Grid, "centered differences need a ghost width of at least 1");
  const auto& f = state.at(name);
  const int axis = direction - 1;
  const double hdxi = 0.5 * (1 / g.spacing[static_cast<std::size_t>(axis)]);
  int off[3] = {0, 0, 0};
  off[axis] = 1;
  std::vector<double> out;
  out.reserve(g.interior_size());
  for (int k = g.ghost; k < g.ghost + g.n[2]; ++k) {
    for (int j = g.ghost; j < g.ghost + g.n[1]; ++j) {
      for (int i = g.ghost; i < g.ghost + g.n[0]; ++i) {
        out.push_back((f[g.index(i + off[0], j + off[1], k + off[2])] -
                       f[g.index(i - off[0], j - off[1], k - off[2])]) *
                      hdxi);
      }
    }
  }
  return out;
}

std::vector<double> interior(const GridState& state, const std::string& name) {
  const Grid& g = state.grid();
  const auto& f = state.at(name);
  std::vector<double> out;
  out.reserve(g.interior_size());
  for (int k = g.ghost; k < g.ghost + g.n[2]; ++k) {
    for (int j = g.ghost; j < g.ghost + g.n[1]; ++j) {
      for (int i = g.ghost; i < g.ghost + g.n[0]; ++i) out.push_back(f[g.index(i, j, k)]);
    }
  }
  return out;
}

Norms norms_of(const std::vector<double>& values) {
  Norms out;
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) {
    sum += v * v;
    out.linf = std::max(out.linf, std::abs(v));
  }
  out.l2 = std::sqrt(sum / static_cast<double>(values.size()));
  return out;
}

Norms interior_norms(const GridState& state, const std::string& name) {
  return norms_of(interior(state, name));
}

}  // namespace tensorc
