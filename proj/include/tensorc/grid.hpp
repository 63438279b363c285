#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tensorc {

/// Uniform Cartesian grid. `n` counts interior points per axis; storage
/// adds `ghost` layers on each side and is x-fastest.
struct Grid {
  std::array<int, 3> n{1, 1, 1};
  int ghost = 1;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  int extent(int axis) const { return n[static_cast<std::size_t>(axis)] + 2 * ghost; }
  std::size_t size() const {
    return static_cast<std::size_t>(extent(0)) * static_cast<std::size_t>(extent(1)) *
           static_cast<std::size_t>(extent(2));
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(extent(0)) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(extent(1)) * static_cast<std::size_t>(k));
  }
  /// Coordinate of storage index `s` along `axis` (ghost points lie outside).
  double coord(int axis, int s) const {
    const auto a = static_cast<std::size_t>(axis);
    return origin[a] + (s - ghost) * spacing[a];
  }
  std::size_t interior_size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
  }

  /// Throws Error(Grid) unless every axis has at least one interior point,
  /// ghost >= 0 and spacing > 0.
  void validate() const;
};

class GridState {
 public:
  explicit GridState(Grid grid);

  const Grid& grid() const { return grid_; }
  double time = 0.0;

  /// Allocates a zero-filled function (no-op if it exists).
  std::vector<double>& add(const std::string& name);
  bool has(const std::string& name) const { return fields_.contains(name); }
  std::vector<double>& at(const std::string& name);
  const std::vector<double>& at(const std::string& name) const;
  const std::map<std::string, std::vector<double>>& fields() const { return fields_; }

 private:
  Grid grid_;
  std::map<std::string, std::vector<double>> fields_;
};

/// Fills every ghost layer from the wrapped interior, axis by axis, so
/// edges and corners are consistent.
void apply_periodic_bc(GridState& state, const std::string& name);

/// Centered second-order difference along direction 1..3, interior points
/// only, x-fastest.
std::vector<double> fd_derivative(const GridState& state, const std::string& name, int direction);

/// Interior values, x-fastest.
std::vector<double> interior(const GridState& state, const std::string& name);

struct Norms {
  double l2 = 0;  // root mean square
  double linf = 0;
};
Norms interior_norms(const GridState& state, const std::string& name);
Norms norms_of(const std::vector<double>& values);

}  // namespace tensorc
