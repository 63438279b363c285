#include "tensorc/analytic.hpp"

#include <cmath>
#include <numbers>

#include "tensorc/error.hpp"

namespace tensorc {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double plane_wave(const std::string& f, double x, double, double, double t, const std::map<std::string, double>&) {
  if (f == "E2" || f == "B3") return std::sin(kTwoPi * (x - t));
  return 0;
}

// k = 2pi (1, 2, 0), B = khat x E. Two polarizations: E along (2, -1, 0)/sqrt(5)
// with sin phase, and E along z with cos phase, so both E and B have
// in-plane components and a nonzero discrete divergence.
double oblique_wave(const std::string& f, double x, double y, double, double t,
                    const std::map<std::string, double>&) {
  const double kx = kTwoPi, ky = 2 * kTwoPi;
  const double kn = std::hypot(kx, ky);
  const double s = std::sin(kx * x + ky * y - kn * t);
  const double c = std::cos(kx * x + ky * y - kn * t);
  const double ax = 2 / std::sqrt(5.0), ay = -1 / std::sqrt(5.0);
  if (f == "E1") return ax * s;
  if (f == "E2") return ay * s;
  if (f == "E3") return c;
  if (f == "B1") return ky / kn * c;
  if (f == "B2") return -kx / kn * c;
  if (f == "B3") return (kx * ay - ky * ax) / kn * s;
  return 0;
}

double static_sine(const std::string&, double x, double y, double z, double, const std::map<std::string, double>&) {
  return std::sin(kTwoPi * x) * std::cos(kTwoPi * y) + 0.5 * std::sin(kTwoPi * z);
}

double ode_decay(const std::string&, double, double, double, double t, const std::map<std::string, double>&) {
  return std::exp(-t);
}

double rotation(const std::string& f, double, double, double, double t, const std::map<std::string, double>& p) {
  auto it = p.find("omega");
  const double w = it == p.end() ? 1.0 : it->second;
  if (f == "u") return std::cos(w * t);
  if (f == "v") return std::sin(w * t);
  return 0;
}

const std::vector<AnalyticSolution>& registry() {
  static const std::vector<AnalyticSolution> r = {
      {"maxwell_plane_wave", "E2 = B3 = sin(2 pi (x - t))", plane_wave},
      {"maxwell_oblique_wave", "two-polarization plane wave with k = 2 pi (1, 2, 0)", oblique_wave},
      {"static_sine", "time-independent sin(2 pi x) cos(2 pi y) + sin(2 pi z) / 2", static_sine},
      {"ode_decay", "exp(-t)", ode_decay},
      {"rotation", "u = cos(omega t), v = sin(omega t)", rotation},
  };
  return r;
}

}  // namespace

const AnalyticSolution& find_solution(const std::string& name) {
  for (const auto& s : registry()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::Param, "unknown analytic solution '" + name + "'");
}

std::vector<std::string> solution_names() {
  std::vector<std::string> out;
  for (const auto& s : registry()) out.push_back(s.name);
  return out;
}

void fill_analytic(GridState& state, const AnalyticSolution& solution,
                   const std::vector<std::string>& fields, const std::map<std::string, double>& params) {
  const Grid& g = state.grid();
  for (const auto& name : fields) {
    auto& f = state.at(name);
    for (int k = 0; k < g.extent(2); ++k) {
      for (int j = 0; j < g.extent(1); ++j) {
        for (int i = 0; i < g.extent(0); ++i) {
          f[g.index(i, j, k)] =
              solution.value(name, g.coord(0, i), g.coord(1, j), g.coord(2, k), state.time, params);
        }
      }
    }
  }
}

}  // namespace tensorc
