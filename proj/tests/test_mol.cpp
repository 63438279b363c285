#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tensorc/driver.hpp"
#include "tensorc/error.hpp"
#include "tensorc/grid.hpp"
#include "tensorc/mol.hpp"
#include "tensorc/system.hpp"

using namespace tensorc;

namespace {

ScalarExpr monomial(const Rational& c, std::vector<std::pair<std::string, int>> powers) {
  ScalarExpr e;
  e.add(Monomial{c, std::move(powers)});
  e.finalize();
  return e;
}

Grid grid_of(int nx, int ny, int nz, int ghost, double h) {
  Grid g;
  g.n = {nx, ny, nz};
  g.ghost = ghost;
  g.spacing = {h, h, h};
  return g;
}

// y' = -y on a single point.
EvolutionSystem decay() {
  EvolutionSystem s;
  s.evolved = {"y"};
  s.rhs.push_back(build_kernel("rhs", {{"yrhs", "yrhs", monomial(-1, {{"y", 1}})}}, {"y", "yrhs"}, {}));
  s.boundary = Boundary::None;
  return s;
}

double decay_value(const EvolutionSystem& sys, const Integrator& in, double dt, int steps) {
  GridState st(grid_of(1, 1, 1, 0, 1.0));
  allocate(sys, st);
  st.at("y")[0] = 1.0;
  for (int k = 1; k <= steps; ++k) mol_step(sys, st, in, dt, k);
  return st.at("y")[0];
}

double decay_error(IntegratorKind kind, double dt, double t_final) {
  const int steps = static_cast<int>(std::lround(t_final / dt));
  return std::abs(decay_value(decay(), {kind, 3}, dt, steps) - std::exp(-t_final));
}

void fill_interior(GridState& s, const std::string& name, const std::function<double(int, int, int)>& f) {
  const Grid& g = s.grid();
  auto& v = s.add(name);
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) v[g.index(i + g.ghost, j + g.ghost, k + g.ghost)] = f(i, j, k);
}

}  // namespace

TEST_CASE("periodic ghost fill wraps the interior") {
  GridState s(grid_of(4, 1, 1, 1, 1.0));
  fill_interior(s, "u", [](int i, int, int) { return 10.0 + i; });
  apply_periodic_bc(s, "u");
  const Grid& g = s.grid();
  std::vector<double> row;
  for (int i = 0; i < g.extent(0); ++i) row.push_back(s.at("u")[g.index(i, 1, 1)]);
  CHECK(row == std::vector<double>{13, 10, 11, 12, 13, 10});
  // Corners are consistent too.
  CHECK(s.at("u")[g.index(0, 0, 0)] == 13);
  const auto once = s.at("u");
  apply_periodic_bc(s, "u");
  CHECK(s.at("u") == once);

  GridState c(grid_of(5, 4, 3, 2, 1.0));
  std::fill(c.add("k").begin(), c.add("k").end(), 0.0);
  fill_interior(c, "k", [](int, int, int) { return 2.5; });
  apply_periodic_bc(c, "k");
  for (double v : c.at("k")) CHECK(v == 2.5);

  // Ghost layers wider than the interior repeat it.
  GridState wide(grid_of(2, 1, 1, 3, 1.0));
  fill_interior(wide, "u", [](int i, int, int) { return i == 0 ? 1.0 : 2.0; });
  apply_periodic_bc(wide, "u");
  const Grid& gw = wide.grid();
  std::vector<double> wrow;
  for (int i = 0; i < gw.extent(0); ++i) wrow.push_back(wide.at("u")[gw.index(i, 3, 3)]);
  CHECK(wrow == std::vector<double>{2, 1, 2, 1, 2, 1, 2, 1});
}

TEST_CASE("finite differences") {
  GridState s(grid_of(16, 2, 2, 1, 0.0625));
  const Grid& g = s.grid();
  fill_interior(s, "lin", [&](int i, int, int) { return g.coord(0, i + g.ghost); });
  auto& lin = s.at("lin");
  for (int k = 0; k < g.extent(2); ++k)
    for (int j = 0; j < g.extent(1); ++j)
      for (int i = 0; i < g.extent(0); ++i) lin[g.index(i, j, k)] = g.coord(0, i);
  for (double v : fd_derivative(s, "lin", 1)) CHECK(v == 1.0);
  fill_interior(s, "c", [](int, int, int) { return 3.0; });
  apply_periodic_bc(s, "c");
  for (int d = 1; d <= 3; ++d)
    for (double v : fd_derivative(s, "c", d)) CHECK(v == 0.0);
  CHECK_THROWS_AS(fd_derivative(s, "c", 0), Error);

  auto error_at = [](int n) {
    GridState w(grid_of(n, 1, 1, 1, 1.0 / n));
    const Grid& gw = w.grid();
    fill_interior(w, "f", [&](int i, int, int) { return std::sin(2 * M_PI * gw.coord(0, i + 1)); });
    apply_periodic_bc(w, "f");
    const auto d = fd_derivative(w, "f", 1);
    double worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(d[static_cast<std::size_t>(i)] - 2 * M_PI * std::cos(2 * M_PI * gw.coord(0, i + 1))));
    return worst;
  };
  const double ratio = error_at(32) / error_at(64);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("norms are taken over the interior") {
  GridState s(grid_of(2, 1, 1, 1, 1.0));
  auto& v = s.add("u");
  std::fill(v.begin(), v.end(), 100.0);
  fill_interior(s, "u", [](int i, int, int) { return i == 0 ? 3.0 : -4.0; });
  const Norms n = interior_norms(s, "u");
  CHECK(n.linf == 4.0);
  CHECK(n.l2 == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("single RK4 step on the decay equation") {
  const double y1 = decay_value(decay(), {IntegratorKind::Rk4, 3}, 0.1, 1);
  CHECK(std::abs(y1 - 0.9048374180359595) < 1e-7);
}

TEST_CASE("RK2 local error is third order") {
  const double e1 = std::abs(decay_value(decay(), {IntegratorKind::Rk2, 3}, 0.1, 1) - std::exp(-0.1));
  const double e2 = std::abs(decay_value(decay(), {IntegratorKind::Rk2, 3}, 0.05, 1) - std::exp(-0.05));
  const double ratio = e1 / e2;
  CHECK(ratio >= 6.0);
  CHECK(ratio <= 10.0);
}

TEST_CASE("global convergence orders") {
  const double rk4 = decay_error(IntegratorKind::Rk4, 0.1, 1.0) / decay_error(IntegratorKind::Rk4, 0.05, 1.0);
  CHECK(rk4 >= 12.0);
  CHECK(rk4 <= 20.0);
  const double rk2 = decay_error(IntegratorKind::Rk2, 0.1, 1.0) / decay_error(IntegratorKind::Rk2, 0.05, 1.0);
  CHECK(rk2 >= 3.5);
  CHECK(rk2 <= 4.5);
  const double icn = decay_error(IntegratorKind::Icn, 0.1, 1.0) / decay_error(IntegratorKind::Icn, 0.05, 1.0);
  CHECK(icn >= 3.0);
  CHECK(icn <= 5.0);
}

TEST_CASE("zero right-hand side leaves the state unchanged") {
  EvolutionSystem sys;
  sys.evolved = {"u"};
  sys.rhs.push_back(build_kernel("rhs", {{"urhs", "urhs", ScalarExpr{}}}, {"u", "urhs"}, {}));
  for (auto kind : {IntegratorKind::Rk2, IntegratorKind::Rk4, IntegratorKind::Icn}) {
    GridState s(grid_of(5, 4, 3, 1, 0.1));
    allocate(sys, s);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1, 1);
    fill_interior(s, "u", [&](int, int, int) { return d(rng); });
    apply_periodic_bc(s, "u");
    const auto before = s.at("u");
    for (int k = 1; k <= 3; ++k) mol_step(sys, s, {kind, 3}, 0.01, k);
    CHECK(s.at("u") == before);
  }
}

TEST_CASE("evaluator cadence and degenerate systems") {
  EvolutionSystem sys = decay();
  sys.evaluators.push_back({"twice", build_kernel("twice", {{"q", "q", monomial(2, {{"y", 1}})}}, {"y", "q"}, {}), 5});
  GridState s(grid_of(1, 1, 1, 0, 1.0));
  allocate(sys, s);
  s.at("y")[0] = 1;
  const RunResult r = run(sys, s, {IntegratorKind::Rk4, 3}, 0.05, 1.0);
  CHECK(r.steps == 20);
  int count = 0;
  for (const auto& n : r.norms) count += n.name == "q" ? 1 : 0;
  CHECK(count == 5);
  CHECK(r.norms.front().step == 0);
  CHECK(r.norms.front().linf == 2.0);

  EvolutionSystem none;
  none.boundary = Boundary::None;
  none.evaluators.push_back({"one", build_kernel("one", {{"q", "q", monomial(1, {})}}, {"q"}, {}), 1});
  GridState z(grid_of(2, 2, 2, 0, 1.0));
  const RunResult rz = run(none, z, {IntegratorKind::Rk4, 3}, 0.25, 1.0);
  CHECK(rz.steps == 4);
  CHECK(rz.norms.size() == 5);
  CHECK(rz.norms.back().linf == 1.0);
}

TEST_CASE("the last step lands on t_final") {
  EvolutionSystem sys = decay();
  GridState s(grid_of(1, 1, 1, 0, 1.0));
  allocate(sys, s);
  s.at("y")[0] = 1;
  const RunResult r = run(sys, s, {IntegratorKind::Rk4, 3}, 0.3, 1.0);
  CHECK(r.steps == 4);
  CHECK(s.time == 1.0);
  CHECK(std::abs(s.at("y")[0] - std::exp(-1.0)) < 1e-4);
}

TEST_CASE("ICN keeps the rotation bounded") {
  const auto def = load_system(std::string(TENSORC_SYSTEMS) + "/rotation.tsys");
  const auto params = load_params(std::string(TENSORC_SYSTEMS) + "/rotation.params", def.param_names());
  const RunOutcome out = run_system(def, params);
  CHECK(out.result.steps == 1000);
  double worst = 0;
  for (const auto& n : out.result.norms) {
    if (n.name == "solution_error") continue;
    worst = std::max(worst, n.linf);
  }
  const double u = interior(out.state, "u")[0], v = interior(out.state, "v")[0];
  CHECK(std::isfinite(u));
  CHECK(std::sqrt(u * u + v * v) <= 1.0 + 1e-12);
  CHECK(std::sqrt(u * u + v * v) > 0.5);
}

TEST_CASE("evolution commutes with translation") {
  const auto def = load_system(std::string(TENSORC_SYSTEMS) + "/maxwell.tsys");
  const CompiledSystem c = compile_system(def);
  RunParams p = load_params(std::string(TENSORC_SYSTEMS) + "/maxwell.params", def.param_names());
  EvolutionSystem sys = make_evolution_system(def, c, p);
  sys.setters.clear();
  sys.evaluators.clear();
  const Grid g = grid_of(8, 6, 4, 1, 0.125);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  std::map<std::string, std::vector<double>> data;
  for (const auto& e : sys.evolved) {
    std::vector<double> v(g.interior_size());
    for (double& x : v) x = d(rng);
    data[e] = v;
  }
  auto load = [&](GridState& s, int shift) {
    allocate(sys, s);
    for (const auto& e : sys.evolved) {
      fill_interior(s, e, [&](int i, int j, int k) {
        const int src = (i - shift + g.n[0]) % g.n[0];
        return data[e][static_cast<std::size_t>(src + g.n[0] * (j + g.n[1] * k))];
      });
    }
    fill_boundaries(sys, s);
  };
  GridState a(g), b(g);
  load(a, 0);
  load(b, 1);
  for (int k = 1; k <= 5; ++k) {
    mol_step(sys, a, {IntegratorKind::Rk4, 3}, 0.03, k);
    mol_step(sys, b, {IntegratorKind::Rk4, 3}, 0.03, k);
  }
  double worst = 0;
  for (const auto& e : sys.evolved) {
    const auto ia = interior(a, e), ib = interior(b, e);
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          const auto at = [&](int x) { return static_cast<std::size_t>(x + g.n[0] * (j + g.n[1] * k)); };
          worst = std::max(worst, std::abs(ib[at((i + 1) % g.n[0])] - ia[at(i)]));
        }
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("non-finite values abort the run") {
  EvolutionSystem sys = decay();
  GridState s(grid_of(1, 1, 1, 0, 1.0));
  allocate(sys, s);
  s.at("y")[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    mol_step(sys, s, {IntegratorKind::Rk4, 3}, 0.1, 7);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Numeric);
    const std::string msg = e.what();
    CHECK(msg.find("'y'") != std::string::npos);
    CHECK(msg.find("step 7") != std::string::npos);
  }
}

TEST_CASE("parameter files") {
  const std::set<std::string> sys{"omega"};
  const RunParams p = parse_params("nx = 4\nny = 2\nnz = 1\nghost = 1\ndx = 0.5\nintegrator = icn\n"
                                   "icn_iterations = 4\ncourant = 0.5\nt_final = 2\nomega = 3\n",
                                   sys);
  CHECK(p.grid().spacing[2] == 0.5);
  CHECK(p.time_step() == 0.25);
  CHECK(p.integrator.kind == IntegratorKind::Icn);
  CHECK(p.integrator.icn_iterations == 4);
  CHECK(p.system_params.at("omega") == 3);
  try {
    (void)parse_params("nx = 4\nresolution = 8\n", sys);
    FAIL("expected a parameter error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Param);
    CHECK(std::string(e.what()).find("resolution") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_params("nx = 4\n", sys), Error);
  CHECK_THROWS_AS(parse_integrator("euler"), Error);
}
