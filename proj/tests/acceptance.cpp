// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tensorc/canonicalize.hpp"
#include "tensorc/components.hpp"
#include "tensorc/driver.hpp"
#include "tensorc/kernel.hpp"
#include "tensorc/parser.hpp"
#include "tensorc/rewrite.hpp"
#include "tensorc/system.hpp"

using namespace tensorc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kExpansionTol = 1e-12;
constexpr double kExpansionSeconds = 10.0;
constexpr int kRandomEquations = 200;
constexpr int kMaxRewritePasses = 5;
constexpr double kRecombineTol = 1e-12;
constexpr double kMaxwellRatioLo = 3.5, kMaxwellRatioHi = 4.5;
constexpr double kDivOrder = 2.0, kDivOrderTol = 0.3;
constexpr double kMaxwellSeconds = 60.0;
constexpr double kRk4Lo = 12.0, kRk4Hi = 20.0;
constexpr double kRk2Lo = 3.5, kRk2Hi = 4.5;
constexpr int kIcnSteps = 1000;

const std::string kSystems = TENSORC_SYSTEMS;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Verdict expansion_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  SymbolTable t;
  oracle::Generator::declare(t);
  oracle::Generator gen(20240601);
  oracle::Values values(7);
  const oracle::Model m = oracle::Generator::model(values);
  double worst = 0;
  int components = 0;
  for (int k = 0; k < kRandomEquations; ++k) {
    const auto eq = gen.next();
    worst = std::max(worst, oracle::check_expansion(eq.lhs, eq.rhs, t, m, &components));
  }
  const double secs = seconds_since(t0);
  return {worst <= kExpansionTol && secs < kExpansionSeconds,
          std::to_string(kRandomEquations) + " equations, " + std::to_string(components) +
              " components, worst mismatch " + num(worst) + ", " + num(secs) + " s"};
}

Verdict ordering() {
  SymbolTable t;
  declare_from_text("E[spatial, spatial] sym(1,2) spatial", t);
  declare_from_text("B[spatial, spatial] spatial", t);
  std::string list;
  for (const auto& c : independent_components(t.at("E"), t)) {
    if (!list.empty()) list += " ";
    for (int v : c) list += std::to_string(v);
  }
  const std::string e11 = component_name(t.at("E"), {1, 1}, t).name;
  const std::string d1b12 = derivative_name(1, component_name(t.at("B"), {1, 2}, t).name);
  return {list == "11 21 22 31 32 33" && e11 == "E11" && d1b12 == "D1B12",
          "components {" + list + "}, names " + e11 + " " + d1b12};
}

Verdict rewrite_fixtures() {
  SymbolTable t;
  for (const char* l : {"g[spacetime, spacetime] sym(1,2)", "h[spacetime, spacetime] sym(1,2) spatial",
                        "n[spacetime] timelike", "v[spacetime] spatial"}) {
    declare_from_text(l, t);
  }
  RuleSet r;
  r.append(projection_rules(t, "v", "h", "n"));
  r.append(projection_rules(t, "h", "h", "n"));
  r.add(metric_split_rule(t, "g", "h", "n"));
  r.add(normalization_rule(t, "n"));
  const auto gnn = apply_rules_traced(parse_expression("g[l_a, l_b] * n[u_a] * n[u_b]", t), r, t);
  const auto hv = apply_rules_traced(parse_expression("h[u_a, l_b] * v[u_b]", t), r, t);
  const Expr want_v = canonicalize(parse_expression("v[u_a]", t), t);
  const bool ok = gnn.expr == Expr::constant(-1) && hv.expr == want_v && gnn.passes <= kMaxRewritePasses &&
                  hv.passes <= kMaxRewritePasses;
  return {ok, "g n n -> " + to_string(gnn.expr) + " in " + std::to_string(gnn.passes) + " passes, h v -> " +
                  to_string(hv.expr) + " in " + std::to_string(hv.passes) + " passes"};
}

Verdict decomposition() {
  SymbolTable t;
  for (const char* l : {"h[spacetime, spacetime] sym(1,2) spatial", "n[spacetime] timelike", "s",
                        "S[spacetime]", "T[spacetime, spacetime]"}) {
    declare_from_text(l, t);
  }
  const RuleSet none;
  const auto p0 = decompose(parse_expression("s", t), "n", "h", none, t);
  const auto p1 = decompose(parse_expression("S[u_a]", t), "n", "h", none, t);
  const auto p2 = decompose(parse_expression("T[u_a, u_b]", t), "n", "h", none, t);
  const auto p2l = decompose(parse_expression("T[l_a, l_b]", t), "n", "h", none, t);
  bool counts = p0.size() == 1 && p1.size() == 2 && p2.size() == 4 && p2l.size() == 4;
  if (!counts) return {false, "projection counts " + std::to_string(p0.size()) + "/" + std::to_string(p1.size()) + "/" +
                                  std::to_string(p2.size())};

  oracle::Values values(13);
  oracle::Model m;
  for (char c : std::string("abcdefgh")) m.label_range[std::string(1, c)] = {0, 3};
  m.values = &values;
  const oracle::Split split;
  split.install(m);
  double worst = 0;
  // s = s; S^a = P_t^a - n^a P_n; T^ab = P_tt - n^a P_nt - n^b P_tn + n^a n^b P_nn
  // (and the same with n_a for lower indices).
  worst = std::max(worst, oracle::mismatch(oracle::eval(p0[0].expr, {}, m), values.get("s")));
  for (int a = 0; a <= 3; ++a) {
    const double got = oracle::eval(p1[1].expr, {{"a", a}}, m) - split.n_up(a) * oracle::eval(p1[0].expr, {}, m);
    worst = std::max(worst, oracle::mismatch(got, values.get("S" + std::to_string(a))));
  }
  for (const auto* p : {&p2, &p2l}) {
    const Variance v = p == &p2 ? Variance::Up : Variance::Down;
    for (int a = 0; a <= 3; ++a) {
      for (int b = 0; b <= 3; ++b) {
        const double tt = oracle::eval((*p)[3].expr, {{"a", a}, {"b", b}}, m);
        const double nt = oracle::eval((*p)[2].expr, {{"b", b}}, m);
        const double tn = oracle::eval((*p)[1].expr, {{"a", a}}, m);
        const double nn = oracle::eval((*p)[0].expr, {}, m);
        const double got = tt - split.n(a, v) * nt - split.n(b, v) * tn + split.n(a, v) * split.n(b, v) * nn;
        worst = std::max(worst, oracle::mismatch(got, values.get("T" + std::to_string(a) + std::to_string(b))));
      }
    }
  }
  return {worst <= kRecombineTol, "counts 1/2/4, recombination mismatch " + num(worst)};
}

Verdict codegen() {
  const char* sections[] = {"/* Initialize finite differencing variables */", "/* Loop over the grid points */",
                            "/* Assign local copies of grid functions */", "/* Precompute derivatives */",
                            "/* Calculate grid functions */", "/* Copy local copies back to grid functions */"};
  int kernels = 0;
  std::string problem;
  for (const char* sys_file : {"maxwell.tsys", "weyl_frame.tsys"}) {
    const auto def = load_system(kSystems + "/" + sys_file);
    const CompiledSystem c = compile_system(def);
    for (const KernelIR* k : c.kernels()) {
      ++kernels;
      const std::string src = emit_c(*k, k->name);
      std::size_t pos = 0;
      for (const char* s : sections) {
        const auto at = src.find(s, pos);
        if (at == std::string::npos) problem += k->name + " misses or misorders '" + s + "'; ";
        else pos = at;
      }
      const auto dxi = src.find("\n  dxi = 1 / dx;\n"), hdxi = src.find("\n  hdxi = 0.5 * dxi;\n");
      if (dxi == std::string::npos || hdxi == std::string::npos || hdxi < dxi) {
        problem += k->name + " lacks the dxi/hdxi lines; ";
      }
      if (emit_c(*k, k->name) != src) problem += k->name + " is not deterministic; ";
    }
    // Whole-directory regeneration is byte-identical.
    const fs::path a = fs::path(TENSORC_SCRATCH) / "acceptance" / "gen_a", b = fs::path(TENSORC_SCRATCH) / "acceptance" / "gen_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const auto wa = cmd_generate(def, a.string());
    const auto wb = cmd_generate(def, b.string());
    for (std::size_t i = 0; i < wa.size(); ++i) {
      std::ifstream fa(wa[i], std::ios::binary), fb(wb.at(i), std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str() != sb.str()) problem += wa[i] + " differs between runs; ";
    }
  }
  return {problem.empty(), problem.empty() ? std::to_string(kernels) + " kernels checked" : problem};
}

double final_record(const RunResult& r, const std::string& name, bool l2) {
  double v = std::nan("");
  for (const auto& n : r.norms) {
    if (n.name == name) v = l2 ? n.l2 : n.linf;
  }
  return v;
}

Verdict maxwell() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto def = load_system(kSystems + "/maxwell.tsys");
  const RunParams plane = load_params(kSystems + "/maxwell.params", def.param_names());
  const double e32 = final_record(run_system(def, scale_params(plane, 32)).result, "solution_error", false);
  const double e64 = final_record(run_system(def, scale_params(plane, 64)).result, "solution_error", false);
  const double ratio = e32 / e64;

  // The plane wave is divergence free on the grid, so the divergence order
  // is measured on the oblique wave, whose discrete divergence is not.
  RunParams oblique = load_params(kSystems + "/maxwell_oblique.params", def.param_names());
  oblique.constraint_every = 1;
  const RunResult o32 = run_system(def, scale_params(oblique, 32)).result;
  const RunResult o64 = run_system(def, scale_params(oblique, 64)).result;
  const double order_e = std::log2(final_record(o32, "divE", true) / final_record(o64, "divE", true));
  const double order_b = std::log2(final_record(o32, "divB", true) / final_record(o64, "divB", true));
  const double secs = seconds_since(t0);
  const bool ok = ratio >= kMaxwellRatioLo && ratio <= kMaxwellRatioHi && std::abs(order_e - kDivOrder) <= kDivOrderTol &&
                  std::abs(order_b - kDivOrder) <= kDivOrderTol && secs < kMaxwellSeconds;
  return {ok, "Linf error ratio N=32/64 " + num(ratio) + ", div E order " + num(order_e) + ", div B order " +
                  num(order_b) + ", " + num(secs) + " s"};
}

Verdict integrators() {
  const auto def = load_system(kSystems + "/decay.tsys");
  RunParams p = load_params(kSystems + "/decay.params", def.param_names());
  auto error_with = [&](IntegratorKind kind, double dt) {
    RunParams q = p;
    q.integrator.kind = kind;
    q.dt = dt;
    return final_record(run_system(def, q).result, "solution_error", false);
  };
  const double rk4 = error_with(IntegratorKind::Rk4, 0.1) / error_with(IntegratorKind::Rk4, 0.05);
  const double rk2 = error_with(IntegratorKind::Rk2, 0.1) / error_with(IntegratorKind::Rk2, 0.05);

  // ICN(3) on the rotation u' = -omega v, v' = omega u.
  const auto rot = load_system(kSystems + "/rotation.tsys");
  const RunParams rp = load_params(kSystems + "/rotation.params", rot.param_names());
  const CompiledSystem c = compile_system(rot);
  const EvolutionSystem es = make_evolution_system(rot, c, rp);
  GridState state(rp.grid());
  double peak = 0, initial = -1;
  bool finite = true;
  RunHooks hooks;
  hooks.on_step = [&](int, const GridState& s) {
    const double u = interior(s, "u")[0], v = interior(s, "v")[0];
    const double amp = std::sqrt(u * u + v * v);
    if (initial < 0) initial = amp;
    finite = finite && std::isfinite(amp);
    peak = std::max(peak, amp);
  };
  const RunResult r = run(es, state, rp.integrator, rp.time_step(), rp.t_final, hooks);
  const bool icn_ok = rp.integrator.kind == IntegratorKind::Icn && rp.integrator.icn_iterations == 3 &&
                      r.steps == kIcnSteps && finite && peak <= initial * (1 + 1e-12);
  const bool ok = rk4 >= kRk4Lo && rk4 <= kRk4Hi && rk2 >= kRk2Lo && rk2 <= kRk2Hi && icn_ok;
  return {ok, "RK4 ratio " + num(rk4) + ", RK2 ratio " + num(rk2) + ", ICN(3) " + std::to_string(r.steps) +
                  " steps, peak amplitude " + num(peak) + " from " + num(initial)};
}

// Term multiset of a printed sum: "2*a*b - c" -> {"+2*a*b", "-1*c"} with
// factors sorted.
std::vector<std::string> terms_of(const std::string& sum) {
  std::vector<std::string> out;
  std::string cur;
  char sign = '+';
  int depth = 0;
  auto flush = [&] {
    std::string t;
    for (char ch : cur) {
      if (ch != ' ') t += ch;
    }
    if (t.empty()) return;
    std::vector<std::string> factors;
    std::string coeff = "1";
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, '*')) {
      if (!f.empty() && std::isdigit(static_cast<unsigned char>(f[0]))) coeff = f;
      else factors.push_back(f);
    }
    std::sort(factors.begin(), factors.end());
    std::string key = std::string(1, sign) + coeff;
    for (const auto& x : factors) key += "*" + x;
    out.push_back(key);
  };
  for (char ch : sum) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && (ch == '+' || ch == '-')) {
      flush();
      cur.clear();
      sign = ch;
      continue;
    }
    cur += ch;
  }
  flush();
  return out;
}

// Golden names to ours: El -> E, gamma -> Gamma, "XL" locals and
// "Dd(X,i,j,k)" accesses to plain component and derivative names.
std::string rename_golden(std::string s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == 'D' && i + 2 < s.size() && s[i + 2] == '(') {
      const auto comma = s.find(',', i);
      const auto close = s.find(')', i);
      out += s.substr(i, 2) + s.substr(i + 3, comma - i - 3);
      i = close + 1;
      continue;
    }
    out += s[i++];
  }
  std::string r;
  std::stringstream ss(out);
  std::string tok;
  // Strip the trailing L of every identifier.
  for (std::size_t i = 0; i < out.size();) {
    if (std::isalpha(static_cast<unsigned char>(out[i]))) {
      std::size_t j = i;
      while (j < out.size() && std::isalnum(static_cast<unsigned char>(out[j]))) ++j;
      std::string id = out.substr(i, j - i);
      if (id.size() > 1 && id.back() == 'L') id.pop_back();
      if (id.rfind("El", 0) == 0) id = "E" + id.substr(2);
      if (id.rfind("D", 0) == 0 && id.size() > 3 && id.substr(2, 2) == "El") id = id.substr(0, 2) + "E" + id.substr(4);
      if (id.rfind("gamma", 0) == 0) id = "Gamma" + id.substr(5);
      r += id;
      i = j;
    } else {
      r += out[i++];
    }
  }
  return r;
}

Verdict weyl_golden() {
  // Reference B11rhsL terms; the reference elides the rest of the sum.
  const std::string golden =
      "2*B11L*chi11L + 2*B31L*chi13L + B21L*chi21L - B22L*chi22L - B32L*chi23L + B31L*chi31L - B32L*chi32L + "
      "B11L*chi33L + B22L*chi33L - El21L*gamma131L - El32L*gamma221L + 2*El11L*gamma231L + El22L*gamma231L - "
      "El11L*gamma321L + El22L*gamma321L + El32L*gamma331L + El31L*gamma332L - 2*B11L*trKL - e31L*D1(El21,i,j,k) + "
      "e21L*D1(El31,i,j,k) - e32L*D2(El21,i,j,k) + e22L*D2(El31,i,j,k) - e33L*D3(El21,i,j,k)";
  const auto def = load_system(kSystems + "/weyl_frame.tsys");
  const fs::path dir = fs::path(TENSORC_SCRATCH) / "acceptance" / "weyl";
  fs::remove_all(dir);
  std::string source;
  for (const auto& path : cmd_generate(def, dir.string())) {
    if (path.size() > 6 && path.substr(path.size() - 6) == "_rhs.c") {
      std::ifstream in(path);
      std::stringstream ss;
      ss << in.rdbuf();
      source = ss.str();
    }
  }
  const std::string marker = "B11rhsL = ";
  auto at = source.find("        " + marker);
  if (at == std::string::npos) return {false, "no B11rhsL assignment in the rhs kernel"};
  at = source.find(marker, at) + marker.size();
  const std::string ours = rename_golden(source.substr(at, source.find(';', at) - at));
  const auto have = terms_of(ours);
  std::multiset<std::string> pool(have.begin(), have.end());
  std::string missing;
  int matched = 0;
  const auto want = terms_of(rename_golden(golden));
  for (const auto& w : want) {
    auto it = pool.find(w);
    if (it == pool.end()) {
      missing += " " + w;
    } else {
      pool.erase(it);
      ++matched;
    }
  }
  return {missing.empty(), std::to_string(matched) + "/" + std::to_string(want.size()) + " reference terms present (" +
                               std::to_string(have.size()) + " terms generated)" +
                               (missing.empty() ? "" : "; missing:" + missing)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {"expansion oracle equivalence", expansion_oracle},
      {"component ordering and naming", ordering},
      {"rewrite fixtures", rewrite_fixtures},
      {"decomposition count and recombination", decomposition},
      {"codegen golden structure", codegen},
      {"Maxwell convergence", maxwell},
      {"integrator orders", integrators},
      {"frame/Weyl golden B11rhs", weyl_golden},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
