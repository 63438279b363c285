#include "tensorc/execute.hpp"

#include <cmath>
#include <functional>

#include "tensorc/error.hpp"

namespace tensorc {

namespace {

void check_ready(const KernelIR& k, GridState& state, const ParamMap& params) {
  const Grid& g = state.grid();
  if (!k.derivatives.empty() && g.ghost < k.stencil.ghost_width) {
    throw Error(ErrorCode::Grid, "kernel '" + k.name + "' needs " + std::to_string(k.stencil.ghost_width) +
                                     " ghost point(s), the grid has " + std::to_string(g.ghost));
  }
  for (const auto& p : k.parameters) {
    if (!params.contains(p)) throw Error(ErrorCode::Param, "missing parameter '" + p + "' for kernel '" + k.name + "'");
  }
  for (const auto& n : k.inputs) (void)state.at(n);
  for (const auto& n : k.outputs) (void)state.at(n);
}

// One monomial in emit_c order: coefficient, then factors left to right,
// positive powers as repeated products, negative powers through pow().
template <class Lookup>
double eval_monomial(const Monomial& m, double coef, const Lookup& value) {
  bool started = false;
  double v = 0;
  auto mul = [&](double x) {
    v = started ? v * x : x;
    started = true;
  };
  if (coef != 1.0 || m.powers.empty()) mul(coef);
  for (const auto& [name, power] : m.powers) {
    const double x = value(name);
    if (power > 0) {
      for (int p = 0; p < power; ++p) mul(x);
    } else {
      mul(std::pow(x, power));
    }
  }
  return v;
}

template <class Lookup>
double eval_expr(const ScalarExpr& e, const std::vector<double>& coefs, const Lookup& value) {
  double acc = 0;
  for (std::size_t t = 0; t < e.terms.size(); ++t) {
    const bool negative = e.terms[t].coefficient < 0;
    const double term = eval_monomial(e.terms[t], coefs[t], value);
    if (t == 0) {
      acc = negative ? -term : term;
    } else {
      acc = negative ? acc - term : acc + term;
    }
  }
  return acc;
}

std::vector<double> magnitudes(const ScalarExpr& e) {
  std::vector<double> out;
  for (const auto& m : e.terms) {
    Rational c = m.coefficient < 0 ? -m.coefficient : m.coefficient;
    out.push_back(to_double(c));
  }
  return out;
}

struct Compiled {
  struct Factor {
    int slot;
    int power;
  };
  struct Term {
    double coef;
    bool use_coef;
    bool negative;
    std::vector<Factor> factors;
  };
  struct Local {
    int slot;
    std::vector<Term> terms;
  };
  std::map<std::string, int> slots;
  std::vector<Local> locals;
  int size = 0;

  int slot(const std::string& name) {
    auto [it, fresh] = slots.emplace(name, size);
    if (fresh) ++size;
    return it->second;
  }
};

Compiled compile(const KernelIR& k) {
  Compiled c;
  for (const auto& n : k.inputs) c.slot(n);
  for (const auto& d : k.derivatives) c.slot(d.name);
  for (const auto& p : k.parameters) c.slot(p);
  for (const auto& n : k.outputs) c.slot(n);
  for (const auto& l : k.locals) {
    Compiled::Local local{c.slot(l.output), {}};
    const auto mags = magnitudes(l.expr);
    for (std::size_t t = 0; t < l.expr.terms.size(); ++t) {
      const auto& m = l.expr.terms[t];
      Compiled::Term term{mags[t], mags[t] != 1.0 || m.powers.empty(), m.coefficient < 0, {}};
      for (const auto& [name, power] : m.powers) {
        auto it = c.slots.find(name);
        if (it == c.slots.end()) {
          throw Error(ErrorCode::Kernel, "kernel '" + k.name + "' uses unknown name '" + name + "'");
        }
        term.factors.push_back({it->second, power});
      }
      local.terms.push_back(std::move(term));
    }
    c.locals.push_back(std::move(local));
  }
  return c;
}

inline double run_term(const Compiled::Term& t, const double* v) {
  bool started = false;
  double x = 0;
  auto mul = [&](double y) {
    x = started ? x * y : y;
    started = true;
  };
  if (t.use_coef) mul(t.coef);
  for (const auto& f : t.factors) {
    if (f.power > 0) {
      for (int p = 0; p < f.power; ++p) mul(v[f.slot]);
    } else {
      mul(std::pow(v[f.slot], f.power));
    }
  }
  return x;
}

}  // namespace

void execute_kernel(const KernelIR& k, GridState& state, const ParamMap& params) {
  check_ready(k, state, params);
  const Compiled c = compile(k);
  const Grid& g = state.grid();
  std::vector<const double*> in;
  for (const auto& n : k.inputs) in.push_back(state.at(n).data());
  std::vector<double*> out;
  for (const auto& n : k.outputs) out.push_back(state.at(n).data());
  std::vector<int> out_slot;
  for (const auto& n : k.outputs) out_slot.push_back(c.slots.at(n));
  struct Deriv {
    int slot;
    const double* src;
    std::ptrdiff_t stride;
    double hdi;
  };
  std::vector<Deriv> derivs;
  for (const auto& d : k.derivatives) {
    const int axis = d.direction - 1;
    std::ptrdiff_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= g.extent(a);
    const double hdi = 0.5 * (1 / g.spacing[static_cast<std::size_t>(axis)]);
    derivs.push_back({c.slots.at(d.name), state.at(d.source).data(), stride, hdi});
  }
  std::vector<double> base(static_cast<std::size_t>(c.size), 0.0);
  for (const auto& p : k.parameters) base[static_cast<std::size_t>(c.slots.at(p))] = params.at(p);
  const int kb = g.ghost, ke = g.ghost + g.n[2];
  const int jb = g.ghost, je = g.ghost + g.n[1];
  const int ib = g.ghost, ie = g.ghost + g.n[0];
  const std::size_t n_in = in.size();

#pragma omp parallel
  {
    std::vector<double> v = base;
#pragma omp for collapse(2) schedule(static)
    for (int kk = kb; kk < ke; ++kk) {
      for (int jj = jb; jj < je; ++jj) {
        for (int ii = ib; ii < ie; ++ii) {
          const std::size_t idx = g.index(ii, jj, kk);
          for (std::size_t s = 0; s < n_in; ++s) v[s] = in[s][idx];
          for (const auto& d : derivs) {
            v[static_cast<std::size_t>(d.slot)] = (d.src[static_cast<std::ptrdiff_t>(idx) + d.stride] -
                                                   d.src[static_cast<std::ptrdiff_t>(idx) - d.stride]) *
                                                  d.hdi;
          }
          for (const auto& l : c.locals) {
            double acc = 0;
            for (std::size_t t = 0; t < l.terms.size(); ++t) {
              const double term = run_term(l.terms[t], v.data());
              if (t == 0) {
                acc = l.terms[t].negative ? -term : term;
              } else {
                acc = l.terms[t].negative ? acc - term : acc + term;
              }
            }
            v[static_cast<std::size_t>(l.slot)] = acc;
          }
          for (std::size_t o = 0; o < out.size(); ++o) out[o][idx] = v[static_cast<std::size_t>(out_slot[o])];
        }
      }
    }
  }
}

void execute_kernel_serial(const KernelIR& k, GridState& state, const ParamMap& params) {
  check_ready(k, state, params);
  const Grid& g = state.grid();
  std::vector<std::vector<double>> coefs;
  for (const auto& l : k.locals) coefs.push_back(magnitudes(l.expr));
  std::map<std::string, double> env;
  for (int kk = g.ghost; kk < g.ghost + g.n[2]; ++kk) {
    for (int jj = g.ghost; jj < g.ghost + g.n[1]; ++jj) {
      for (int ii = g.ghost; ii < g.ghost + g.n[0]; ++ii) {
        env = params;
        const std::size_t idx = g.index(ii, jj, kk);
        for (const auto& n : k.inputs) env[n] = state.at(n)[idx];
        for (const auto& d : k.derivatives) {
          const double dxi = 1 / g.spacing[static_cast<std::size_t>(d.direction - 1)];
          const double hdxi = 0.5 * dxi;
          int p[3] = {ii, jj, kk}, m[3] = {ii, jj, kk};
          ++p[d.direction - 1];
          --m[d.direction - 1];
          const auto& f = state.at(d.source);
          env[d.name] = (f[g.index(p[0], p[1], p[2])] - f[g.index(m[0], m[1], m[2])]) * hdxi;
        }
        for (std::size_t l = 0; l < k.locals.size(); ++l) {
          env[k.locals[l].output] = eval_expr(k.locals[l].expr, coefs[l], [&](const std::string& n) {
            auto it = env.find(n);
            if (it == env.end()) throw Error(ErrorCode::Kernel, "unknown name '" + n + "'");
            return it->second;
          });
        }
        for (const auto& n : k.outputs) state.at(n)[idx] = env.at(n);
      }
    }
  }
}

}  // namespace tensorc
