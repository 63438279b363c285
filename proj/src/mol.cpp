#include "tensorc/mol.hpp"

#include <cmath>
#include <set>

#include "tensorc/error.hpp"

namespace tensorc {

Integrator parse_integrator(const std::string& name, int icn_iterations) {
  if (icn_iterations < 1) throw Error(ErrorCode::Param, "icn_iterations must be at least 1");
  if (name == "rk2") return {IntegratorKind::Rk2, icn_iterations};
  if (name == "rk4") return {IntegratorKind::Rk4, icn_iterations};
  if (name == "icn") return {IntegratorKind::Icn, icn_iterations};
  throw Error(ErrorCode::Param, "unknown integrator '" + name + "' (expected rk2, rk4 or icn)");
}

std::string to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::Rk2: return "rk2";
    case IntegratorKind::Rk4: return "rk4";
    case IntegratorKind::Icn: return "icn";
  }
  return "?";
}

std::vector<std::string> EvolutionSystem::grid_functions() const {
  std::set<std::string> names(evolved.begin(), evolved.end());
  auto add_kernel = [&](const KernelIR& k) {
    names.insert(k.inputs.begin(), k.inputs.end());
    names.insert(k.outputs.begin(), k.outputs.end());
  };
  for (const auto& e : evolved) names.insert(e + "rhs");
  for (const auto& k : rhs) add_kernel(k);
  for (const auto& s : setters) {
    if (s.kernel) add_kernel(*s.kernel);
    names.insert(s.fields.begin(), s.fields.end());
  }
  for (const auto& e : evaluators) add_kernel(e.kernel);
  return {names.begin(), names.end()};
}

void EvolutionSystem::validate() const {
  std::map<std::string, int> producers;
  for (const auto& k : rhs) {
    for (const auto& o : k.outputs) ++producers[o];
  }
  for (const auto& e : evolved) {
    const int n = producers[e + "rhs"];
    if (n != 1) {
      throw Error(ErrorCode::Kernel, "evolved function '" + e + "' has " + std::to_string(n) +
                                         " right-hand sides (expected exactly one)");
    }
  }
  const std::set<std::string> ev(evolved.begin(), evolved.end());
  for (const auto& e : evaluators) {
    if (e.every < 1) throw Error(ErrorCode::Param, "evaluator '" + e.name + "' needs a positive cadence");
    for (const auto& o : e.kernel.outputs) {
      if (ev.contains(o)) throw Error(ErrorCode::Kernel, "evaluator '" + e.name + "' writes evolved '" + o + "'");
    }
  }
}

void allocate(const EvolutionSystem& system, GridState& state) {
  for (const auto& n : system.grid_functions()) state.add(n);
}

void fill_boundaries(const EvolutionSystem& system, GridState& state) {
  if (system.boundary == Boundary::None) return;
  std::set<std::string> names(system.evolved.begin(), system.evolved.end());
  for (const auto& s : system.setters) {
    if (s.kernel) names.insert(s.kernel->outputs.begin(), s.kernel->outputs.end());
    names.insert(s.fields.begin(), s.fields.end());
  }
  for (const auto& n : names) apply_periodic_bc(state, n);
}

namespace {

void run_setter(const Setter& s, GridState& state, const ParamMap& params) {
  if (s.kernel) {
    execute_kernel(*s.kernel, state, params);
  } else if (s.analytic) {
    fill_analytic(state, *s.analytic, s.fields, params);
  }
}

std::vector<std::size_t> interior_indices(const Grid& g) {
  std::vector<std::size_t> out;
  out.reserve(g.interior_size());
  for (int k = g.ghost; k < g.ghost + g.n[2]; ++k) {
    for (int j = g.ghost; j < g.ghost + g.n[1]; ++j) {
      for (int i = g.ghost; i < g.ghost + g.n[0]; ++i) out.push_back(g.index(i, j, k));
    }
  }
  return out;
}

using Fields = std::vector<std::vector<double>>;

class Stepper {
 public:
  Stepper(const EvolutionSystem& system, GridState& state)
      : sys_(system), state_(state), idx_(interior_indices(state.grid())) {}

  Fields snapshot() const {
    Fields out;
    for (const auto& e : sys_.evolved) out.push_back(state_.at(e));
    return out;
  }

  // Every-step setters, boundaries, then rhs kernels at time t.
  Fields rhs(double t) {
    state_.time = t;
    for (const auto& s : sys_.setters) {
      if (s.schedule == Schedule::EveryStep) run_setter(s, state_, sys_.parameters);
    }
    fill_boundaries(sys_, state_);
    for (const auto& k : sys_.rhs) execute_kernel(k, state_, sys_.parameters);
    Fields out;
    for (const auto& e : sys_.evolved) out.push_back(state_.at(e + "rhs"));
    return out;
  }

  // evolved = base + sum_m w_m * ks_m, on the interior.
  void combine(const Fields& base, const std::vector<std::pair<double, const Fields*>>& terms) {
    for (std::size_t f = 0; f < sys_.evolved.size(); ++f) {
      auto& u = state_.at(sys_.evolved[f]);
      for (std::size_t p : idx_) {
        double v = base[f][p];
        for (const auto& [w, ks] : terms) v += w * (*ks)[f][p];
        u[p] = v;
      }
    }
  }

  void check_finite(int step) const {
    for (const auto& e : sys_.evolved) {
      const auto& u = state_.at(e);
      for (std::size_t p : idx_) {
        if (!std::isfinite(u[p])) {
          throw Error(ErrorCode::Numeric, "non-finite value in '" + e + "' at step " + std::to_string(step));
        }
      }
    }
  }

 private:
  const EvolutionSystem& sys_;
  GridState& state_;
  std::vector<std::size_t> idx_;
};

}  // namespace

void mol_step(const EvolutionSystem& system, GridState& state, const Integrator& integrator, double dt,
              int step) {
  if (!(dt > 0)) throw Error(ErrorCode::Param, "time step must be positive");
  Stepper s(system, state);
  const double t0 = state.time;
  const Fields u0 = s.snapshot();
  switch (integrator.kind) {
    case IntegratorKind::Rk2: {
      const Fields k1 = s.rhs(t0);
      s.combine(u0, {{0.5 * dt, &k1}});
      const Fields k2 = s.rhs(t0 + 0.5 * dt);
      s.combine(u0, {{dt, &k2}});
      break;
    }
    case IntegratorKind::Rk4: {
      const Fields k1 = s.rhs(t0);
      s.combine(u0, {{0.5 * dt, &k1}});
      const Fields k2 = s.rhs(t0 + 0.5 * dt);
      s.combine(u0, {{0.5 * dt, &k2}});
      const Fields k3 = s.rhs(t0 + 0.5 * dt);
      s.combine(u0, {{dt, &k3}});
      const Fields k4 = s.rhs(t0 + dt);
      s.combine(u0, {{dt / 6, &k1}, {dt / 3, &k2}, {dt / 3, &k3}, {dt / 6, &k4}});
      break;
    }
    case IntegratorKind::Icn: {
      // u^{k+1} = u^n + dt/2 (F(u^n) + F(u^k)), u^0 = u^n.
      const Fields f0 = s.rhs(t0);
      s.combine(u0, {{dt, &f0}});
      for (int it = 1; it < integrator.icn_iterations; ++it) {
        const Fields fk = s.rhs(t0 + dt);
        s.combine(u0, {{0.5 * dt, &f0}, {0.5 * dt, &fk}});
      }
      break;
    }
  }
  state.time = t0 + dt;
  s.check_finite(step);
  fill_boundaries(system, state);
}

Norms solution_error(const EvolutionSystem& system, const GridState& state, const AnalyticSolution& solution) {
  const Grid& g = state.grid();
  double sum = 0, worst = 0;
  std::size_t count = 0;
  for (const auto& e : system.evolved) {
    const auto& u = state.at(e);
    for (int k = g.ghost; k < g.ghost + g.n[2]; ++k) {
      for (int j = g.ghost; j < g.ghost + g.n[1]; ++j) {
        for (int i = g.ghost; i < g.ghost + g.n[0]; ++i) {
          const double exact =
              solution.value(e, g.coord(0, i), g.coord(1, j), g.coord(2, k), state.time, system.parameters);
          const double d = u[g.index(i, j, k)] - exact;
          sum += d * d;
          worst = std::max(worst, std::abs(d));
          ++count;
        }
      }
    }
  }
  return {count ? std::sqrt(sum / static_cast<double>(count)) : 0.0, worst};
}

RunResult run(const EvolutionSystem& system, GridState& state, const Integrator& integrator, double dt,
              double t_final, const RunHooks& hooks) {
  system.validate();
  if (!(dt > 0)) throw Error(ErrorCode::Param, "time step must be positive");
  allocate(system, state);
  for (const auto& s : system.setters) run_setter(s, state, system.parameters);
  fill_boundaries(system, state);

  const double t0 = state.time;
  const int n_steps = t_final > t0 ? static_cast<int>(std::ceil((t_final - t0) / dt - 1e-9)) : 0;
  RunResult result;
  result.steps = n_steps;

  auto record = [&](int step) {
    for (const auto& e : system.evaluators) {
      if (step % e.every != 0) continue;
      execute_kernel(e.kernel, state, system.parameters);
      for (const auto& o : e.kernel.outputs) {
        const Norms n = interior_norms(state, o);
        result.norms.push_back({step, state.time, o, n.l2, n.linf});
      }
    }
    if (hooks.solution) {
      const bool due = hooks.output_every > 0 ? step % hooks.output_every == 0 : step == n_steps;
      if (due) {
        const Norms n = solution_error(system, state, *hooks.solution);
        result.norms.push_back({step, state.time, "solution_error", n.l2, n.linf});
      }
    }
    if (hooks.on_step) hooks.on_step(step, state);
  };

  record(0);
  for (int step = 1; step <= n_steps; ++step) {
    const double h = step == n_steps ? t_final - state.time : dt;
    mol_step(system, state, integrator, h, step);
    if (step == n_steps) state.time = t_final;
    record(step);
  }
  return result;
}

}  // namespace tensorc
