#include "tensorc/driver.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tensorc/analytic.hpp"
#include "tensorc/canonicalize.hpp"
#include "tensorc/error.hpp"

namespace tensorc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::set<std::string> all_component_names(const SymbolTable& table) {
  std::set<std::string> out;
  for (const TensorSymbol* s : table.symbols()) {
    if (s->parameter || s->constant != ConstantValue::None) continue;
    for (const auto& tuple : independent_components(*s, table)) {
      const auto ref = component_name(*s, tuple, table);
      if (ref.sign != 0) out.insert(ref.name);
    }
  }
  return out;
}

std::vector<ComponentEquation> expand_all(const std::vector<NamedEquation>& eqs, const SystemDefinition& sys,
                                          const std::string& suffix) {
  std::vector<ComponentEquation> out;
  const RuleSet* rules = sys.component_rules.rules.empty() ? nullptr : &sys.component_rules;
  for (const auto& e : eqs) {
    auto part = to_component_equations(e.equation, sys.table, rules, suffix);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
  written.push_back(path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, "bad JSON in '" + path.string() + "': " + e.what());
  }
}

std::string solution_name(const SystemDefinition& sys, const RunParams& params) {
  return params.solution.empty() ? sys.solution : params.solution;
}

// Contracts every free index of the frame's spacetime kind with the frame
// (lower indices) or coframe (upper indices).
Expr to_frame_indices(const Expr& expr, const SystemDefinition& sys) {
  const auto& table = sys.table;
  const auto& e = table.at(sys.decompose.frame);
  const auto& b = table.at(sys.decompose.coframe);
  if (e.rank() != 2 || b.rank() != 2) throw Error(ErrorCode::Rule, "frame and coframe must have two slots");
  const int frame_kind = e.slots[0].kinds.front();
  const int st_kind = e.slots[1].kinds.front();
  Expr cur = expr;
  std::set<std::string> used;
  for (const auto& t : cur.terms) {
    for (auto& l : labels_in(t)) used.insert(std::move(l));
  }
  for (const auto& x : free_indices(cur)) {
    if (x.is_literal() || x.kind != st_kind) continue;
    Index contracted = x;
    contracted.variance = opposite(x.variance);
    const std::string k = fresh_label(table.kinds().at(frame_kind), used);
    Factor f = x.variance == Variance::Down
                   ? make_tensor(e.name, {Index::abstract(k, frame_kind, Variance::Down), contracted})
                   : make_tensor(b.name, {Index::abstract(k, frame_kind, Variance::Up), contracted});
    cur = cur * Expr{{Term{1, {std::move(f)}}}};
  }
  return cur;
}

}  // namespace

std::vector<const KernelIR*> CompiledSystem::kernels() const {
  std::vector<const KernelIR*> out;
  if (rhs_kernel) out.push_back(&*rhs_kernel);
  if (constraint_kernel) out.push_back(&*constraint_kernel);
  for (const auto& k : setter_kernels) out.push_back(&k);
  return out;
}

CompiledSystem compile_system(const SystemDefinition& sys) {
  CompiledSystem c;
  c.grid_functions = all_component_names(sys.table);
  c.parameters = sys.param_names();
  c.rhs = expand_all(sys.evolution, sys, "rhs");
  for (const auto& eq : c.rhs) c.evolved.push_back(eq.component);
  for (const auto& e : c.evolved) c.grid_functions.insert(e + "rhs");
  c.constraints = expand_all(sys.constraints, sys, "");
  if (!sys.evolution.empty()) {
    c.rhs_kernel = build_kernel(sys.name + "_rhs", c.rhs, c.grid_functions, c.parameters);
  }
  if (!sys.constraints.empty()) {
    c.constraint_kernel = build_kernel(sys.name + "_constraints", c.constraints, c.grid_functions, c.parameters);
  }
  for (const auto& s : sys.setters) {
    if (!s.equation) continue;
    const auto eqs = expand_all({{s.name, *s.equation}}, sys, "");
    c.setter_kernels.push_back(build_kernel(sys.name + "_" + s.name, eqs, c.grid_functions, c.parameters));
  }
  return c;
}

void load_kernels(CompiledSystem& compiled, const std::string& dir) {
  auto load = [&](KernelIR& k) {
    KernelIR loaded = kernel_from_json(read_json(std::filesystem::path(dir) / (k.name + ".ir.json")));
    if (loaded.name != k.name) {
      throw Error(ErrorCode::Kernel, "IR file for '" + k.name + "' holds kernel '" + loaded.name + "'");
    }
    k = std::move(loaded);
  };
  if (compiled.rhs_kernel) load(*compiled.rhs_kernel);
  if (compiled.constraint_kernel) load(*compiled.constraint_kernel);
  for (auto& k : compiled.setter_kernels) load(k);
}

EvolutionSystem make_evolution_system(const SystemDefinition& sys, const CompiledSystem& compiled,
                                      const RunParams& params) {
  EvolutionSystem es;
  es.evolved = compiled.evolved;
  if (compiled.rhs_kernel) es.rhs.push_back(*compiled.rhs_kernel);
  es.boundary = sys.boundary;
  es.parameters = sys.params;
  for (const auto& [k, v] : params.system_params) es.parameters[k] = v;
  std::size_t next_kernel = 0;
  for (const auto& s : sys.setters) {
    Setter setter;
    setter.name = s.name;
    setter.schedule = s.schedule;
    if (s.equation) {
      setter.kernel = compiled.setter_kernels.at(next_kernel++);
    } else {
      const std::string name = s.analytic == "solution" ? solution_name(sys, params) : s.analytic;
      if (name.empty()) throw Error(ErrorCode::Param, "setter '" + s.name + "' needs a solution but none is set");
      setter.analytic = &find_solution(name);
      setter.fields = compiled.evolved;
    }
    es.setters.push_back(std::move(setter));
  }
  if (compiled.constraint_kernel) {
    es.evaluators.push_back({"constraints", *compiled.constraint_kernel, params.constraint_every});
  }
  return es;
}

RunOutcome run_system(const SystemDefinition& sys, const RunParams& params, const std::string& ir_dir) {
  CompiledSystem compiled = compile_system(sys);
  if (!ir_dir.empty()) load_kernels(compiled, ir_dir);
  RunOutcome out{{}, GridState(params.grid()), make_evolution_system(sys, compiled, params)};
  RunHooks hooks;
  const std::string sol = solution_name(sys, params);
  if (!sol.empty()) hooks.solution = &find_solution(sol);
  hooks.output_every = params.output_every;
  out.result = run(out.system, out.state, params.integrator, params.time_step(), params.t_final, hooks);
  return out;
}

void cmd_decompose(const SystemDefinition& sys, std::ostream& out) {
  const auto& d = sys.decompose;
  RuleSet frame_rules;
  if (!d.frame.empty()) {
    frame_rules = frame_conversion_rules(sys.table, d.frame, d.coframe, d.connection);
    frame_rules.append(sys.rules);
    frame_rules.max_passes = sys.rules.max_passes;
  }
  for (const auto& [name, eq] : d.equations) {
    for (const auto& p : decompose(eq, d.normal, d.projector, sys.rules, sys.table)) {
      Expr e = p.expr;
      if (!d.frame.empty()) {
        e = apply_rules(e, frame_rules, sys.table);
        e = apply_rules(to_frame_indices(e, sys), frame_rules, sys.table);
      }
      out << name << "[" << p.tag << "]: " << to_string(e) << " = 0\n";
    }
  }
}

void cmd_expand(const SystemDefinition& sys, std::ostream& out) {
  const CompiledSystem c = compile_system(sys);
  auto section = [&](const char* title, const std::vector<ComponentEquation>& eqs) {
    if (eqs.empty()) return;
    out << "# " << title << "\n";
    for (const auto& e : eqs) out << e.lhs_name << " = " << to_string(e.rhs) << "\n";
  };
  section("evolution", c.rhs);
  section("constraints", c.constraints);
  for (const auto& s : sys.setters) {
    if (s.equation) section(("setter " + s.name).c_str(), expand_all({{s.name, *s.equation}}, sys, ""));
  }
}

std::vector<std::string> cmd_generate(const SystemDefinition& sys, const std::string& out_dir) {
  const CompiledSystem c = compile_system(sys);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir + "'");
  }
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  nlohmann::json manifest;
  manifest["system"] = sys.name;
  manifest["solution"] = sys.solution;
  manifest["boundary"] = sys.boundary == Boundary::Periodic ? "periodic" : "none";
  manifest["evolved"] = c.evolved;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : sys.params) params[k] = v;
  manifest["parameters"] = params;
  std::set<std::string> gfs(c.evolved.begin(), c.evolved.end());
  nlohmann::json kernels = nlohmann::json::array();
  auto emit = [&](const KernelIR& k, const std::string& role) {
    const std::string c_file = k.name + ".c";
    const std::string ir_file = k.name + ".ir.json";
    write_text(dir / c_file, emit_c(k, k.name), written);
    write_text(dir / ir_file, to_json(k).dump(2) + "\n", written);
    gfs.insert(k.inputs.begin(), k.inputs.end());
    gfs.insert(k.outputs.begin(), k.outputs.end());
    kernels.push_back({{"name", k.name}, {"role", role}, {"source", c_file}, {"ir", ir_file}});
  };
  if (c.rhs_kernel) emit(*c.rhs_kernel, "rhs");
  if (c.constraint_kernel) emit(*c.constraint_kernel, "evaluator");
  std::size_t next = 0;
  for (const auto& s : sys.setters) {
    if (!s.equation) continue;
    emit(c.setter_kernels.at(next++), s.schedule == Schedule::Initial ? "initial_setter" : "every_step_setter");
  }
  manifest["kernels"] = kernels;
  manifest["grid_functions"] = std::vector<std::string>(gfs.begin(), gfs.end());
  write_text(dir / (sys.name + "_manifest.json"), manifest.dump(2) + "\n", written);
  return written;
}

void write_norms_csv(const std::vector<NormRecord>& norms, std::ostream& out) {
  out << "step,time,name,l2,linf\n";
  for (const auto& n : norms) {
    out << n.step << "," << fmt(n.time) << "," << n.name << "," << fmt(n.l2) << "," << fmt(n.linf) << "\n";
  }
}

void write_snapshot(const GridState& state, const std::string& name, const std::string& path) {
  const Grid& g = state.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  for (int a = 0; a < 3; ++a) {
    const auto n = static_cast<std::uint32_t>(g.n[static_cast<std::size_t>(a)]);
    const unsigned char bytes[4] = {static_cast<unsigned char>(n), static_cast<unsigned char>(n >> 8),
                                    static_cast<unsigned char>(n >> 16), static_cast<unsigned char>(n >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
  const auto values = interior(state, name);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

void cmd_run(const SystemDefinition& sys, const RunParams& params, const std::string& out_dir,
             const std::string& ir_dir, std::ostream& out) {
  const RunOutcome r = run_system(sys, params, ir_dir);
  if (out_dir.empty()) {
    write_norms_csv(r.result.norms, out);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir + "'");
  }
  const std::filesystem::path dir(out_dir);
  const auto csv = dir / (sys.name + "_norms.csv");
  {
    std::ofstream f(csv);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + csv.string() + "'");
    write_norms_csv(r.result.norms, f);
  }
  out << "wrote " << csv.string() << "\n";
  for (const auto& e : r.system.evolved) {
    const auto path = dir / (e + ".bin");
    write_snapshot(r.state, e, path.string());
    out << "wrote " << path.string() << "\n";
  }
}

RunParams scale_params(const RunParams& base, int resolution) {
  if (resolution < 1) throw Error(ErrorCode::Param, "resolutions must be positive");
  RunParams p = base;
  const int n0 = base.n[0];
  const double f = static_cast<double>(n0) / resolution;
  for (std::size_t a = 0; a < 3; ++a) {
    if (base.n[a] != n0) continue;
    p.n[a] = resolution;
    p.spacing[a] = base.spacing[a] * f;
  }
  if (p.dt) *p.dt *= f;
  return p;
}

std::vector<ConvergenceRow> converge(const SystemDefinition& sys, const RunParams& params,
                                     const std::vector<int>& resolutions) {
  if (resolutions.size() < 2) throw Error(ErrorCode::Usage, "convergence needs at least 2 resolutions");
  const std::string sol = solution_name(sys, params);
  if (sol.empty()) throw Error(ErrorCode::Param, "convergence needs an analytic solution");
  const AnalyticSolution& solution = find_solution(sol);
  std::vector<ConvergenceRow> rows;
  for (int n : resolutions) {
    const RunOutcome r = run_system(sys, scale_params(params, n), {});
    rows.push_back({n, solution_error(r.system, r.state, solution).linf, "-"});
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ec = rows[i - 1].error, ef = rows[i].error;
    if (ec == 0 && ef == 0) {
      rows[i].order = "exact";
    } else if (ef == 0 || ec == 0) {
      rows[i].order = "inf";
    } else {
      const double order = std::log(ec / ef) / std::log(static_cast<double>(rows[i].resolution) / rows[i - 1].resolution);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", order);
      rows[i].order = buf;
    }
  }
  return rows;
}

void cmd_converge(const SystemDefinition& sys, const RunParams& params, const std::vector<int>& resolutions,
                  std::ostream& out) {
  const auto rows = converge(sys, params, resolutions);
  out << "resolution,linf_error,order\n";
  for (const auto& r : rows) {
    out << r.resolution << "," << fmt(r.error) << "," << r.order << "\n";
  }
}

}  // namespace tensorc
