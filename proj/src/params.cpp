#include "tensorc/params.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tensorc/error.hpp"

namespace tensorc {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& key, const std::string& value) {
  double v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw Error(ErrorCode::Param, "parameter '" + key + "': '" + value + "' is not a number");
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw Error(ErrorCode::Param, "parameter '" + key + "': '" + value + "' is not an integer");
  }
  return v;
}

}  // namespace

Grid RunParams::grid() const {
  Grid g;
  g.n = n;
  g.ghost = ghost;
  g.spacing = spacing;
  g.validate();
  return g;
}

double RunParams::time_step() const {
  if (dt) return *dt;
  const double c = courant.value_or(0.25);
  return c * std::min({spacing[0], spacing[1], spacing[2]});
}

RunParams parse_params(std::string_view text, const std::set<std::string>& system_params) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Param, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::Param, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    if (!kv.emplace(key, value).second) throw Error(ErrorCode::Param, "duplicate parameter '" + key + "'");
  }

  static const std::set<std::string> known = {"nx", "ny", "nz", "ghost", "dx", "dy", "dz",
                                              "integrator", "courant", "dt", "t_final", "icn_iterations",
                                              "constraint_every", "output_every", "output_dir", "solution"};
  for (const auto& [key, value] : kv) {
    if (!known.contains(key) && !system_params.contains(key)) {
      throw Error(ErrorCode::Param, "unknown parameter '" + key + "'");
    }
  }
  for (const char* key : {"nx", "ny", "nz", "ghost", "dx", "integrator", "t_final"}) {
    if (!kv.contains(key)) throw Error(ErrorCode::Param, std::string("missing required parameter '") + key + "'");
  }
  if (kv.contains("courant") && kv.contains("dt")) {
    throw Error(ErrorCode::Param, "give either 'courant' or 'dt', not both");
  }
  if (!kv.contains("courant") && !kv.contains("dt")) {
    throw Error(ErrorCode::Param, "missing required parameter 'courant' (or 'dt')");
  }

  RunParams p;
  p.n = {to_int("nx", kv["nx"]), to_int("ny", kv["ny"]), to_int("nz", kv["nz"])};
  p.ghost = to_int("ghost", kv["ghost"]);
  const double dx = to_number("dx", kv["dx"]);
  p.spacing = {dx, kv.contains("dy") ? to_number("dy", kv["dy"]) : dx,
               kv.contains("dz") ? to_number("dz", kv["dz"]) : dx};
  const int icn = kv.contains("icn_iterations") ? to_int("icn_iterations", kv["icn_iterations"]) : 3;
  p.integrator = parse_integrator(kv["integrator"], icn);
  if (kv.contains("courant")) {
    p.courant = to_number("courant", kv["courant"]);
    if (!(*p.courant > 0)) throw Error(ErrorCode::Param, "parameter 'courant' must be positive");
  }
  if (kv.contains("dt")) {
    p.dt = to_number("dt", kv["dt"]);
    if (!(*p.dt > 0)) throw Error(ErrorCode::Param, "parameter 'dt' must be positive");
  }
  p.t_final = to_number("t_final", kv["t_final"]);
  if (kv.contains("constraint_every")) p.constraint_every = to_int("constraint_every", kv["constraint_every"]);
  if (p.constraint_every < 1) throw Error(ErrorCode::Param, "parameter 'constraint_every' must be positive");
  if (kv.contains("output_every")) p.output_every = to_int("output_every", kv["output_every"]);
  if (p.output_every < 0) throw Error(ErrorCode::Param, "parameter 'output_every' must be non-negative");
  if (kv.contains("output_dir")) p.output_dir = kv["output_dir"];
  if (kv.contains("solution")) p.solution = kv["solution"];
  for (const auto& name : system_params) {
    if (kv.contains(name)) p.system_params[name] = to_number(name, kv[name]);
  }
  try {
    (void)p.grid();
  } catch (const Error& e) {
    throw Error(ErrorCode::Param, e.what());
  }
  return p;
}

RunParams load_params(const std::string& path, const std::set<std::string>& system_params) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read parameter file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str(), system_params);
}

}  // namespace tensorc
