#include "tensorc/system.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tensorc/analytic.hpp"
#include "tensorc/error.hpp"
#include "tensorc/parser.hpp"

namespace tensorc {

namespace {

struct Line {
  int number = 0;
  std::string text;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Splits into sections, dropping comments and joining continuation lines.
std::map<std::string, std::vector<Line>> split_sections(std::string_view text) {
  static const std::set<std::string> known{"system",          "indices",   "tensors",    "params",
                                           "rules",           "component_rules", "decompose", "evolution",
                                           "constraints",     "setters"};
  std::map<std::string, std::vector<Line>> out;
  std::string current;
  std::istringstream in{std::string(text)};
  int number = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string t = trim(raw);
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!known.contains(current)) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(number) + ": unknown section [" + current + "]");
      }
      if (out.contains(current)) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(number) + ": duplicate section [" + current + "]");
      }
      out[current];
      continue;
    }
    if (current.empty()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(number) + ": text before the first section");
    }
    auto& lines = out[current];
    if ((raw.front() == ' ' || raw.front() == '\t') && !lines.empty()) {
      lines.back().text += " " + t;
    } else {
      lines.push_back({number, t});
    }
  }
  return out;
}

Error at_line(const Line& line, const Error& e) {
  return Error(e.code(), "line " + std::to_string(line.number) + ": " + e.what());
}

std::pair<std::string, std::string> split_once(const std::string& s, std::string_view sep, const Line& line) {
  const auto pos = s.find(sep);
  if (pos == std::string::npos) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line.number) + ": expected '" + std::string(sep) + "'");
  }
  return {trim(std::string_view(s).substr(0, pos)), trim(std::string_view(s).substr(pos + sep.size()))};
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorCode::Parse, "bad " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorCode::Parse, "bad " + what + " '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void need_args(const std::vector<std::string>& w, std::size_t n, const std::string& usage) {
  if (w.size() != n) throw Error(ErrorCode::Parse, "expected '" + usage + "'");
}

void add_rule_line(const std::string& text, RuleSet& rules, const SymbolTable& table,
                   const std::filesystem::path& base_dir, int depth);

void add_rule_file(const std::filesystem::path& path, RuleSet& rules, const SymbolTable& table, int depth) {
  if (depth > 8) throw Error(ErrorCode::Parse, "rule includes nested too deeply at '" + path.string() + "'");
  std::istringstream in(read_file(path));
  int number = 0;
  std::string pending;
  int pending_line = 0;
  auto flush = [&] {
    if (pending.empty()) return;
    try {
      add_rule_line(pending, rules, table, path.parent_path(), depth + 1);
    } catch (const Error& e) {
      throw Error(e.code(), path.filename().string() + " line " + std::to_string(pending_line) + ": " + e.what());
    }
    pending.clear();
  };
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string t = trim(raw);
    if (t.empty()) continue;
    if ((raw.front() == ' ' || raw.front() == '\t') && !pending.empty()) {
      pending += " " + t;
      continue;
    }
    flush();
    pending = t;
    pending_line = number;
  }
  flush();
}

void add_rule_line(const std::string& text, RuleSet& rules, const SymbolTable& table,
                   const std::filesystem::path& base_dir, int depth) {
  const auto w = words(text);
  if (w.front() == "include") {
    need_args(w, 2, "include <file>");
    add_rule_file(base_dir / w[1], rules, table, depth);
    return;
  }
  if (w.front() == "@projection") {
    if (w.size() < 3) throw Error(ErrorCode::Parse, "expected '@projection <h> <n> [symbols...]'");
    if (w.size() == 3) {
      rules.append(projection_rules_all(table, w[1], w[2]));
    } else {
      for (std::size_t i = 3; i < w.size(); ++i) rules.append(projection_rules(table, w[i], w[1], w[2]));
    }
    return;
  }
  if (w.front() == "@metric_split") {
    need_args(w, 4, "@metric_split <g> <h> <n>");
    rules.add(metric_split_rule(table, w[1], w[2], w[3]));
    return;
  }
  if (w.front() == "@normalization") {
    need_args(w, 2, "@normalization <n>");
    rules.add(normalization_rule(table, w[1]));
    return;
  }
  if (w.front() == "@normal_split") {
    need_args(w, 5, "@normal_split <n> <t> <alpha> <beta>");
    rules.add(normal_split_rule(table, w[1], w[2], w[3], w[4]));
    return;
  }
  if (w.front() == "@frame") {
    need_args(w, 4, "@frame <e> <b> <Gamma>");
    rules.append(frame_conversion_rules(table, w[1], w[2], w[3]));
    return;
  }
  if (w.front() == "@max_passes") {
    need_args(w, 2, "@max_passes <n>");
    rules.max_passes = parse_int(w[1], "pass limit");
    if (rules.max_passes < 1) throw Error(ErrorCode::Parse, "pass limit must be positive");
    return;
  }
  if (w.front().starts_with('@')) throw Error(ErrorCode::Parse, "unknown directive '" + w.front() + "'");
  const auto colon = text.find(':');
  const auto arrow = text.find("=>");
  if (colon == std::string::npos || arrow == std::string::npos || colon > arrow) {
    throw Error(ErrorCode::Parse, "expected '<name>: <lhs> => <rhs>'");
  }
  const std::string name = trim(std::string_view(text).substr(0, colon));
  if (!is_identifier(name)) throw Error(ErrorCode::Parse, "bad rule name '" + name + "'");
  const std::string lhs = trim(std::string_view(text).substr(colon + 1, arrow - colon - 1));
  const std::string rhs = trim(std::string_view(text).substr(arrow + 2));
  rules.add(define_rule(lhs, rhs, name, table));
}

KindTable parse_indices(const std::vector<Line>& lines) {
  KindTable kinds;
  for (const auto& line : lines) {
    try {
      const auto w = words(line.text);
      need_args(w, 3, "<kind> <lo>..<hi> <letters>");
      const auto dots = w[1].find("..");
      if (dots == std::string::npos) throw Error(ErrorCode::Parse, "expected a range '<lo>..<hi>'");
      IndexKind k;
      k.name = w[0];
      k.lo = parse_int(w[1].substr(0, dots), "range bound");
      k.hi = parse_int(w[1].substr(dots + 2), "range bound");
      k.letters = w[2];
      kinds.add(std::move(k));
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }
  return kinds;
}

NamedEquation parse_equation(const Line& line, const SymbolTable& table) {
  const auto [lhs, rhs] = split_once(line.text, "=", line);
  NamedEquation eq;
  eq.equation.lhs = parse_lhs(lhs, table);
  eq.equation.rhs = parse_expression(rhs, table);
  eq.name = eq.equation.lhs.name;
  const auto& sym = table.at(eq.name);
  if (sym.parameter || sym.constant != ConstantValue::None) {
    throw Error(ErrorCode::Symbol, "'" + eq.name + "' cannot be assigned (parameter or constant)");
  }
  return eq;
}

}  // namespace

TensorFactor parse_lhs(std::string_view text, const SymbolTable& table) {
  const Expr e = parse_expression(text, table);
  if (e.terms.size() != 1 || e.terms[0].coefficient != 1 || e.terms[0].factors.size() != 1 ||
      !e.terms[0].factors[0].is_tensor() || e.terms[0].factors[0].tensor().power != 1) {
    throw Error(ErrorCode::Parse, "left-hand side must be a single tensor, got '" + std::string(text) + "'");
  }
  return e.terms[0].factors[0].tensor();
}

std::set<std::string> SystemDefinition::param_names() const {
  std::set<std::string> out;
  for (const auto& [k, v] : params) out.insert(k);
  return out;
}

SystemDefinition parse_system(std::string_view text, const std::filesystem::path& base_dir) {
  auto sections = split_sections(text);
  auto section = [&](const std::string& name) -> const std::vector<Line>& { return sections[name]; };

  SystemDefinition sys;
  if (sections.contains("indices")) sys.table = SymbolTable(parse_indices(section("indices")));

  for (const auto& line : section("system")) {
    try {
      const auto [key, value] = split_once(line.text, "=", line);
      if (key == "name") {
        if (!is_identifier(value)) throw Error(ErrorCode::Parse, "bad system name '" + value + "'");
        sys.name = value;
      } else if (key == "solution") {
        find_solution(value);
        sys.solution = value;
      } else if (key == "boundary") {
        if (value == "periodic") {
          sys.boundary = Boundary::Periodic;
        } else if (value == "none") {
          sys.boundary = Boundary::None;
        } else {
          throw Error(ErrorCode::Parse, "boundary must be 'periodic' or 'none', got '" + value + "'");
        }
      } else {
        throw Error(ErrorCode::Parse, "unknown [system] key '" + key + "'");
      }
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }

  for (const auto& line : section("tensors")) {
    try {
      declare_from_text(line.text, sys.table);
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }

  for (const auto& line : section("params")) {
    try {
      const auto [key, value] = split_once(line.text, "=", line);
      if (!is_identifier(key)) throw Error(ErrorCode::Parse, "bad parameter name '" + key + "'");
      sys.table.declare_parameter(key);
      sys.params[key] = parse_double(value, "parameter value");
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }

  for (const auto& [sec, target] : {std::pair<const char*, RuleSet*>{"rules", &sys.rules},
                                    std::pair<const char*, RuleSet*>{"component_rules", &sys.component_rules}}) {
    for (const auto& line : section(sec)) {
      try {
        add_rule_line(line.text, *target, sys.table, base_dir, 0);
      } catch (const Error& e) {
        throw at_line(line, e);
      }
    }
  }

  for (const auto& line : section("decompose")) {
    try {
      const auto colon = line.text.find(':');
      const auto eq = line.text.find('=');
      if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
        const auto [key, value] = split_once(line.text, "=", line);
        auto& d = sys.decompose;
        std::string* slot = key == "normal"       ? &d.normal
                            : key == "projector"  ? &d.projector
                            : key == "frame"      ? &d.frame
                            : key == "coframe"    ? &d.coframe
                            : key == "connection" ? &d.connection
                                                  : nullptr;
        if (!slot) throw Error(ErrorCode::Parse, "unknown [decompose] key '" + key + "'");
        sys.table.at(value);
        *slot = value;
      } else {
        const auto [name, expr] = split_once(line.text, ":", line);
        if (!is_identifier(name)) throw Error(ErrorCode::Parse, "bad equation name '" + name + "'");
        sys.decompose.equations.emplace_back(name, parse_expression(expr, sys.table));
      }
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }
  {
    const auto& d = sys.decompose;
    if (!d.equations.empty() && (d.normal.empty() || d.projector.empty())) {
      throw Error(ErrorCode::Parse, "[decompose] needs 'normal' and 'projector'");
    }
    const int frame_keys = !d.frame.empty() + !d.coframe.empty() + !d.connection.empty();
    if (frame_keys != 0 && frame_keys != 3) {
      throw Error(ErrorCode::Parse, "[decompose] needs all of 'frame', 'coframe' and 'connection'");
    }
  }

  std::set<std::string> evolved;
  for (const auto& line : section("evolution")) {
    try {
      auto eq = parse_equation(line, sys.table);
      if (!evolved.insert(eq.name).second) {
        throw Error(ErrorCode::Parse, "'" + eq.name + "' has more than one evolution equation");
      }
      sys.evolution.push_back(std::move(eq));
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }
  for (const auto& line : section("constraints")) {
    try {
      auto eq = parse_equation(line, sys.table);
      if (evolved.contains(eq.name)) throw Error(ErrorCode::Parse, "constraint '" + eq.name + "' is evolved");
      sys.constraints.push_back(std::move(eq));
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }
  for (const auto& line : section("setters")) {
    try {
      const auto [when, body] = split_once(line.text, ":", line);
      SetterDef s;
      if (when == "initial") {
        s.schedule = Schedule::Initial;
      } else if (when == "every_step") {
        s.schedule = Schedule::EveryStep;
      } else {
        throw Error(ErrorCode::Parse, "setter schedule must be 'initial' or 'every_step', got '" + when + "'");
      }
      if (body.find('=') == std::string::npos) {
        if (s.schedule != Schedule::Initial) throw Error(ErrorCode::Parse, "analytic setters run only initially");
        if (body != "solution") find_solution(body);
        s.analytic = body;
        s.name = "initial_" + body;
      } else {
        auto eq = parse_equation({line.number, body}, sys.table);
        if (evolved.contains(eq.name) && s.schedule == Schedule::EveryStep) {
          throw Error(ErrorCode::Parse, "every-step setter assigns evolved '" + eq.name + "'");
        }
        s.name = when + "_" + eq.name;
        s.equation = std::move(eq.equation);
      }
      sys.setters.push_back(std::move(s));
    } catch (const Error& e) {
      throw at_line(line, e);
    }
  }
  return sys;
}

SystemDefinition load_system(const std::string& path) {
  const std::filesystem::path p(path);
  try {
    return parse_system(read_file(p), p.parent_path());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), p.filename().string() + ": " + e.what());
  }
}

}  // namespace tensorc
