#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tensorc/components.hpp"
#include "tensorc/mol.hpp"
#include "tensorc/rewrite.hpp"
#include "tensorc/symbol.hpp"

namespace tensorc {

/// `initial: <solution>` samples an analytic solution into the evolved
/// functions (`solution` names the run's solution); `initial: G[..] = expr`
/// and `every_step: ...` assign a tensor through a kernel.
struct SetterDef {
  std::string name;
  Schedule schedule = Schedule::Initial;
  std::string analytic;
  std::optional<TensorEquation> equation;
};

struct DecomposeSettings {
  std::string normal;
  std::string projector;
  std::string frame;  // optional frame conversion after the split
  std::string coframe;
  std::string connection;
  std::vector<std::pair<std::string, Expr>> equations;
};

struct NamedEquation {
  std::string name;
  TensorEquation equation;
};

/// A parsed `.tsys` file.
struct SystemDefinition {
  std::string name = "system";
  std::string solution;
  Boundary boundary = Boundary::Periodic;
  SymbolTable table;
  RuleSet rules;
  RuleSet component_rules;
  DecomposeSettings decompose;
  std::vector<NamedEquation> evolution;
  std::vector<NamedEquation> constraints;
  std::vector<SetterDef> setters;
  std::map<std::string, double> params;  // declared parameters and defaults

  std::set<std::string> param_names() const;
};

/// Sections: [system] [indices] [tensors] [params] [rules]
/// [component_rules] [decompose] [evolution] [constraints] [setters].
/// `#` starts a comment; an indented line continues the previous entry.
/// Relative `include` paths resolve against `base_dir`.
SystemDefinition parse_system(std::string_view text, const std::filesystem::path& base_dir = {});
SystemDefinition load_system(const std::string& path);

/// Parses `lhs` as a single tensor with coefficient 1.
TensorFactor parse_lhs(std::string_view text, const SymbolTable& table);

}  // namespace tensorc
