#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tensorc/expr.hpp"
#include "tensorc/rewrite.hpp"
#include "tensorc/scalar_expr.hpp"
#include "tensorc/symbol.hpp"

namespace tensorc {

/// Component value range of a slot. Spatial symbols whose slots accept
/// several kinds use the narrowest one, so E[st|s, st|s] has spatial
/// components only.
std::pair<int, int> component_range(const TensorSymbol& symbol, int slot, const SymbolTable& table);

/// Canonical form of a literal index tuple: values sorted descending inside
/// every symmetry group. sign is 0 for a repeated value in an
/// antisymmetric group.
struct CanonicalTuple {
  std::vector<int> values;
  int sign = 1;
};
CanonicalTuple canonical_tuple(const TensorSymbol& symbol, std::vector<int> values);

/// Canonical tuples in lexicographic order; for a symmetric pair this is
/// 11, 21, 22, 31, 32, 33.
std::vector<std::vector<int>> independent_components(const TensorSymbol& symbol, const SymbolTable& table);
/// Same enumeration over explicit per-slot ranges.
std::vector<std::vector<int>> independent_components(const TensorSymbol& symbol,
                                                     const std::vector<std::pair<int, int>>& ranges);

struct ComponentRef {
  std::string name;  // empty when sign == 0
  int sign = 1;
};

/// "E21" for E(1,2) with E symmetric; sign -1 for an odd antisymmetric
/// permutation and 0 on an antisymmetric diagonal.
ComponentRef component_name(const TensorSymbol& symbol, const std::vector<int>& values,
                            const SymbolTable& table);
/// "D1B12".
std::string derivative_name(int direction, const std::string& component);

/// Replaces every dummy by the sum over its kind's range, then canonicalizes.
Expr expand_sums(const Expr& expr, const SymbolTable& table);

/// Substitutes literal values for abstract labels.
Expr substitute(const Expr& expr, const std::map<std::string, int>& values);

/// d/dt lhs = rhs, with lhs a tensor whose indices are the rhs free indices.
struct TensorEquation {
  TensorFactor lhs;
  Expr rhs;
};

struct ComponentEquation {
  std::string lhs_name;   // e.g. "B11rhs"
  std::string component;  // e.g. "B11"
  ScalarExpr rhs;
};

/// Resolves a dummy-free, fully literal expression into component and
/// derivative names. Surviving CD/LD factors, second derivatives or
/// abstract indices raise Error(Component).
ScalarExpr to_scalar(const Expr& expr, const SymbolTable& table);

/// One equation per independent component of the lhs symbol, over the
/// ranges of the lhs index kinds. `component_rules` run after sum
/// expansion, on literal-index expressions.
std::vector<ComponentEquation> to_component_equations(const TensorEquation& equation,
                                                      const SymbolTable& table,
                                                      const RuleSet* component_rules = nullptr,
                                                      const std::string& suffix = "rhs");

/// Numeric values for brute-force evaluation of abstract expressions.
struct ValueProvider {
  std::function<double(const std::string& name, const std::vector<int>& values)> tensor;
  std::function<double(int direction, const std::string& name, const std::vector<int>& values)> derivative;
};

/// Evaluates an expression at fixed free-index values by explicit loops
/// over every dummy. Constant symbols use their built-in values.
double evaluate(const Expr& expr, const std::map<std::string, int>& free_values,
                const ValueProvider& values, const SymbolTable& table);

}  // namespace tensorc
