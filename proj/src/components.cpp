#include "tensorc/components.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tensorc/canonicalize.hpp"
#include "tensorc/error.hpp"

namespace tensorc {

std::pair<int, int> component_range(const TensorSymbol& symbol, int slot, const SymbolTable& table) {
  const Slot& s = symbol.slots.at(static_cast<std::size_t>(slot));
  if (symbol.attribute != Attribute::Spatial || s.kinds.size() == 1) return table.slot_range(s);
  std::pair<int, int> best = table.slot_range(s);
  for (int k : s.kinds) {
    const auto& kind = table.kinds().at(k);
    if (kind.size() < best.second - best.first + 1) best = {kind.lo, kind.hi};
  }
  return best;
}

CanonicalTuple canonical_tuple(const TensorSymbol& symbol, std::vector<int> values) {
  CanonicalTuple out{std::move(values), 1};
  for (const auto& g : symbol.groups) {
    std::vector<int> v;
    for (int s : g.slots) v.push_back(out.values[static_cast<std::size_t>(s)]);
    int swaps = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      for (std::size_t j = i; j > 0 && v[j - 1] < v[j]; --j) {
        std::swap(v[j - 1], v[j]);
        ++swaps;
      }
    }
    if (g.type == SymmetryType::Antisymmetric) {
      for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i - 1] == v[i]) out.sign = 0;
      }
      if (swaps % 2) out.sign = -out.sign;
    }
    for (std::size_t k = 0; k < g.slots.size(); ++k) out.values[static_cast<std::size_t>(g.slots[k])] = v[k];
  }
  return out;
}

std::vector<std::vector<int>> independent_components(const TensorSymbol& symbol,
                                                     const std::vector<std::pair<int, int>>& ranges) {
  std::vector<std::vector<int>> out;
  const std::size_t rank = ranges.size();
  std::vector<int> cur(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    if (ranges[i].first > ranges[i].second) return out;
    cur[i] = ranges[i].first;
  }
  while (true) {
    auto c = canonical_tuple(symbol, cur);
    if (c.sign != 0 && c.values == cur) out.push_back(cur);
    std::size_t pos = rank;
    while (pos > 0) {
      --pos;
      if (cur[pos] < ranges[pos].second) {
        ++cur[pos];
        break;
      }
      cur[pos] = ranges[pos].first;
      if (pos == 0) return out;
    }
    if (rank == 0) return out;
  }
}

std::vector<std::vector<int>> independent_components(const TensorSymbol& symbol, const SymbolTable& table) {
  std::vector<std::pair<int, int>> ranges;
  for (int s = 0; s < symbol.rank(); ++s) ranges.push_back(component_range(symbol, s, table));
  return independent_components(symbol, ranges);
}

ComponentRef component_name(const TensorSymbol& symbol, const std::vector<int>& values,
                            const SymbolTable& table) {
  if (static_cast<int>(values.size()) != symbol.rank()) {
    throw Error(ErrorCode::Component, "'" + symbol.name + "' expects " + std::to_string(symbol.rank()) +
                                          " index values");
  }
  for (int s = 0; s < symbol.rank(); ++s) {
    auto [lo, hi] = table.slot_range(symbol.slots[static_cast<std::size_t>(s)]);
    int v = values[static_cast<std::size_t>(s)];
    if (v < lo || v > hi) {
      throw Error(ErrorCode::Component, "index value " + std::to_string(v) + " out of range for slot " +
                                            std::to_string(s + 1) + " of '" + symbol.name + "'");
    }
  }
  auto c = canonical_tuple(symbol, values);
  if (c.sign == 0) return {"", 0};
  std::string name = symbol.name;
  for (int v : c.values) name += std::to_string(v);
  return {name, c.sign};
}

std::string derivative_name(int direction, const std::string& component) {
  if (direction < 1 || direction > 3) {
    throw Error(ErrorCode::Component, "derivative direction " + std::to_string(direction) +
                                          " is not spatial (expected 1..3)");
  }
  return "D" + std::to_string(direction) + component;
}

Expr substitute(const Expr& expr, const std::map<std::string, int>& values) {
  Expr out = expr;
  for (auto& t : out.terms) {
    for_each_index(t.factors, [&](Index& ix) {
      if (ix.is_literal()) return;
      auto it = values.find(ix.label);
      if (it == values.end()) return;
      ix = Index::literal(it->second, ix.variance);
    });
  }
  return out;
}

namespace {

struct DummyRange {
  std::string label;
  int lo = 0;
  int hi = 0;
};

std::vector<DummyRange> dummy_ranges(const Term& t, const SymbolTable& table) {
  const IndexCensus c = census(t);
  std::vector<DummyRange> out;
  for (const auto& label : c.dummies) {
    int kind = -1;
    for_each_index(t.factors, [&](const Index& ix) {
      if (ix.label == label) kind = ix.kind;
    });
    const auto& k = table.kinds().at(kind);
    out.push_back({label, k.lo, k.hi});
  }
  return out;
}

// Calls fn for every assignment of values to the dummies.
void for_each_assignment(const std::vector<DummyRange>& dummies,
                         const std::function<void(const std::map<std::string, int>&)>& fn) {
  std::map<std::string, int> cur;
  for (const auto& d : dummies) cur[d.label] = d.lo;
  while (true) {
    fn(cur);
    std::size_t pos = dummies.size();
    bool advanced = false;
    while (pos > 0) {
      --pos;
      const auto& d = dummies[pos];
      if (cur[d.label] < d.hi) {
        ++cur[d.label];
        advanced = true;
        break;
      }
      cur[d.label] = d.lo;
    }
    if (!advanced) return;
  }
}

std::vector<int> literal_values(const std::vector<Index>& indices, const std::string& where) {
  std::vector<int> out;
  for (const auto& ix : indices) {
    if (!ix.is_literal()) {
      throw Error(ErrorCode::Component, "abstract index '" + ix.label + "' remains in '" + where + "'");
    }
    out.push_back(ix.value);
  }
  return out;
}

}  // namespace

Expr expand_sums(const Expr& expr, const SymbolTable& table) {
  Expr out;
  for (const auto& t : expr.terms) {
    for_each_assignment(dummy_ranges(t, table), [&](const std::map<std::string, int>& values) {
      Expr one{{t}};
      out = out + substitute(one, values);
    });
  }
  return canonicalize(out, table);
}

ScalarExpr to_scalar(const Expr& expr, const SymbolTable& table) {
  ScalarExpr out;
  for (const auto& t : expr.terms) {
    Monomial m{t.coefficient, {}};
    bool zero = false;
    for (const auto& f : t.factors) {
      const std::string text = to_string(f);
      if (f.is_tensor()) {
        const auto& tf = f.tensor();
        const auto& sym = table.at(tf.name);
        if (sym.rank() == 0) {
          m.powers.emplace_back(tf.name, tf.power);
          continue;
        }
        auto values = literal_values(tf.indices, text);
        if (sym.constant != ConstantValue::None) {
          int v = constant_value(sym, values, table);
          if (v == 0) zero = true;
          m.coefficient *= v;
          continue;
        }
        auto ref = component_name(sym, values, table);
        if (ref.sign == 0) {
          zero = true;
          continue;
        }
        m.coefficient *= ref.sign;
        m.powers.emplace_back(ref.name, tf.power);
        continue;
      }
      const auto& d = f.derivative();
      if (d.op != DerivativeOp::Partial) {
        throw Error(ErrorCode::Component, "cannot resolve '" + text + "' to grid-function components");
      }
      if (d.operand.size() != 1 || !d.operand.front().is_tensor()) {
        throw Error(ErrorCode::Component, "only first partial derivatives of single grid functions are supported: '" +
                                              text + "'");
      }
      const auto& tf = d.operand.front().tensor();
      const auto& sym = table.at(tf.name);
      if (!d.direction.is_literal()) {
        throw Error(ErrorCode::Component, "abstract index '" + d.direction.label + "' remains in '" + text + "'");
      }
      if (sym.constant != ConstantValue::None) {
        zero = true;
        continue;
      }
      std::string comp = tf.name;
      if (sym.rank() > 0) {
        auto ref = component_name(sym, literal_values(tf.indices, text), table);
        if (ref.sign == 0) {
          zero = true;
          continue;
        }
        m.coefficient *= ref.sign;
        comp = ref.name;
      }
      if (tf.power != 1) {
        throw Error(ErrorCode::Component, "derivative of a power survives in '" + text + "'");
      }
      m.powers.emplace_back(derivative_name(d.direction.value, comp), 1);
    }
    if (!zero) out.add(std::move(m));
  }
  out.finalize();
  return out;
}

std::vector<ComponentEquation> to_component_equations(const TensorEquation& equation,
                                                      const SymbolTable& table,
                                                      const RuleSet* component_rules,
                                                      const std::string& suffix) {
  const auto& sym = table.at(equation.lhs.name);
  if (static_cast<int>(equation.lhs.indices.size()) != sym.rank()) {
    throw Error(ErrorCode::Component, "lhs '" + equation.lhs.name + "' has the wrong number of indices");
  }
  std::vector<std::pair<int, int>> ranges;
  std::set<std::string> labels;
  for (const auto& ix : equation.lhs.indices) {
    if (ix.is_literal() || !labels.insert(ix.label).second) {
      throw Error(ErrorCode::Component, "lhs '" + equation.lhs.name + "' needs distinct abstract indices");
    }
    const auto& k = table.kinds().at(ix.kind);
    ranges.emplace_back(k.lo, k.hi);
  }
  const auto free = free_indices(equation.rhs);
  for (const auto& ix : free) {
    if (!labels.contains(ix.label)) {
      throw Error(ErrorCode::Index, "rhs free index '" + ix.label + "' does not appear on the lhs of '" +
                                        equation.lhs.name + "'");
    }
  }
  if (!equation.rhs.is_zero() && free.size() != labels.size()) {
    throw Error(ErrorCode::Index, "lhs and rhs free indices differ for '" + equation.lhs.name + "'");
  }
  std::vector<ComponentEquation> out;
  for (const auto& tuple : independent_components(sym, ranges)) {
    std::map<std::string, int> values;
    for (std::size_t s = 0; s < tuple.size(); ++s) values[equation.lhs.indices[s].label] = tuple[s];
    Expr expanded = expand_sums(substitute(equation.rhs, values), table);
    if (component_rules) expanded = apply_rules(expanded, *component_rules, table);
    auto ref = component_name(sym, tuple, table);
    out.push_back({ref.name + suffix, ref.name, to_scalar(expanded, table)});
  }
  return out;
}

double evaluate(const Expr& expr, const std::map<std::string, int>& free_values,
                const ValueProvider& values, const SymbolTable& table) {
  double total = 0;
  for (const auto& term : expr.terms) {
    const Expr fixed = substitute(Expr{{term}}, free_values);
    const Term& t = fixed.terms.front();
    for_each_assignment(dummy_ranges(t, table), [&](const std::map<std::string, int>& dv) {
      const Term lit = substitute(Expr{{t}}, dv).terms.front();
      double v = to_double(lit.coefficient);
      for (const auto& f : lit.factors) {
        const std::string text = to_string(f);
        if (f.is_tensor()) {
          const auto& tf = f.tensor();
          const auto& sym = table.at(tf.name);
          auto vals = literal_values(tf.indices, text);
          double x = sym.constant != ConstantValue::None ? constant_value(sym, vals, table)
                                                         : values.tensor(tf.name, vals);
          v *= std::pow(x, tf.power);
          continue;
        }
        const auto& d = f.derivative();
        if (d.op != DerivativeOp::Partial || d.operand.size() != 1 || !d.operand.front().is_tensor()) {
          throw Error(ErrorCode::Component, "cannot evaluate '" + text + "'");
        }
        const auto& tf = d.operand.front().tensor();
        const auto& sym = table.at(tf.name);
        if (!d.direction.is_literal()) {
          throw Error(ErrorCode::Component, "abstract index '" + d.direction.label + "' remains in '" + text + "'");
        }
        if (sym.constant != ConstantValue::None) {
          v = 0;
          continue;
        }
        v *= values.derivative(d.direction.value, tf.name, literal_values(tf.indices, text));
      }
      total += v;
    });
  }
  return total;
}

}  // namespace tensorc
