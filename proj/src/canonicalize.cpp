#include "tensorc/canonicalize.hpp"

#include <algorithm>
#include <map>

#include "tensorc/error.hpp"

namespace tensorc {

std::string canonical_label(const IndexKind& kind, int ordinal, const std::set<std::string>& avoid) {
  int seen = 0;
  for (int round = 0;; ++round) {
    for (char c : kind.letters) {
      std::string candidate(1, c);
      if (round > 0) candidate += std::to_string(round);
      if (avoid.contains(candidate)) continue;
      if (seen++ == ordinal) return candidate;
    }
  }
}

std::string fresh_label(const IndexKind& kind, std::set<std::string>& used) {
  std::string label = canonical_label(kind, 0, used);
  used.insert(label);
  return label;
}

int constant_value(const TensorSymbol& symbol, const std::vector<int>& values,
                   const SymbolTable& table) {
  if (symbol.constant == ConstantValue::Delta) return values.at(0) == values.at(1) ? 1 : 0;
  // Levi-Civita: +1/-1 on permutations of the top `rank` values of the
  // slot range, so a rank-3 symbol over 0..3 ranges over 1..3.
  const int hi = table.slot_range(symbol.slots.front()).second;
  const int lo = hi - symbol.rank() + 1;
  std::vector<int> v = values;
  for (int x : v) {
    if (x < lo || x > hi) return 0;
  }
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) sign = -sign;
    }
  }
  return sign;
}

namespace {

std::vector<Term> expand_product(const std::vector<Factor>& factors, const SymbolTable& table);

bool all_literal(const TensorFactor& t) {
  return std::all_of(t.indices.begin(), t.indices.end(), [](const Index& ix) { return ix.is_literal(); });
}

// A factor written as a sum of products.
std::vector<Term> expand_factor(const Factor& f, const SymbolTable& table) {
  if (f.is_tensor()) {
    const auto& t = f.tensor();
    const TensorSymbol& sym = table.at(t.name);
    if (sym.constant != ConstantValue::None && all_literal(t)) {
      std::vector<int> values;
      for (const auto& ix : t.indices) values.push_back(ix.value);
      int v = constant_value(sym, values, table);
      if (v == 0) return {};
      return {Term{v, {}}};
    }
    return {Term{1, {f}}};
  }
  const auto& d = f.derivative();
  std::vector<Term> out;
  for (auto& ot : expand_product(d.operand, table)) {
    if (ot.factors.empty()) continue;
    if (d.op == DerivativeOp::Lie) {
      out.push_back(Term{ot.coefficient, {make_derivative(d.op, std::move(ot.factors), d.direction, d.vector)}});
      continue;
    }
    for (std::size_t k = 0; k < ot.factors.size(); ++k) {
      const Factor& fk = ot.factors[k];
      if (fk.is_tensor()) {
        const auto& sym = table.at(fk.tensor().name);
        if (sym.constant != ConstantValue::None) continue;
      }
      Term t{ot.coefficient, {}};
      for (std::size_t m = 0; m < ot.factors.size(); ++m) {
        if (m != k) t.factors.push_back(ot.factors[m]);
      }
      if (fk.is_tensor() && fk.tensor().indices.empty() && fk.tensor().power != 1) {
        const int p = fk.tensor().power;
        t.coefficient *= p;
        if (p - 1 != 0) t.factors.push_back(make_tensor(fk.tensor().name, {}, p - 1));
        t.factors.push_back(make_derivative(d.op, {make_tensor(fk.tensor().name, {})}, d.direction));
      } else {
        t.factors.push_back(make_derivative(d.op, {fk}, d.direction));
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<Term> expand_product(const std::vector<Factor>& factors, const SymbolTable& table) {
  std::vector<Term> acc{Term{1, {}}};
  for (const auto& f : factors) {
    auto alts = expand_factor(f, table);
    std::vector<Term> next;
    for (const auto& a : acc) {
      for (const auto& b : alts) {
        Term t{a.coefficient * b.coefficient, a.factors};
        t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
        next.push_back(std::move(t));
      }
    }
    acc = std::move(next);
    if (acc.empty()) break;
  }
  return acc;
}

void replace_label(std::vector<Factor>& factors, const std::string& label, const Index& with,
                   const Index* skip) {
  for_each_index(factors, [&](Index& ix) {
    if (&ix == skip) return;
    if (!ix.is_literal() && ix.label == label) {
      Index replacement = with;
      ix = replacement;
    }
  });
}

// Removes one Kronecker delta that is contracted with something else, or
// traces it. Returns true when the term changed.
bool eliminate_one_delta(Term& t, const SymbolTable& table) {
  std::map<std::string, int> counts;
  for_each_index(t.factors, [&](const Index& ix) {
    if (!ix.is_literal()) ++counts[ix.label];
  });
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    Factor& f = t.factors[fi];
    if (!f.is_tensor()) continue;
    const auto& sym = table.at(f.tensor().name);
    if (sym.constant != ConstantValue::Delta) continue;
    const Index p = f.tensor().indices[0];
    const Index q = f.tensor().indices[1];
    if (!p.is_literal() && !q.is_literal() && p.label == q.label) {
      t.coefficient *= table.kinds().at(p.kind).size();
      t.factors.erase(t.factors.begin() + static_cast<std::ptrdiff_t>(fi));
      return true;
    }
    for (int side = 0; side < 2; ++side) {
      const Index& contracted = side == 0 ? p : q;
      const Index& keep = side == 0 ? q : p;
      if (contracted.is_literal() || counts[contracted.label] != 2) continue;
      if (!keep.is_literal() && keep.kind != contracted.kind) continue;
      if (keep.is_literal() && !table.kinds().at(contracted.kind).contains(keep.value)) {
        t.coefficient = 0;
        return true;
      }
      std::vector<Factor> rest;
      for (std::size_t m = 0; m < t.factors.size(); ++m) {
        if (m != fi) rest.push_back(t.factors[m]);
      }
      replace_label(rest, contracted.label, keep, nullptr);
      t.factors = std::move(rest);
      return true;
    }
  }
  return false;
}

void merge_scalars(std::vector<Factor>& factors) {
  std::vector<Factor> out;
  std::map<std::string, std::size_t> where;
  for (auto& f : factors) {
    if (!f.is_tensor()) {
      auto& d = f.derivative();
      if (d.op != DerivativeOp::Partial) merge_scalars(d.operand);
      out.push_back(std::move(f));
      continue;
    }
    auto& t = f.tensor();
    if (!t.indices.empty()) {
      out.push_back(std::move(f));
      continue;
    }
    auto it = where.find(t.name);
    if (it == where.end()) {
      where.emplace(t.name, out.size());
      out.push_back(std::move(f));
    } else {
      out[it->second].tensor().power += t.power;
    }
  }
  std::erase_if(out, [](const Factor& f) {
    return f.is_tensor() && f.tensor().indices.empty() && f.tensor().power == 0;
  });
  factors = std::move(out);
}

Index masked(const Index& ix, const std::set<std::string>& dummies) {
  if (ix.is_literal() || !dummies.contains(ix.label)) return ix;
  Index m = ix;
  m.label = "~";
  return m;
}

Factor masked(const Factor& f, const std::set<std::string>& dummies) {
  Factor m = f;
  std::vector<Factor> wrap{m};
  for_each_index(wrap, [&](Index& ix) { ix = masked(ix, dummies); });
  return wrap.front();
}

int compare_masked(const Index& a, const Index& b, const std::set<std::string>& dummies) {
  if (int c = compare(masked(a, dummies), masked(b, dummies)); c != 0) return c;
  return compare(a, b);
}

// Sorts every symmetry group of every tensor factor; returns the sign, or
// 0 when an antisymmetric group holds a repeated index.
int sort_slots(std::vector<Factor>& factors, const SymbolTable& table, const std::set<std::string>& dummies) {
  int sign = 1;
  for (auto& f : factors) {
    if (!f.is_tensor()) {
      int s = sort_slots(f.derivative().operand, table, dummies);
      if (s == 0) return 0;
      sign *= s;
      continue;
    }
    auto& t = f.tensor();
    const auto& sym = table.at(t.name);
    for (const auto& g : sym.groups) {
      std::vector<Index> vals;
      for (int s : g.slots) vals.push_back(t.indices[static_cast<std::size_t>(s)]);
      // insertion sort, counting transpositions
      int swaps = 0;
      for (std::size_t i = 1; i < vals.size(); ++i) {
        for (std::size_t j = i; j > 0 && compare_masked(vals[j - 1], vals[j], dummies) > 0; --j) {
          std::swap(vals[j - 1], vals[j]);
          ++swaps;
        }
      }
      if (g.type == SymmetryType::Antisymmetric) {
        for (std::size_t i = 1; i < vals.size(); ++i) {
          if (vals[i - 1].same_slot_identity(vals[i])) return 0;
        }
        if (swaps % 2) sign = -sign;
      }
      for (std::size_t k = 0; k < g.slots.size(); ++k) t.indices[static_cast<std::size_t>(g.slots[k])] = vals[k];
    }
  }
  return sign;
}

void sort_factors(std::vector<Factor>& factors, const std::set<std::string>& dummies) {
  for (auto& f : factors) {
    if (!f.is_tensor()) sort_factors(f.derivative().operand, dummies);
  }
  std::vector<std::pair<Factor, Factor>> keyed;
  for (auto& f : factors) keyed.emplace_back(masked(f, dummies), std::move(f));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (int c = compare(a.first, b.first); c != 0) return c < 0;
    return compare(a.second, b.second) < 0;
  });
  factors.clear();
  for (auto& [k, f] : keyed) factors.push_back(std::move(f));
}

void rename_dummies(Term& t, const SymbolTable& table, const IndexCensus& c) {
  std::set<std::string> avoid;
  for (const auto& ix : c.free) avoid.insert(ix.label);
  std::set<std::string> dummies(c.dummies.begin(), c.dummies.end());
  std::map<std::string, std::string> renamed;
  std::map<int, int> next_ordinal;
  for_each_index(t.factors, [&](Index& ix) {
    if (ix.is_literal() || !dummies.contains(ix.label)) return;
    auto it = renamed.find(ix.label);
    if (it == renamed.end()) {
      int ord = next_ordinal[ix.kind]++;
      it = renamed.emplace(ix.label, canonical_label(table.kinds().at(ix.kind), ord, avoid)).first;
    }
    ix.label = it->second;
  });
}

// Returns the accumulated sign (0 if the term vanishes).
int canonical_order(Term& t, const SymbolTable& table) {
  std::vector<std::pair<Term, int>> history;
  int sign = 1;
  for (int iter = 0; iter < 32; ++iter) {
    IndexCensus c = census(t);
    std::set<std::string> dummies(c.dummies.begin(), c.dummies.end());
    int s = sort_slots(t.factors, table, dummies);
    if (s == 0) return 0;
    sign *= s;
    sort_factors(t.factors, dummies);
    rename_dummies(t, table, c);
    for (std::size_t h = 0; h < history.size(); ++h) {
      if (history[h].first.factors != t.factors) continue;
      if (history[h].second != sign) return 0;
      if (h + 1 == history.size()) return sign;
      // Cycle: settle on the smallest state of the cycle.
      std::size_t best = h;
      for (std::size_t k = h + 1; k < history.size(); ++k) {
        if (compare(history[k].first.factors, history[best].first.factors) < 0) best = k;
      }
      t.factors = history[best].first.factors;
      return history[best].second;
    }
    history.emplace_back(t, sign);
  }
  return sign;
}

}  // namespace

Expr canonicalize(const Expr& expr, const SymbolTable& table) {
  std::vector<Term> work;
  for (const auto& term : expr.terms) {
    for (auto& t : expand_product(term.factors, table)) {
      t.coefficient *= term.coefficient;
      work.push_back(std::move(t));
    }
  }
  std::vector<Term> done;
  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();
    if (t.coefficient == 0) continue;
    if (eliminate_one_delta(t, table)) {
      if (t.coefficient == 0) continue;
      for (auto& n : expand_product(t.factors, table)) {
        n.coefficient *= t.coefficient;
        work.push_back(std::move(n));
      }
      continue;
    }
    merge_scalars(t.factors);
    int sign = canonical_order(t, table);
    if (sign == 0) continue;
    t.coefficient *= sign;
    done.push_back(std::move(t));
  }
  std::stable_sort(done.begin(), done.end(),
                   [](const Term& a, const Term& b) { return compare(a.factors, b.factors) < 0; });
  Expr out;
  for (auto& t : done) {
    if (!out.terms.empty() && out.terms.back().factors == t.factors) {
      out.terms.back().coefficient += t.coefficient;
    } else {
      out.terms.push_back(std::move(t));
    }
  }
  std::erase_if(out.terms, [](const Term& t) { return t.coefficient == 0; });
  return out;
}

}  // namespace tensorc
