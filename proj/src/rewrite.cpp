#include "tensorc/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "tensorc/canonicalize.hpp"
#include "tensorc/parser.hpp"

namespace tensorc {

namespace {

struct Bound {
  Index target;
  bool flip = false;  // wildcards: target variance differs from the pattern's
};

using Bindings = std::map<std::string, Bound>;
using Done = std::function<bool(Bindings&, int)>;

std::set<std::string> pattern_dummies(const Term& lhs) {
  std::map<std::string, int> count;
  for_each_index(lhs.factors, [&](const Index& ix) {
    if (!ix.is_literal()) ++count[ix.label];
  });
  std::set<std::string> out;
  for (const auto& [label, n] : count) {
    if (n == 2) out.insert(label);
  }
  return out;
}

class Matcher {
 public:
  Matcher(const SymbolTable& table, const std::set<std::string>& dummies)
      : table_(table), dummies_(dummies) {}

  bool match_list(const std::vector<Factor>& pat, std::size_t pi, const std::vector<Factor>& tgt,
                  std::vector<bool>& used, bool exact, Bindings& b, int sign, const Done& done) const {
    if (pi == pat.size()) {
      if (exact && std::find(used.begin(), used.end(), false) != used.end()) return false;
      return done(b, sign);
    }
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      bool ok = match_factor(pat[pi], tgt[j], b, sign, [&](Bindings& b2, int s2) {
        return match_list(pat, pi + 1, tgt, used, exact, b2, s2, done);
      });
      used[j] = false;
      if (ok) return true;
    }
    return false;
  }

 private:
  bool match_index(const Index& p, const Index& t, Bindings& b) const {
    if (p.wildcard) {
      auto it = b.find(p.label);
      if (it != b.end()) {
        // second occurrence: the two targets must form a contraction
        const Index& first = it->second.target;
        return !t.is_literal() && !first.is_literal() && t.label == first.label &&
               t.kind == first.kind && t.variance != first.variance;
      }
      if (dummies_.contains(p.label) && t.is_literal()) return false;
      b.emplace(p.label, Bound{t, p.variance != t.variance});
      return true;
    }
    if (p.is_literal()) return t.is_literal() && t.value == p.value;
    if (t.is_literal()) {
      if (dummies_.contains(p.label)) return false;
      if (!table_.kinds().at(p.kind).contains(t.value)) return false;
    } else if (t.kind != p.kind || t.variance != p.variance) {
      return false;
    }
    auto it = b.find(p.label);
    if (it != b.end()) return it->second.target.same_slot_identity(t);
    b.emplace(p.label, Bound{t, false});
    return true;
  }

  bool match_factor(const Factor& p, const Factor& t, const Bindings& b, int sign, const Done& cont) const {
    if (p.is_tensor() != t.is_tensor()) return false;
    if (p.is_tensor()) {
      const auto& pt = p.tensor();
      const auto& tt = t.tensor();
      if (pt.name != tt.name || pt.indices.size() != tt.indices.size() || pt.power != tt.power) return false;
      const auto& sym = table_.at(tt.name);
      for (const auto& perm : sym.permutations) {
        Bindings trial = b;
        bool ok = true;
        for (std::size_t s = 0; s < pt.indices.size() && ok; ++s) {
          ok = match_index(pt.indices[s], tt.indices[static_cast<std::size_t>(perm.perm[s])], trial);
        }
        if (ok && cont(trial, sign * perm.sign)) return true;
      }
      return false;
    }
    const auto& pd = p.derivative();
    const auto& td = t.derivative();
    if (pd.op != td.op || pd.vector != td.vector || pd.operand.size() != td.operand.size()) return false;
    Bindings trial = b;
    if (pd.op != DerivativeOp::Lie && !match_index(pd.direction, td.direction, trial)) return false;
    std::vector<bool> used(td.operand.size(), false);
    return match_list(pd.operand, 0, td.operand, used, true, trial, sign, cont);
  }

  const SymbolTable& table_;
  const std::set<std::string>& dummies_;
};

Expr instantiate(const RewriteRule& rule, const Bindings& b, const std::set<std::string>& avoid,
                 const SymbolTable& table) {
  Expr out;
  for (const auto& rt : rule.rhs.terms) {
    Term t{rt.coefficient / rule.lhs.coefficient, rt.factors};
    std::set<std::string> used = avoid;
    std::map<std::string, std::string> fresh;
    for_each_index(t.factors, [&](Index& ix) {
      if (ix.is_literal()) return;
      auto it = b.find(ix.label);
      if (ix.wildcard) {
        const Bound& bound = it->second;
        Variance v = bound.flip ? opposite(ix.variance) : ix.variance;
        ix = bound.target;
        ix.variance = v;
        return;
      }
      if (it != b.end()) {
        Variance v = ix.variance;
        ix = it->second.target;
        ix.variance = v;
        return;
      }
      auto f = fresh.find(ix.label);
      if (f == fresh.end()) {
        f = fresh.emplace(ix.label, fresh_label(table.kinds().at(ix.kind), used)).first;
      }
      ix.label = f->second;
    });
    out.terms.push_back(std::move(t));
  }
  return out;
}

bool apply_at(const Term& term, const RewriteRule& rule, const std::set<std::string>& avoid,
              const SymbolTable& table, Expr& out) {
  for (std::size_t i = 0; i < term.factors.size(); ++i) {
    if (term.factors[i].is_tensor()) continue;
    const auto& d = term.factors[i].derivative();
    Expr inner;
    if (!apply_at(Term{1, d.operand}, rule, avoid, table, inner)) continue;
    out = {};
    for (auto& r : inner.terms) {
      if (r.factors.empty()) continue;
      Term t{term.coefficient * r.coefficient, term.factors};
      t.factors[i] = make_derivative(d.op, std::move(r.factors), d.direction, d.vector);
      out.terms.push_back(std::move(t));
    }
    return true;
  }
  const std::set<std::string> dummies = pattern_dummies(rule.lhs);
  Matcher m(table, dummies);
  std::vector<bool> used(term.factors.size(), false);
  Bindings b;
  Bindings found;
  std::vector<bool> consumed;
  int found_sign = 0;
  bool ok = m.match_list(rule.lhs.factors, 0, term.factors, used, false, b, 1, [&](Bindings& b2, int s) {
    found = b2;
    found_sign = s;
    consumed = used;
    return true;
  });
  if (!ok) return false;
  Expr rhs = instantiate(rule, found, avoid, table);
  out = {};
  for (auto& r : rhs.terms) {
    Term t{term.coefficient * found_sign * r.coefficient, {}};
    for (std::size_t j = 0; j < term.factors.size(); ++j) {
      if (!consumed[j]) t.factors.push_back(term.factors[j]);
    }
    t.factors.insert(t.factors.end(), r.factors.begin(), r.factors.end());
    out.terms.push_back(std::move(t));
  }
  return true;
}

Index wildcard(std::string label, Variance v) {
  Index ix;
  ix.label = "*" + std::move(label);
  ix.variance = v;
  ix.wildcard = true;
  return ix;
}

std::string letter(const SymbolTable& table, int kind, std::size_t n) {
  return std::string(1, table.kinds().at(kind).letters.at(n));
}

}  // namespace

RewriteRule make_rule(std::string name, Term lhs, Expr rhs) {
  if (lhs.coefficient == 0 || lhs.factors.empty()) {
    throw Error(ErrorCode::Rule, "rule '" + name + "': the pattern must be a nonzero product of factors");
  }
  std::map<std::string, int> count;
  for (const auto& f : lhs.factors) {
    std::vector<Factor> one{f};
    std::set<std::string> in_factor;
    for_each_index(one, [&](const Index& ix) {
      if (ix.is_literal()) return;
      ++count[ix.label];
      if (f.is_tensor() && !in_factor.insert(ix.label).second) {
        throw Error(ErrorCode::Rule, "rule '" + name + "': pattern index '" + ix.label +
                                         "' repeated within one factor");
      }
    });
  }
  for (const auto& t : rhs.terms) {
    std::map<std::string, int> rc;
    for_each_index(t.factors, [&](const Index& ix) {
      if (!ix.is_literal()) ++rc[ix.label];
    });
    for (const auto& [label, n] : rc) {
      if (n == 1 && count[label] != 1) {
        throw Error(ErrorCode::Rule, "rule '" + name + "': rhs free index '" + label +
                                         "' is not a free index of the lhs");
      }
    }
  }
  return RewriteRule{std::move(name), std::move(lhs), std::move(rhs)};
}

RewriteRule define_rule(std::string_view lhs, std::string_view rhs, std::string name,
                        const SymbolTable& table) {
  Expr l = parse_expression(lhs, table);
  if (l.terms.size() != 1) {
    throw Error(ErrorCode::Rule, "rule '" + name + "': the lhs must be a single term");
  }
  Expr r = parse_expression(rhs, table);
  return make_rule(std::move(name), l.terms.front(), std::move(r));
}

RuleSet projection_rules(const SymbolTable& table, std::string_view symbol,
                         std::string_view projector, std::string_view normal) {
  const auto& T = table.at(symbol);
  const auto& h = table.at(projector);
  const auto& n = table.at(normal);
  if (T.attribute != Attribute::Spatial) {
    throw Error(ErrorCode::Rule, "projection rules need a spatial symbol; '" + T.name + "' is not");
  }
  if (h.rank() != 2 || n.rank() != 1) {
    throw Error(ErrorCode::Rule, "projector must have rank 2 and normal rank 1");
  }
  const int kind = h.slots[0].kinds.front();
  RuleSet out;
  for (int s = 0; s < T.rank(); ++s) {
    if (!T.slots[static_cast<std::size_t>(s)].allows_kind(kind)) {
      throw Error(ErrorCode::Rule, "slot " + std::to_string(s + 1) + " of '" + T.name +
                                       "' cannot hold " + table.kinds().at(kind).name + " indices");
    }
    std::vector<Index> pat, res;
    for (int q = 0; q < T.rank(); ++q) {
      if (q == s) {
        pat.push_back(wildcard("y", Variance::Up));
        res.push_back(wildcard("x", Variance::Down));
      } else {
        pat.push_back(wildcard(std::to_string(q), Variance::Down));
        res.push_back(wildcard(std::to_string(q), Variance::Down));
      }
    }
    const std::string slot = std::to_string(s + 1);
    out.add(make_rule(T.name + "_proj" + slot,
                      Term{1, {make_tensor(h.name, {wildcard("x", Variance::Down), wildcard("y", Variance::Down)}),
                               make_tensor(T.name, pat)}},
                      Expr{{Term{1, {make_tensor(T.name, res)}}}}));
    out.add(make_rule(T.name + "_orth" + slot,
                      Term{1, {make_tensor(n.name, {wildcard("y", Variance::Down)}), make_tensor(T.name, pat)}},
                      Expr{}));
  }
  return out;
}

RuleSet projection_rules_all(const SymbolTable& table, std::string_view projector,
                             std::string_view normal) {
  RuleSet out;
  const int kind = table.at(projector).slots.at(0).kinds.at(0);
  for (const auto* s : table.symbols()) {
    if (s->attribute != Attribute::Spatial) continue;
    // Constants like a spatial delta may live on the spatial kind only.
    const bool projectable = std::all_of(s->slots.begin(), s->slots.end(),
                                         [&](const Slot& slot) { return slot.allows_kind(kind); });
    if (s->constant == ConstantValue::None || projectable) {
      out.append(projection_rules(table, s->name, projector, normal));
    }
  }
  return out;
}

RewriteRule metric_split_rule(const SymbolTable& table, std::string_view metric,
                              std::string_view projector, std::string_view normal) {
  const auto& g = table.at(metric);
  const auto& h = table.at(projector);
  const auto& n = table.at(normal);
  auto a = wildcard("a", Variance::Down);
  auto b = wildcard("b", Variance::Down);
  Expr rhs{{Term{1, {make_tensor(h.name, {a, b})}}, Term{-1, {make_tensor(n.name, {a}), make_tensor(n.name, {b})}}}};
  return make_rule("metric_split", Term{1, {make_tensor(g.name, {a, b})}}, std::move(rhs));
}

RewriteRule normalization_rule(const SymbolTable& table, std::string_view normal) {
  const auto& n = table.at(normal);
  const std::string a = letter(table, n.slots[0].kinds.front(), 0);
  const std::string nn(n.name);
  return define_rule(nn + "[u_" + a + "]*" + nn + "[l_" + a + "]", "-1", "normalization", table);
}

RewriteRule normal_split_rule(const SymbolTable& table, std::string_view normal,
                              std::string_view time_vector, std::string_view lapse,
                              std::string_view shift) {
  const auto& n = table.at(normal);
  (void)table.at(time_vector);
  (void)table.at(lapse);
  (void)table.at(shift);
  const std::string a = letter(table, n.slots[0].kinds.front(), 0);
  const std::string up = "[u_" + a + "]";
  return define_rule(std::string(normal) + up,
                     std::string(time_vector) + up + "*" + std::string(lapse) + "^-1 - " +
                         std::string(shift) + up + "*" + std::string(lapse) + "^-1",
                     "normal_split", table);
}

RuleSet frame_conversion_rules(const SymbolTable& table, std::string_view frame,
                               std::string_view coframe, std::string_view connection) {
  const auto& e = table.at(frame);
  const auto& b = table.at(coframe);
  const auto& gamma = table.at(connection);
  if (e.rank() != 2 || b.rank() != 2 || gamma.rank() != 3) {
    throw Error(ErrorCode::Rule, "frame and co-frame need rank 2, the connection rank 3");
  }
  const int fk = e.slots[0].kinds.front();
  const int sk = e.slots[1].kinds.front();
  RuleSet out;
  for (const auto* T : table.symbols()) {
    if (T->attribute != Attribute::Spatial) continue;
    if (T->name == e.name || T->name == b.name || T->name == gamma.name) continue;
    for (int s = 0; s < T->rank(); ++s) {
      const Slot& slot = T->slots[static_cast<std::size_t>(s)];
      if (!slot.allows_kind(fk) || !slot.allows_kind(sk)) continue;
      for (Variance v : slot.variances) {
        std::vector<Index> pat, res;
        const Index a = Index::abstract(letter(table, sk, 0), sk, v);
        const Index i = Index::abstract(letter(table, fk, 0), fk, v);
        for (int q = 0; q < T->rank(); ++q) {
          Index w = wildcard(std::to_string(q), Variance::Down);
          pat.push_back(q == s ? a : w);
          res.push_back(q == s ? i : w);
        }
        Factor conv = v == Variance::Up
                          ? make_tensor(e.name, {Index::abstract(i.label, fk, Variance::Down), a})
                          : make_tensor(b.name, {Index::abstract(i.label, fk, Variance::Up), a});
        const std::string name = T->name + (v == Variance::Up ? "_toframe_up" : "_toframe_down") +
                                 std::to_string(s + 1);
        out.add(make_rule(name, Term{1, {make_tensor(T->name, pat)}},
                          Expr{{Term{1, {make_tensor(T->name, res), conv}}}}));
      }
    }
  }
  const std::string j = letter(table, fk, 1), k = letter(table, fk, 2), i = letter(table, fk, 0);
  const std::string a = letter(table, sk, 0), c = letter(table, sk, 1);
  out.add(define_rule(b.name + "[u_" + j + ",l_" + a + "]*" + e.name + "[l_" + k + ",u_" + c + "]*CD(" + e.name +
                          "[l_" + i + ",u_" + a + "],l_" + c + ")",
                      gamma.name + "[l_" + k + ",u_" + j + ",l_" + i + "]", "connection", table));
  return out;
}

bool apply_once(const Term& term, const RewriteRule& rule, const SymbolTable& table, Expr& out) {
  auto labels = labels_in(term);
  std::set<std::string> avoid(labels.begin(), labels.end());
  return apply_at(term, rule, avoid, table, out);
}

ApplyResult apply_rules_traced(const Expr& expr, const RuleSet& rules, const SymbolTable& table) {
  constexpr int kSweepLimit = 4096;
  Expr cur = canonicalize(expr, table);
  for (int pass = 1; pass <= rules.max_passes; ++pass) {
    bool changed = false;
    for (const auto& rule : rules.rules) {
      for (int sweep = 0;; ++sweep) {
        if (sweep >= kSweepLimit) {
          throw NonConvergenceError("rule '" + rule.name + "' keeps matching after " +
                                        std::to_string(kSweepLimit) + " sweeps; last: " + to_string(cur),
                                    cur);
        }
        Expr next;
        bool any = false;
        for (const auto& t : cur.terms) {
          Expr r;
          if (apply_once(t, rule, table, r)) {
            any = true;
            next = next + r;
          } else {
            next.terms.push_back(t);
          }
        }
        if (!any) break;
        next = canonicalize(next, table);
        if (next == cur) break;
        cur = std::move(next);
        changed = true;
      }
    }
    if (!changed) return {cur, pass};
  }
  throw NonConvergenceError("no fixpoint after " + std::to_string(rules.max_passes) +
                                " passes; last: " + to_string(cur),
                            cur);
}

Expr apply_rules(const Expr& expr, const RuleSet& rules, const SymbolTable& table) {
  return apply_rules_traced(expr, rules, table).expr;
}

std::vector<Projection> decompose(const Expr& equation, std::string_view normal,
                                  std::string_view projector, const RuleSet& rules,
                                  const SymbolTable& table) {
  const auto& n = table.at(normal);
  const auto& h = table.at(projector);
  const Expr eq = canonicalize(equation, table);
  const std::vector<Index> free = free_indices(eq);
  for (const auto& ix : free) {
    if (ix.is_literal() || !n.slots[0].allows_kind(ix.kind)) {
      throw Error(ErrorCode::Index, "cannot decompose along free index '" + to_string(ix) +
                                        "': not of the normal's index kind");
    }
  }
  std::set<std::string> used;
  for (const auto& t : eq.terms) {
    for (auto& l : labels_in(t)) used.insert(std::move(l));
  }
  const std::size_t k = free.size();
  std::vector<Projection> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Expr cur = eq;
    std::set<std::string> avoid = used;
    std::string tag;
    for (std::size_t q = 0; q < k; ++q) {
      const Index& x = free[q];
      const bool tangential = (mask >> q) & 1U;
      if (!tag.empty()) tag += ",";
      tag += x.label + (tangential ? ":tangential" : ":normal");
      Index contracted = x;
      contracted.variance = opposite(x.variance);
      if (!tangential) {
        cur = cur * Expr{{Term{1, {make_tensor(n.name, {contracted})}}}};
        continue;
      }
      const std::string y = fresh_label(table.kinds().at(x.kind), avoid);
      for (auto& t : cur.terms) {
        for_each_index(t.factors, [&](Index& ix) {
          if (!ix.is_literal() && ix.label == x.label) ix.label = y;
        });
      }
      Index yi = contracted;
      yi.label = y;
      cur = cur * Expr{{Term{1, {make_tensor(h.name, {x, yi})}}}};
    }
    if (k == 0) tag = "scalar";
    out.push_back({tag, apply_rules(cur, rules, table)});
  }
  return out;
}

}  // namespace tensorc
