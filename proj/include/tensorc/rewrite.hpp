#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tensorc/error.hpp"
#include "tensorc/expr.hpp"
#include "tensorc/symbol.hpp"

namespace tensorc {

/// lhs is a single-term pattern. Its abstract labels are pattern variables
/// restricted to their kind and variance; wildcard indices (generated rules
/// only) match any index and hand its variance on to the rhs.
struct RewriteRule {
  std::string name;
  Term lhs;
  Expr rhs;
};

struct RuleSet {
  std::vector<RewriteRule> rules;
  int max_passes = 64;

  void add(RewriteRule rule) { rules.push_back(std::move(rule)); }
  void append(const RuleSet& other) {
    rules.insert(rules.end(), other.rules.begin(), other.rules.end());
  }
};

/// Thrown by apply_rules when no fixpoint is reached; carries the last
/// expression.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, Expr last)
      : Error(ErrorCode::NonConvergence, message), last_(std::move(last)) {}
  const Expr& last() const { return last_; }

 private:
  Expr last_;
};

RewriteRule define_rule(std::string_view lhs, std::string_view rhs, std::string name,
                        const SymbolTable& table);
/// Validates an already-built rule (rhs free indices covered by the lhs,
/// no label repeated within one lhs factor).
RewriteRule make_rule(std::string name, Term lhs, Expr rhs);

/// For every slot of a spatial symbol: `h[x,y] T[..y..] -> T[..x..]` and
/// `n[y] T[..y..] -> 0`. Both contracted variances are covered by one rule.
RuleSet projection_rules(const SymbolTable& table, std::string_view symbol,
                         std::string_view projector, std::string_view normal);
/// Projection rules for every spatial symbol of the table (constants only
/// when all their slots accept the projector's kind).
RuleSet projection_rules_all(const SymbolTable& table, std::string_view projector,
                             std::string_view normal);
/// g_ab -> h_ab - n_a n_b, for any variances of g.
RewriteRule metric_split_rule(const SymbolTable& table, std::string_view metric,
                              std::string_view projector, std::string_view normal);
/// n^a n_a -> -1.
RewriteRule normalization_rule(const SymbolTable& table, std::string_view normal);
/// n^a -> t^a / alpha - beta^a / alpha.
RewriteRule normal_split_rule(const SymbolTable& table, std::string_view normal,
                              std::string_view time_vector, std::string_view lapse,
                              std::string_view shift);
/// Index conversion for every spatial symbol with slots accepting both the
/// frame kind and the spacetime kind (v^a -> v^i e_i^a, w_a -> w_i b^i_a),
/// followed by the connection rule b^j_a e_k^c CD(e_i^a, c) -> Gamma_k^j_i.
RuleSet frame_conversion_rules(const SymbolTable& table, std::string_view frame,
                               std::string_view coframe, std::string_view connection);

struct ApplyResult {
  Expr expr;
  int passes = 0;
};

/// Rules in order, leftmost-innermost site first, canonicalizing after each
/// sweep, until a whole pass changes nothing.
ApplyResult apply_rules_traced(const Expr& expr, const RuleSet& rules, const SymbolTable& table);
Expr apply_rules(const Expr& expr, const RuleSet& rules, const SymbolTable& table);

/// Applies one rule at the first match of `term`, innermost first. Returns
/// false when nothing matches.
bool apply_once(const Term& term, const RewriteRule& rule, const SymbolTable& table, Expr& out);

struct Projection {
  std::string tag;  // e.g. "a:normal,b:tangential"
  Expr expr;
};

/// All 2^k normal/tangential projections of an equation `expr = 0` with k
/// free indices of the normal's kind. Normal: contract with n. Tangential:
/// contract with h, keeping the index free.
std::vector<Projection> decompose(const Expr& equation, std::string_view normal,
                                  std::string_view projector, const RuleSet& rules,
                                  const SymbolTable& table);

}  // namespace tensorc
