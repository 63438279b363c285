#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tensorc/rational.hpp"

namespace tensorc {

/// coefficient * prod(name^power), names sorted.
struct Monomial {
  Rational coefficient{1};
  std::vector<std::pair<std::string, int>> powers;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Polynomial (with negative powers allowed) over scalar names: component
/// names, derivative names and parameters.
struct ScalarExpr {
  std::vector<Monomial> terms;

  /// Multiplies equal names together and sorts them.
  static Monomial normalize(Monomial m);
  /// Adds a monomial, merging it with an equal-power-product term.
  void add(Monomial m);
  /// Sorted by power list; zero terms dropped.
  void finalize();

  bool is_zero() const { return terms.empty(); }
  std::set<std::string> names() const;
  double evaluate(const std::function<double(const std::string&)>& value) const;

  friend bool operator==(const ScalarExpr&, const ScalarExpr&) = default;
};

/// `2*B11*chi11 - B22*chi22 + alpha^-1*E1`.
std::string to_string(const Monomial& m, bool leading = true);
std::string to_string(const ScalarExpr& e);

}  // namespace tensorc
