#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "tensorc/index.hpp"
#include "tensorc/rational.hpp"

namespace tensorc {

enum class DerivativeOp : std::uint8_t { Partial, Covariant, Lie };

struct Factor;

/// Indexed instance of a declared symbol. `power` is only meaningful for
/// rank-0 symbols (`alpha^-1`).
struct TensorFactor {
  std::string name;
  std::vector<Index> indices;
  int power = 1;

  friend bool operator==(const TensorFactor&, const TensorFactor&) = default;
};

/// OD(operand, direction), CD(operand, direction) or LD(vector; operand).
/// The operand is a product of factors; sums and numeric coefficients are
/// distributed out of the derivative during canonicalization.
struct DerivativeFactor {
  DerivativeOp op = DerivativeOp::Partial;
  std::vector<Factor> operand;
  Index direction;     // unused for Lie derivatives
  std::string vector;  // Lie derivatives only

  friend bool operator==(const DerivativeFactor&, const DerivativeFactor&);
};

struct Factor {
  std::variant<TensorFactor, DerivativeFactor> node;

  bool is_tensor() const { return node.index() == 0; }
  const TensorFactor& tensor() const { return std::get<TensorFactor>(node); }
  TensorFactor& tensor() { return std::get<TensorFactor>(node); }
  const DerivativeFactor& derivative() const { return std::get<DerivativeFactor>(node); }
  DerivativeFactor& derivative() { return std::get<DerivativeFactor>(node); }

  friend bool operator==(const Factor&, const Factor&) = default;
};

inline bool operator==(const DerivativeFactor& a, const DerivativeFactor& b) {
  return a.op == b.op && a.direction == b.direction && a.vector == b.vector &&
         a.operand == b.operand;
}

struct Term {
  Rational coefficient{1};
  std::vector<Factor> factors;

  friend bool operator==(const Term&, const Term&) = default;
};

/// A sum of terms; the empty sum is zero.
struct Expr {
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  static Expr constant(const Rational& value);

  friend bool operator==(const Expr&, const Expr&) = default;
};

Factor make_tensor(std::string name, std::vector<Index> indices, int power = 1);
Factor make_derivative(DerivativeOp op, std::vector<Factor> operand,
                       Index direction, std::string vector = {});

Expr operator+(Expr a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr scale(Expr e, const Rational& c);

/// Total order used by canonicalization: tensors before derivatives, then
/// symbol name, then indices.
int compare(const Factor& a, const Factor& b);
int compare(const std::vector<Factor>& a, const std::vector<Factor>& b);

std::string to_string(DerivativeOp op);
std::string to_string(const Factor& f);
std::string to_string(const Term& t, bool leading = true);
std::string to_string(const Expr& e);

/// Visits every index of a term, including derivative directions and
/// indices nested inside derivative operands.
void for_each_index(const std::vector<Factor>& factors,
                    const std::function<void(const Index&)>& fn);
void for_each_index(std::vector<Factor>& factors,
                    const std::function<void(Index&)>& fn);

/// Free/dummy classification of a single term.
struct IndexCensus {
  std::vector<Index> free;  // sorted by label
  std::vector<std::string> dummies;
};

/// Throws Error(Index) when an abstract label appears more than twice, or
/// twice with the same variance, or twice with different kinds.
IndexCensus census(const Term& term);

/// Free indices of a well-formed expression (empty for zero). Throws when
/// the terms disagree.
std::vector<Index> free_indices(const Expr& expr);

void check_well_formed(const Expr& expr);

/// Every abstract label used in a term.
std::vector<std::string> labels_in(const Term& term);

}  // namespace tensorc
