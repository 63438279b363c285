#pragma once

#include <set>
#include <string>
#include <vector>

#include "tensorc/expr.hpp"
#include "tensorc/symbol.hpp"

namespace tensorc {

/// Deterministic normal form:
///  - partial and covariant derivatives distribute over sums and products
///    (Leibniz) so each OD/CD acts on a single factor; LD only has numeric
///    coefficients pulled out and its operand product sorted
///  - constant tensors with literal indices become numbers, and their
///    OD/CD vanish
///  - Kronecker deltas contracted with another factor are eliminated
///  - rank-0 factors of the same symbol merge into one power
///  - symmetric slot groups are sorted ascending; antisymmetric groups too,
///    with the permutation sign absorbed into the coefficient
///  - factors are sorted, dummies renamed to a canonical sequence
///  - like terms merge, zero terms drop
/// The result is a fixed point: canonicalize(canonicalize(x)) == canonicalize(x).
Expr canonicalize(const Expr& expr, const SymbolTable& table);

/// The i-th canonical dummy label of a kind, skipping `avoid`.
std::string canonical_label(const IndexKind& kind, int ordinal, const std::set<std::string>& avoid);

/// A label of `kind` not present in `used`; inserts it into `used`.
std::string fresh_label(const IndexKind& kind, std::set<std::string>& used);

/// Value of a constant tensor at literal indices (0, +1 or -1).
int constant_value(const TensorSymbol& symbol, const std::vector<int>& values,
                   const SymbolTable& table);

}  // namespace tensorc
