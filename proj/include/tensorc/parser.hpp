#pragma once

#include <string_view>

#include "tensorc/expr.hpp"
#include "tensorc/symbol.hpp"

namespace tensorc {

/// Parses the tensor DSL:
///
///   expr    := ['+'|'-'] term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := number | Name '[' index (',' index)* ']' | Name ['^' int]
///            | OD '(' expr ',' index ')' | CD '(' expr ',' index ')'
///            | LD '(' Name ';' expr ')' | '(' expr ')'
///   index   := u_<label> | l_<label> | u_<digits> | l_<digits> | <digits>
///
/// Numbers are integers, `p/q` rationals or finite decimals. Division is
/// allowed by numbers and rank-0 symbols. Parenthesized sums and derivative
/// operands are distributed, so the result is always a flat sum of
/// products. Bare literal digits take the slot's first allowed variance.
Expr parse_expression(std::string_view text, const SymbolTable& table);

/// Declares a tensor from one line of a `[tensors]` section, e.g.
///
///   E[spatial, spatial] sym(1,2) spatial
///   eps[spacetime|spatial, spacetime|spatial, spacetime|spatial] antisym(1,2,3) levicivita spatial
///   n[u:spacetime] timelike
///   alpha
///
/// Slot kinds are index-kind names joined with `|`; an optional `u:` or
/// `l:` prefix restricts the slot's variance. `sym(...)`/`antisym(...)`
/// take 1-based slot positions; listing more than two relates every pair.
const TensorSymbol& declare_from_text(std::string_view line, SymbolTable& table);

}  // namespace tensorc
