#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// boost 1.74's mixed rational/integer operator== recurses forever under
// C++20 rewritten comparisons; exact-match overloads win resolution.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, int b) {
  return a == rational<std::int64_t>(b);
}
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a == rational<std::int64_t>(b);
}
}  // namespace boost

namespace tensorc {

/// Exact coefficients for symbolic terms. Floats only appear once a kernel
/// is evaluated.
using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);

/// Accepts "3", "-3", "3/4" and finite decimals such as "0.25".
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

}  // namespace tensorc
