#pragma once

// Exact rational arithmetic for scaling exponents and rate constants.
//
// All exponent bookkeeping (abundance exponents, rate exponents, time
// rescaling) is done in exact rationals so that balance conditions and
// de-scaled drift coefficients come out as identities rather than as
// floating-point near-misses.  boost::rational over int64 is plenty: the
// exponents live in [-3, 3] with small denominators, and the rate constants
// are short decimal literals.

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rxscale {

using Rat = boost::rational<std::int64_t>;

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Renders "p/q", or just "p" when q == 1.
std::string to_string(const Rat& r);

// Parses "2/3", "-5/3", "7", "0.025", "7.5e-6", "1e6".  Decimal and
// scientific literals convert exactly.  Throws std::invalid_argument on
// malformed input or overflow.
Rat rat_from_string(std::string_view text);

// base^exp for integer exp (exp may be negative; base must be nonzero then).
Rat rat_pow(const Rat& base, long exp);

// Exact q-th root when one exists (e.g. root(1000000, 3) = 100).
std::optional<Rat> rat_root(const Rat& x, unsigned q);

// base^(p/q) as an exact rational when the q-th root of base is rational.
std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& exp);

// base^exp in double precision, taking the exact path when available.
double rat_pow_d(const Rat& base, const Rat& exp);

// Exact decimal rendering ("7.5e-06" style is avoided; emits plain decimals
// like "0.0000075" or integers).  Only defined for denominators of the form
// 2^a 5^b; throws std::domain_error otherwise.
std::string to_decimal_string(const Rat& r);

}  // namespace rxscale
