#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace rankone {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Canonical "num/den" rendering; integers are written as "num/1".
std::string to_string(const Rational& q);

/// Parses "num/den", "num" or "-num/den". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q{BigInt{static_cast<long>(num)}, BigInt{static_cast<long>(den)}};
  q.canonicalize();
  return q;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational{-q} : q; }

inline double to_double(const Rational& q) { return q.get_d(); }

/// Closed rational interval [lower, upper].
struct Bracket {
  Rational lower;
  Rational upper;

  bool exact() const { return lower == upper; }
  Rational width() const { return upper - lower; }
  bool contains(const Rational& x) const { return lower <= x && x <= upper; }
  Rational midpoint() const { return (lower + upper) / 2; }
};

/// Bounds on |x| for x in the bracket.
Bracket abs_bounds(const Bracket& b);

/// Interval product.
Bracket multiply(const Bracket& a, const Bracket& b);

}  // namespace rankone
