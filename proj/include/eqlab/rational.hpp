#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>

namespace eqlab {

/// Exact rational number. GMP keeps every value canonical (lowest terms, positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

/// Builds num/den and canonicalizes. Throws std::domain_error on a zero denominator.
Rational make_rational(const Integer& num, const Integer& den);
Rational make_rational(long num, long den = 1);

/// Parses the decimal strings used by the JSON formats.
Rational rational_from_strings(const std::string& num, const std::string& den);

inline std::string numerator_string(const Rational& q) { return q.get_num().get_str(10); }
inline std::string denominator_string(const Rational& q) { return q.get_den().get_str(10); }

/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& q);

/// Number of decimal digits of |numerator|; zero has 0 digits.
std::size_t numerator_digits(const Rational& q);

}  // namespace eqlab
