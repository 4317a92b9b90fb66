#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace oseries {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return numerator(q); }
inline Int rat_den(const Rat& q) { return denominator(q); }

inline bool is_integer(const Rat& q) { return rat_den(q) == 1; }

inline int rat_sign(const Rat& q) { return q.sign(); }

/// q^n for integer n (n may be negative; q must be nonzero then).
Rat rat_pow(const Rat& q, long n);

/// Renders "p/q", or just "p" for integers.
std::string rat_to_string(const Rat& q);

/// Largest k with 2^k <= |q| (q nonzero); used for crude magnitude estimates.
long rat_msb(const Rat& q);

}  // namespace oseries
