#pragma once

#include "oseries/rational.hpp"

#include <string>

namespace oseries {

/// Closed interval with rational endpoints. Arithmetic is outward-rounded to
/// dyadic endpoints so repeated operations do not blow up coefficient sizes.
struct Interval {
    Rat lo;
    Rat hi;

    Interval() : lo(0), hi(0) {}
    Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {}
    static Interval point(const Rat& q) { return Interval(q, q); }

    bool contains_zero() const { return lo <= 0 && hi >= 0; }
    bool is_positive() const { return lo > 0; }
    bool is_negative() const { return hi < 0; }
    Rat width() const { return hi - lo; }

    std::string to_string() const;
};

/// Round endpoints outward to multiples of 2^-bits.
Interval iv_round(const Interval& x, int bits);

Interval iv_add(const Interval& a, const Interval& b, int bits);
Interval iv_sub(const Interval& a, const Interval& b, int bits);
Interval iv_neg(const Interval& a);
Interval iv_mul(const Interval& a, const Interval& b, int bits);
/// Requires 0 not in a.
Interval iv_inv(const Interval& a, int bits);
/// Integer power (negative n requires 0 not in a).
Interval iv_pow(const Interval& a, long n, int bits);

/// Enclosure of exp over the interval, to roughly 2^-bits accuracy.
Interval iv_exp(const Interval& a, int bits);
/// Enclosure of log; requires a.lo > 0.
Interval iv_log(const Interval& a, int bits);

/// Intersection, assuming the intervals genuinely overlap (both enclose the
/// same real number).
Interval iv_meet(const Interval& a, const Interval& b);

}  // namespace oseries
