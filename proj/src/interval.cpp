#include "oseries/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace oseries {

namespace {

Rat pow2(int bits) {
    Rat r(1);
    if (bits >= 0) {
        r = Rat(Int(1) << bits, 1);
    } else {
        r = Rat(1, Int(1) << (-bits));
    }
    return r;
}

Rat round_down(const Rat& q, int bits) {
    Rat scaled = q * pow2(bits);
    Int fl = rat_num(scaled) / rat_den(scaled);
    if (scaled < 0 && fl * rat_den(scaled) != rat_num(scaled)) fl -= 1;
    return Rat(fl) / pow2(bits);
}

Rat round_up(const Rat& q, int bits) { return -round_down(-q, bits); }

Rat tolerance(int bits) { return pow2(-bits); }

/// [lo, hi] enclosing exp(x) for rational x >= 0.
Interval exp_point_nonneg(const Rat& x, int bits) {
    Rat tol = tolerance(bits + 2);
    Rat term(1);
    Rat sum(1);
    long n = 0;
    // Run until the ratio x/(n+1) drops below 1/2 and the term is small, so
    // the geometric tail bound 2*term is valid and tight enough.
    while (true) {
        ++n;
        term = term * x / n;
        sum += term;
        if (Rat(2) * n >= Rat(4) * x && term <= tol) break;
        if (n > 100000) throw std::runtime_error("exp enclosure failed to converge");
    }
    Rat rem = 2 * term;
    return Interval(round_down(sum, bits + 2), round_up(sum + rem, bits + 2));
}

Interval exp_point(const Rat& x, int bits) {
    if (x == 0) return Interval::point(Rat(1));
    if (x > 0) return exp_point_nonneg(x, bits);
    Interval pos = exp_point_nonneg(-x, bits + 4);
    return Interval(round_down(Rat(1) / pos.hi, bits + 2), round_up(Rat(1) / pos.lo, bits + 2));
}

/// Enclosure of log(2).
Interval log2_interval(int bits) {
    // log 2 = 2*atanh(1/3) = 2*sum u^(2j+1)/(2j+1), u = 1/3.
    Rat tol = tolerance(bits + 3);
    Rat u2(1, 9);
    Rat term(1, 3);
    Rat sum(0);
    long j = 0;
    while (true) {
        sum += term / (2 * j + 1);
        term *= u2;
        if (term <= tol) break;
        ++j;
        if (j > 100000) throw std::runtime_error("log2 enclosure failed to converge");
    }
    Rat rem = term * Rat(9, 8);  // geometric tail, ratio 1/9
    Rat lo = 2 * sum;
    Rat hi = 2 * (sum + rem);
    return Interval(round_down(lo, bits + 2), round_up(hi, bits + 2));
}

/// Enclosure of log(x) for rational x > 0.
Interval log_point(const Rat& x, int bits) {
    if (x <= 0) throw std::domain_error("log_point: nonpositive argument");
    if (x == 1) return Interval::point(Rat(0));
    Rat t = x;
    long k = 0;
    while (t >= Rat(3, 2)) {
        t /= 2;
        ++k;
    }
    while (t < Rat(3, 4)) {
        t *= 2;
        --k;
    }
    Rat u = t - 1;  // in [-1/4, 1/2)
    Rat tol = tolerance(bits + 3);
    Rat term = u;
    Rat sum(0);
    long n = 1;
    Rat au = abs(u);
    while (true) {
        if (n % 2 == 1)
            sum += term / n;
        else
            sum -= term / n;
        term *= u;
        if (abs(term) <= tol) break;
        ++n;
        if (n > 200000) throw std::runtime_error("log enclosure failed to converge");
    }
    Rat rem = 2 * abs(term);
    (void)au;
    Interval ln_t(sum - rem, sum + rem);
    if (k == 0) return Interval(round_down(ln_t.lo, bits + 2), round_up(ln_t.hi, bits + 2));
    Interval l2 = log2_interval(bits + 4);
    Rat klo = k >= 0 ? Rat(k) * l2.lo : Rat(k) * l2.hi;
    Rat khi = k >= 0 ? Rat(k) * l2.hi : Rat(k) * l2.lo;
    return Interval(round_down(ln_t.lo + klo, bits + 2), round_up(ln_t.hi + khi, bits + 2));
}

}  // namespace

std::string Interval::to_string() const {
    return "[" + rat_to_string(lo) + ", " + rat_to_string(hi) + "]";
}

Interval iv_round(const Interval& x, int bits) {
    return Interval(round_down(x.lo, bits), round_up(x.hi, bits));
}

Interval iv_add(const Interval& a, const Interval& b, int bits) {
    return iv_round(Interval(a.lo + b.lo, a.hi + b.hi), bits + 2);
}

Interval iv_sub(const Interval& a, const Interval& b, int bits) {
    return iv_round(Interval(a.lo - b.hi, a.hi - b.lo), bits + 2);
}

Interval iv_neg(const Interval& a) { return Interval(-a.hi, -a.lo); }

Interval iv_mul(const Interval& a, const Interval& b, int bits) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return iv_round(Interval(lo, hi), bits + 2);
}

Interval iv_inv(const Interval& a, int bits) {
    if (a.contains_zero()) throw std::domain_error("iv_inv: interval contains zero");
    return iv_round(Interval(Rat(1) / a.hi, Rat(1) / a.lo), bits + 2);
}

Interval iv_pow(const Interval& a, long n, int bits) {
    if (n == 0) return Interval::point(Rat(1));
    if (n < 0) return iv_inv(iv_pow(a, -n, bits + 4), bits);
    Interval acc = Interval::point(Rat(1));
    Interval base = a;
    unsigned long k = static_cast<unsigned long>(n);
    while (k) {
        if (k & 1) acc = iv_mul(acc, base, bits + 4);
        k >>= 1;
        if (k) base = iv_mul(base, base, bits + 4);
    }
    return iv_round(acc, bits + 2);
}

Interval iv_exp(const Interval& a, int bits) {
    Interval lo = exp_point(a.lo, bits + 2);
    Interval hi = exp_point(a.hi, bits + 2);
    return Interval(lo.lo, hi.hi);
}

Interval iv_log(const Interval& a, int bits) {
    if (a.lo <= 0) throw std::domain_error("iv_log: interval not strictly positive");
    Interval lo = log_point(a.lo, bits + 2);
    Interval hi = log_point(a.hi, bits + 2);
    return Interval(lo.lo, hi.hi);
}

Interval iv_meet(const Interval& a, const Interval& b) {
    Rat lo = std::max(a.lo, b.lo);
    Rat hi = std::min(a.hi, b.hi);
    if (lo > hi) return a;  // inconsistent inputs; keep the first
    return Interval(lo, hi);
}

}  // namespace oseries
