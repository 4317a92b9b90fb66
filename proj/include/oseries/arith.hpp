#pragma once

#include "oseries/core.hpp"

#include <functional>
#include <optional>

namespace oseries {

/// Budget for truncating operations: how many leading terms to keep and how
/// many bits constant sign queries may spend.
struct TruncationBudget {
    int max_terms = 16;
    int const_bits = kDefaultSignBits;
};

/// Result of a budgeted operation. When exact, value is the mathematical
/// result. Otherwise every monomial of (exact result - value) lies strictly
/// below error_bound, and error_bound is at most the smallest monomial of
/// value (when value is nonzero).
struct TruncatedResult {
    Transseries value;
    bool exact = true;
    std::optional<Monomial> error_bound;
};

Transseries ts_add(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);
Transseries ts_neg(const Transseries& x);
Transseries ts_sub(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);
Transseries ts_mul(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);
Transseries ts_npow(const Transseries& x, unsigned long n, int max_bits = kDefaultSignBits);

/// Exact sum of a finite family (order-independent).
Transseries sum_family(const std::vector<Transseries>& xs, int max_bits = kDefaultSignBits);

/// Scale by a constant.
Transseries ts_scale(const Transseries& x, const ConstReal& c, int max_bits = kDefaultSignBits);

/// Geometric expansion of 1/x around the leading term; exact only when x is
/// a single term.
TruncatedResult ts_inverse(const Transseries& x, const TruncationBudget& budget = {});

TruncatedResult ts_div(const Transseries& x, const Transseries& y,
                       const TruncationBudget& budget = {});

/// A polynomial prefix of a power series with constant coefficients.
struct PowerSeries {
    std::vector<ConstReal> coeffs;  // coeffs[i] multiplies X^i

    long degree() const;  // ignores trailing zero coefficients; -1 for zero
};

/// Evaluates sum a_i eps^i. When full_series is set, the coefficients are a
/// prefix of an infinite series: eps must then be infinitesimal (or zero)
/// and the tail is certified by a dominance bound.
TruncatedResult eval_power_series(const PowerSeries& p, const Transseries& eps,
                                  const TruncationBudget& budget = {}, bool full_series = false);

/// Coefficients of P(Q(X)) up to max_degree (default deg P * deg Q); Q must
/// have zero constant term.
PowerSeries compose_power_series(const PowerSeries& p, const PowerSeries& q,
                                 std::optional<long> max_degree = std::nullopt);

// --- TruncatedResult plumbing ---
//
// A Noise is a ceiling on unknown content: every monomial of the
// discrepancy between the exact result and the carried series is <= ceiling
// (inclusive) or < ceiling (strict). certify() turns (exact-so-far series,
// noise) into a contract-conforming TruncatedResult by keeping only the
// terms that sit above the unknown region.

struct Noise {
    Monomial ceiling;
    bool inclusive = true;
};

/// The unknown region of a budgeted result: strictly below its error bound.
std::optional<Noise> tr_noise(const TruncatedResult& r);

TruncatedResult tr_exact(Transseries value);

TruncatedResult certify(const Transseries& known, std::optional<Noise> noise,
                        const TruncationBudget& budget);

TruncatedResult tr_add(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget);
TruncatedResult tr_neg(const TruncatedResult& a);
TruncatedResult tr_scale(const TruncatedResult& a, const ConstReal& c,
                         const TruncationBudget& budget);
TruncatedResult tr_mul(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget);
TruncatedResult tr_npow(const TruncatedResult& a, unsigned long n,
                        const TruncationBudget& budget);
TruncatedResult tr_inverse(const TruncatedResult& a, const TruncationBudget& budget);
TruncatedResult tr_div(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget);

/// Larger of two optional ceilings (on a tie, inclusive wins).
std::optional<Noise> noise_max(std::optional<Noise> a, std::optional<Noise> b,
                               int max_bits = kDefaultSignBits);

/// Ceiling times a monomial (strictness preserved).
Noise noise_scaled(const Noise& n, const Monomial& m, int max_bits = kDefaultSignBits);

/// True when x and y coincide on every monomial >= bound (full equality when
/// bound is absent).
bool agree_above(const Transseries& x, const Transseries& y,
                 const std::optional<Monomial>& bound, int max_bits = kDefaultSignBits);

/// Agreement outside the unknown region described by a noise ceiling.
bool agree_outside_noise(const Transseries& x, const Transseries& y,
                         const std::optional<Noise>& noise, int max_bits = kDefaultSignBits);

/// Agreement of two budgeted results above the larger of their bounds.
bool tr_agree(const TruncatedResult& a, const TruncatedResult& b,
              int max_bits = kDefaultSignBits);

/// Sums prefix * sum_{n>=0} coeff(n) * eps^n for infinitesimal eps, growing
/// the expansion until enough leading terms are certified against the tail.
TruncatedResult sum_series_in_eps(const Term& prefix, const Transseries& eps,
                                  const std::function<ConstReal(long)>& coeff,
                                  const TruncationBudget& budget);

}  // namespace oseries
