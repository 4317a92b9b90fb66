#pragma once

#include "oseries/arith.hpp"

namespace oseries {

/// exp on the fragment. With x = gamma + r + eps (purely infinite, real,
/// infinitesimal): the result is exp(r) * e^gamma * sum eps^n/n!, truncated
/// per budget; exact iff eps = 0.
TruncatedResult ts_exp(const Transseries& x, const TruncationBudget& budget = {});

/// log for x > 0. With x = r*m*(1+eps): log m + log r + sum (-1)^(n+1) eps^n/n.
TruncatedResult ts_log(const Transseries& x, const TruncationBudget& budget = {});

/// k-fold log of a positive infinite series, budget threaded per stage.
TruncatedResult iterated_log(const Transseries& x, long k, const TruncationBudget& budget = {});

/// The transserial derivation: additive, Leibniz, d(e^gamma) = e^gamma
/// d(gamma), d(w) = 1, zero on constants. Exact on the whole fragment.
Transseries derive(const Transseries& x, int max_bits = kDefaultSignBits);

Transseries derive_n(const Transseries& x, unsigned long n, int max_bits = kDefaultSignBits);

/// Budgeted wrappers that propagate an input error ceiling through exp/log.
TruncatedResult tr_exp(const TruncatedResult& a, const TruncationBudget& budget);
TruncatedResult tr_log(const TruncatedResult& a, const TruncationBudget& budget);

/// x > every real: nonzero, leading monomial > 1, leading coefficient > 0.
bool is_positive_infinite(const Transseries& x, int max_bits = kDefaultSignBits);

}  // namespace oseries
