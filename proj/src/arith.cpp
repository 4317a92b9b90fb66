#include "oseries/arith.hpp"

#include "oseries/errors.hpp"

#include <algorithm>

namespace oseries {

Transseries ts_add(const Transseries& x, const Transseries& y, int max_bits) {
    return merge_add(x, y, max_bits);
}

Transseries ts_neg(const Transseries& x) {
    std::vector<Term> terms;
    terms.reserve(x.size());
    for (const Term& t : x.terms()) terms.push_back(Term{const_neg(t.coeff), t.monomial});
    return Transseries::from_sorted(std::move(terms));
}

Transseries ts_sub(const Transseries& x, const Transseries& y, int max_bits) {
    return merge_add(x, ts_neg(y), max_bits);
}

Transseries ts_mul(const Transseries& x, const Transseries& y, int max_bits) {
    // Multiplying a sorted series by one term preserves the order, so the
    // convolution is a sequence of merges.
    Transseries acc;
    for (const Term& a : x.terms()) {
        std::vector<Term> row;
        row.reserve(y.size());
        for (const Term& b : y.terms())
            row.push_back(
                Term{const_mul(a.coeff, b.coeff), mono_mul(a.monomial, b.monomial, max_bits)});
        acc = merge_add(acc, Transseries::from_sorted(std::move(row)), max_bits);
    }
    return acc;
}

Transseries ts_npow(const Transseries& x, unsigned long n, int max_bits) {
    Transseries acc = Transseries::constant(Rat(1));
    Transseries base = x;
    while (n) {
        if (n & 1) acc = ts_mul(acc, base, max_bits);
        n >>= 1;
        if (n) base = ts_mul(base, base, max_bits);
    }
    return acc;
}

Transseries sum_family(const std::vector<Transseries>& xs, int max_bits) {
    Transseries acc;
    for (const Transseries& x : xs) acc = merge_add(acc, x, max_bits);
    return acc;
}

Transseries ts_scale(const Transseries& x, const ConstReal& c, int max_bits) {
    (void)max_bits;
    if (c.is_zero()) return Transseries();
    std::vector<Term> terms;
    terms.reserve(x.size());
    for (const Term& t : x.terms()) terms.push_back(Term{const_mul(t.coeff, c), t.monomial});
    return Transseries::from_sorted(std::move(terms));
}

std::optional<Noise> tr_noise(const TruncatedResult& r) {
    if (r.exact) return std::nullopt;
    return Noise{*r.error_bound, /*inclusive=*/false};
}

TruncatedResult tr_exact(Transseries value) {
    TruncatedResult out;
    out.value = std::move(value);
    return out;
}

std::optional<Noise> noise_max(std::optional<Noise> a, std::optional<Noise> b, int max_bits) {
    if (!a) return b;
    if (!b) return a;
    Cmp c = mono_compare(a->ceiling, b->ceiling, max_bits);
    if (c == Cmp::Less) return b;
    if (c == Cmp::Greater) return a;
    return Noise{a->ceiling, a->inclusive || b->inclusive};
}

Noise noise_scaled(const Noise& n, const Monomial& m, int max_bits) {
    return Noise{mono_mul(n.ceiling, m, max_bits), n.inclusive};
}

TruncatedResult certify(const Transseries& known, std::optional<Noise> noise,
                        const TruncationBudget& budget) {
    TruncatedResult out;
    if (!noise && static_cast<long>(known.size()) <= budget.max_terms) {
        out.value = known;
        return out;
    }
    std::vector<Term> kept;
    bool dropped = false;
    for (const Term& t : known.terms()) {
        if (static_cast<long>(kept.size()) >= budget.max_terms) {
            dropped = true;
            break;
        }
        if (noise) {
            Cmp c = mono_compare(t.monomial, noise->ceiling, budget.const_bits);
            if (c == Cmp::Less || (c == Cmp::Equal && noise->inclusive)) {
                dropped = true;
                break;  // terms are decreasing; nothing further is certified
            }
        }
        kept.push_back(t);
    }
    if (!dropped && !noise) {
        out.value = Transseries::make(std::move(kept), budget.const_bits);
        return out;
    }
    if (kept.empty()) {
        out.value = Transseries();
        out.exact = false;
        // No certified content; report a bound the unknown region sits
        // strictly below.
        out.error_bound = !noise ? leading_monomial(known)
                          : noise->inclusive
                              ? mono_mul(noise->ceiling, Monomial::omega(), budget.const_bits)
                              : noise->ceiling;
        return out;
    }
    out.exact = false;
    out.error_bound = kept.back().monomial;
    out.value = Transseries::make(std::move(kept), budget.const_bits);
    return out;
}

TruncatedResult tr_add(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget) {
    Transseries sum = ts_add(a.value, b.value, budget.const_bits);
    auto noise = noise_max(tr_noise(a), tr_noise(b), budget.const_bits);
    if (!noise && static_cast<long>(sum.size()) <= budget.max_terms) return tr_exact(sum);
    return certify(sum, noise, budget);
}

TruncatedResult tr_neg(const TruncatedResult& a) {
    TruncatedResult out = a;
    out.value = ts_neg(a.value);
    return out;
}

TruncatedResult tr_scale(const TruncatedResult& a, const ConstReal& c,
                         const TruncationBudget& budget) {
    if (c.is_zero()) return tr_exact(Transseries());
    TruncatedResult out = a;
    out.value = ts_scale(a.value, c, budget.const_bits);
    return out;
}

namespace {

std::optional<Noise> scaled_noise(const std::optional<Noise>& noise, const Transseries& by,
                                  const std::optional<Noise>& by_noise, int max_bits) {
    // Ceiling for (unknown part of one operand) * (other operand).
    if (!noise) return std::nullopt;
    std::optional<Noise> out;
    if (!by.is_zero()) out = noise_scaled(*noise, leading_monomial(by), max_bits);
    if (by_noise)
        out = noise_max(out, noise_scaled(*noise, by_noise->ceiling, max_bits), max_bits);
    return out;
}

}  // namespace

TruncatedResult tr_mul(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget) {
    Transseries prod = ts_mul(a.value, b.value, budget.const_bits);
    auto na = tr_noise(a);
    auto nb = tr_noise(b);
    auto noise = noise_max(scaled_noise(na, b.value, nb, budget.const_bits),
                           scaled_noise(nb, a.value, na, budget.const_bits), budget.const_bits);
    if (!noise && static_cast<long>(prod.size()) <= budget.max_terms) return tr_exact(prod);
    return certify(prod, noise, budget);
}

TruncatedResult tr_npow(const TruncatedResult& a, unsigned long n, const TruncationBudget& budget) {
    TruncatedResult acc = tr_exact(Transseries::constant(Rat(1)));
    TruncatedResult base = a;
    while (n) {
        if (n & 1) acc = tr_mul(acc, base, budget);
        n >>= 1;
        if (n) base = tr_mul(base, base, budget);
    }
    return acc;
}

namespace {

/// Drop every term whose monomial is <= floor. Sound inside windowed power
/// sums: discarded content only ever produces content below the window.
Transseries drop_at_or_below(const Transseries& x, const Monomial& floor, int max_bits) {
    std::vector<Term> kept;
    for (const Term& t : x.terms()) {
        if (mono_compare(t.monomial, floor, max_bits) != Cmp::Greater) break;
        kept.push_back(t);
    }
    return Transseries::make(std::move(kept), max_bits);
}

}  // namespace

TruncatedResult sum_series_in_eps(const Term& prefix, const Transseries& eps,
                                  const std::function<ConstReal(long)>& coeff,
                                  const TruncationBudget& budget) {
    Transseries prefix_series = Transseries::from_term(prefix.coeff, prefix.monomial);
    if (eps.is_zero()) return tr_exact(ts_scale(prefix_series, coeff(0), budget.const_bits));
    if (mono_compare(leading_monomial(eps), Monomial(), budget.const_bits) != Cmp::Less)
        throw NotInfinitesimal("series argument is not infinitesimal: " + eps.to_string());

    const int bits = budget.const_bits;
    const Monomial eps_lm = leading_monomial(eps);
    const long cap = 2 * budget.max_terms + 8;
    const std::size_t width = 4 * budget.max_terms + 8;
    long k = budget.max_terms + 2;
    while (true) {
        // Everything at or below rel_floor = LM(eps)^(k+1) lands below the
        // tail ceiling anyway, so powers are kept only inside the window;
        // powers are additionally capped in width, with the cut point folded
        // into the ceiling.
        Monomial rel_floor = mono_pow(eps_lm, Rat(k + 1), bits);
        std::optional<Monomial> cut_floor;
        Transseries partial = Transseries::constant(coeff(0));
        Transseries power = Transseries::constant(Rat(1));
        for (long n = 1; n <= k; ++n) {
            power = drop_at_or_below(ts_mul(power, eps, bits), rel_floor, bits);
            if (power.size() > width) {
                Monomial cut = power.terms()[width].monomial;
                power = truncate_at(power, width);
                if (!cut_floor || mono_compare(*cut_floor, cut, bits) == Cmp::Less)
                    cut_floor = cut;
            }
            if (power.is_zero()) break;
            ConstReal c = coeff(n);
            if (!c.is_zero()) partial = ts_add(partial, ts_scale(power, c, bits), bits);
        }
        Monomial ceiling = rel_floor;
        if (cut_floor && mono_compare(ceiling, *cut_floor, bits) == Cmp::Less)
            ceiling = *cut_floor;
        Noise noise{mono_mul(prefix.monomial, ceiling, bits), /*inclusive=*/true};
        Transseries scaled = ts_mul(prefix_series, partial, bits);
        long certified = 0;
        for (const Term& t : scaled.terms()) {
            if (mono_compare(t.monomial, noise.ceiling, bits) == Cmp::Greater)
                ++certified;
            else
                break;
        }
        if (certified >= budget.max_terms || k >= cap) return certify(scaled, noise, budget);
        k = std::min(cap, 2 * k);
    }
}

TruncatedResult ts_inverse(const Transseries& x, const TruncationBudget& budget) {
    if (x.is_zero()) throw ZeroArgument("inverse of zero series");
    const Term& lead = leading_term(x);
    Term inv_lead{const_inv(lead.coeff, budget.const_bits),
                  mono_inv(lead.monomial, budget.const_bits)};
    if (x.size() == 1)
        return tr_exact(Transseries::from_term(inv_lead.coeff, inv_lead.monomial));
    // x = t(1 + eps); 1/x = (1/t) * sum (-eps)^n.
    Transseries eps = ts_sub(
        ts_mul(x, Transseries::from_term(inv_lead.coeff, inv_lead.monomial), budget.const_bits),
        Transseries::constant(Rat(1)), budget.const_bits);
    return sum_series_in_eps(inv_lead, eps,
                             [](long n) { return ConstReal(Rat(n % 2 == 0 ? 1 : -1)); }, budget);
}

TruncatedResult tr_inverse(const TruncatedResult& a, const TruncationBudget& budget) {
    if (a.value.is_zero()) {
        if (a.exact) throw ZeroArgument("inverse of zero series");
        throw BudgetExhausted("inverse of a value with no certified terms");
    }
    TruncatedResult inv = ts_inverse(a.value, budget);
    auto na = tr_noise(a);
    if (!na) return inv;
    // 1/(v + d) = 1/v - d/v^2 + ...; the perturbation is bounded by
    // noise / LM(v)^2.
    Monomial lm = leading_monomial(a.value);
    Noise prop = noise_scaled(*na, mono_pow(lm, Rat(-2), budget.const_bits), budget.const_bits);
    return certify(inv.value, noise_max(tr_noise(inv), prop, budget.const_bits), budget);
}

TruncatedResult ts_div(const Transseries& x, const Transseries& y,
                       const TruncationBudget& budget) {
    if (y.is_zero()) throw ZeroArgument("division by zero series");
    if (x.is_zero()) return tr_exact(Transseries());
    TruncatedResult inv = ts_inverse(y, budget);
    return tr_mul(tr_exact(x), inv, budget);
}

TruncatedResult tr_div(const TruncatedResult& a, const TruncatedResult& b,
                       const TruncationBudget& budget) {
    return tr_mul(a, tr_inverse(b, budget), budget);
}

long PowerSeries::degree() const {
    for (long i = static_cast<long>(coeffs.size()) - 1; i >= 0; --i)
        if (!coeffs[i].is_zero()) return i;
    return -1;
}

TruncatedResult eval_power_series(const PowerSeries& p, const Transseries& eps,
                                  const TruncationBudget& budget, bool full_series) {
    long d = p.degree();
    bool eps_small =
        eps.is_zero() ||
        mono_compare(leading_monomial(eps), Monomial(), budget.const_bits) == Cmp::Less;
    if (full_series && !eps_small)
        throw NotInfinitesimal("power series tail requires an infinitesimal argument");
    Transseries acc;
    Transseries power = Transseries::constant(Rat(1));
    for (long i = 0; i <= d; ++i) {
        if (i > 0) power = ts_mul(power, eps, budget.const_bits);
        if (!p.coeffs[i].is_zero())
            acc = ts_add(acc, ts_scale(power, p.coeffs[i], budget.const_bits), budget.const_bits);
    }
    std::optional<Noise> noise;
    if (full_series && !eps.is_zero())
        noise = Noise{mono_pow(leading_monomial(eps), Rat(d + 1), budget.const_bits),
                      /*inclusive=*/true};
    return certify(acc, noise, budget);
}

PowerSeries compose_power_series(const PowerSeries& p, const PowerSeries& q,
                                 std::optional<long> max_degree) {
    if (!q.coeffs.empty() && !q.coeffs[0].is_zero())
        throw NonzeroConstantTerm("inner power series must have zero constant term");
    long dp = p.degree();
    long dq = q.degree();
    long bound = dp <= 0 || dq <= 0 ? std::max<long>(dp, 0) : dp * dq;
    if (max_degree) bound = std::min(bound, *max_degree);
    std::vector<ConstReal> out(bound + 1);
    if (dp >= 0) out[0] = p.coeffs[0];
    std::vector<ConstReal> qpow(1, ConstReal::one());  // q^0
    for (long n = 1; n <= dp; ++n) {
        // qpow <- qpow * q, truncated at `bound`.
        std::vector<ConstReal> next(std::min(bound, static_cast<long>(qpow.size()) - 1 + dq) + 1);
        for (std::size_t i = 0; i < qpow.size(); ++i) {
            if (qpow[i].is_zero()) continue;
            for (long j = 1; j <= dq; ++j) {
                long k = static_cast<long>(i) + j;
                if (k > bound) break;
                next[k] = const_add(next[k], const_mul(qpow[i], q.coeffs[j]));
            }
        }
        qpow = std::move(next);
        if (p.coeffs[n].is_zero()) continue;
        for (std::size_t k = 0; k < qpow.size(); ++k)
            if (!qpow[k].is_zero())
                out[k] = const_add(out[k], const_mul(p.coeffs[n], qpow[k]));
    }
    return PowerSeries{std::move(out)};
}

bool agree_above(const Transseries& x, const Transseries& y,
                 const std::optional<Monomial>& bound, int max_bits) {
    Transseries d = ts_sub(x, y, max_bits);
    if (!bound) return d.is_zero();
    for (const Term& t : d.terms())
        if (mono_compare(t.monomial, *bound, max_bits) != Cmp::Less) return false;
    return true;
}

bool agree_outside_noise(const Transseries& x, const Transseries& y,
                         const std::optional<Noise>& noise, int max_bits) {
    Transseries d = ts_sub(x, y, max_bits);
    if (!noise) return d.is_zero();
    for (const Term& t : d.terms()) {
        Cmp c = mono_compare(t.monomial, noise->ceiling, max_bits);
        if (c == Cmp::Greater || (c == Cmp::Equal && !noise->inclusive)) return false;
    }
    return true;
}

bool tr_agree(const TruncatedResult& a, const TruncatedResult& b, int max_bits) {
    std::optional<Monomial> bound;
    if (!a.exact) bound = a.error_bound;
    if (!b.exact && (!bound || mono_compare(*bound, *b.error_bound, max_bits) == Cmp::Less))
        bound = b.error_bound;
    return agree_above(a.value, b.value, bound, max_bits);
}

}  // namespace oseries
