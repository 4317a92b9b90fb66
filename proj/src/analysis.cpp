#include "oseries/analysis.hpp"

#include "oseries/errors.hpp"

namespace oseries {

namespace {

Rat factorial(long n) {
    Rat f(1);
    for (long i = 2; i <= n; ++i) f *= i;
    return f;
}

/// d(log_j(w)) = 1/(w * log(w) * ... * log_{j-1}(w)), j >= 1.
Monomial derived_log_atom(long j) {
    std::vector<std::pair<long, ConstReal>> powers;
    for (long i = 0; i < j; ++i) powers.emplace_back(i, ConstReal(-1L));
    return Monomial::make(std::move(powers), Transseries());
}

}  // namespace

Transseries derive(const Transseries& x, int max_bits) {
    std::vector<Transseries> parts;
    for (const Term& t : x.terms()) {
        // d(r*m) = r * m * d(log m).
        std::vector<Transseries> dlog_parts;
        for (const auto& [k, a] : t.monomial.log_powers())
            dlog_parts.push_back(
                Transseries::from_term(a, derived_log_atom(k + 1)));
        const Transseries& gamma = t.monomial.exp_arg();
        if (!gamma.is_zero()) dlog_parts.push_back(derive(gamma, max_bits));
        Transseries dlog = sum_family(dlog_parts, max_bits);
        if (dlog.is_zero()) continue;
        parts.push_back(ts_scale(
            ts_mul(Transseries::from_monomial(t.monomial), dlog, max_bits), t.coeff, max_bits));
    }
    return sum_family(parts, max_bits);
}

Transseries derive_n(const Transseries& x, unsigned long n, int max_bits) {
    Transseries out = x;
    for (unsigned long i = 0; i < n; ++i) out = derive(out, max_bits);
    return out;
}

TruncatedResult ts_exp(const Transseries& x, const TruncationBudget& budget) {
    Decomposition d = decompose(x, budget.const_bits);
    Monomial m = Monomial::exponential(d.big.series(), budget.const_bits);
    ConstReal c = const_exp(d.real);
    if (d.small.is_zero()) return tr_exact(Transseries::from_term(c, m));
    return sum_series_in_eps(Term{c, m}, d.small,
                             [](long n) { return ConstReal(Rat(1) / factorial(n)); }, budget);
}

TruncatedResult ts_log(const Transseries& x, const TruncationBudget& budget) {
    if (x.is_zero()) throw NonPositiveArgument("log of zero series");
    const Term& lead = leading_term(x);
    if (lead.coeff.sign(budget.const_bits) != Sign::Positive)
        throw NonPositiveArgument("log of a negative series");
    Transseries exact_part = ts_add(formal_log(lead.monomial, budget.const_bits),
                                    Transseries::constant(const_log(lead.coeff, budget.const_bits)),
                                    budget.const_bits);
    Transseries inv_lead = Transseries::from_term(const_inv(lead.coeff, budget.const_bits),
                                                  mono_inv(lead.monomial, budget.const_bits));
    Transseries eps = ts_sub(ts_mul(x, inv_lead, budget.const_bits),
                             Transseries::constant(Rat(1)), budget.const_bits);
    if (eps.is_zero()) return tr_exact(exact_part);
    TruncatedResult tail = sum_series_in_eps(
        Term{ConstReal::one(), Monomial()}, eps,
        [](long n) {
            if (n == 0) return ConstReal();
            return ConstReal(Rat(n % 2 == 1 ? 1 : -1) / Rat(n));
        },
        budget);
    return certify(ts_add(exact_part, tail.value, budget.const_bits), tr_noise(tail), budget);
}

bool is_positive_infinite(const Transseries& x, int max_bits) {
    if (x.is_zero()) return false;
    const Term& lead = leading_term(x);
    if (!mono_is_infinite(lead.monomial, max_bits)) return false;
    return lead.coeff.sign(max_bits) == Sign::Positive;
}

TruncatedResult iterated_log(const Transseries& x, long k, const TruncationBudget& budget) {
    if (!is_positive_infinite(x, budget.const_bits))
        throw NotPositiveInfinite("iterated log requires a positive infinite argument");
    TruncatedResult acc = tr_exact(x);
    for (long i = 0; i < k; ++i) {
        if (!is_positive_infinite(acc.value, budget.const_bits))
            throw NotPositiveInfinite("iterated log left the positive infinite domain");
        acc = tr_log(acc, budget);
    }
    return acc;
}

TruncatedResult tr_exp(const TruncatedResult& a, const TruncationBudget& budget) {
    auto na = tr_noise(a);
    if (na && mono_compare(na->ceiling, Monomial(), budget.const_bits) != Cmp::Less)
        throw BudgetExhausted("exp of a value whose uncertainty is not infinitesimal");
    TruncatedResult e = ts_exp(a.value, budget);
    if (!na) return e;
    Noise prop = noise_scaled(*na, leading_monomial(e.value), budget.const_bits);
    return certify(e.value, noise_max(tr_noise(e), prop, budget.const_bits), budget);
}

TruncatedResult tr_log(const TruncatedResult& a, const TruncationBudget& budget) {
    auto na = tr_noise(a);
    if (a.value.is_zero()) {
        if (!na) throw NonPositiveArgument("log of zero series");
        throw BudgetExhausted("log of a value with no certified terms");
    }
    TruncatedResult l = ts_log(a.value, budget);
    if (!na) return l;
    Noise prop = noise_scaled(*na, mono_inv(leading_monomial(a.value), budget.const_bits),
                              budget.const_bits);
    return certify(l.value, noise_max(tr_noise(l), prop, budget.const_bits), budget);
}

}  // namespace oseries
