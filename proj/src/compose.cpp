#include "oseries/compose.hpp"

#include "oseries/errors.hpp"

#include <functional>

namespace oseries {

Substitution::Substitution(Transseries target, TruncationBudget budget)
    : target_(std::move(target)), budget_(budget) {
    if (!is_positive_infinite(target_, budget_.const_bits))
        throw TargetNotPositiveInfinite("composition target must exceed every real");
    cache_.push_back(tr_exact(target_));
}

TruncatedResult Substitution::log_base(long k) const {
    if (k < 0) throw IndexOutOfRange("negative log depth");
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<long>(cache_.size()) <= k) {
        const TruncatedResult& prev = cache_.back();
        if (!is_positive_infinite(prev.value, budget_.const_bits))
            throw NotPositiveInfinite("iterated log of the target left the domain");
        cache_.push_back(tr_log(prev, budget_));
    }
    return cache_[k];
}

namespace {

TruncatedResult compose_term(const Term& t, const Substitution& sub) {
    const TruncationBudget& budget = sub.budget();
    TruncatedResult acc = tr_exact(Transseries::constant(Rat(1)));
    for (const auto& [k, a] : t.monomial.log_powers()) {
        TruncatedResult factor;
        if (a.is_rational() && is_integer(a.rational_value())) {
            long n = static_cast<long>(rat_num(a.rational_value()));
            if (n >= 0)
                factor = tr_npow(sub.log_base(k), static_cast<unsigned long>(n), budget);
            else
                factor = tr_inverse(
                    tr_npow(sub.log_base(k), static_cast<unsigned long>(-n), budget), budget);
        } else {
            // log_k(g)^a = exp(a * log_{k+1}(g)).
            factor = tr_exp(tr_scale(sub.log_base(k + 1), a, budget), budget);
        }
        acc = tr_mul(acc, factor, budget);
    }
    const Transseries& gamma = t.monomial.exp_arg();
    if (!gamma.is_zero()) {
        TruncatedResult cg = compose(gamma, sub);
        acc = tr_mul(acc, tr_exp(cg, budget), budget);
    }
    return tr_scale(acc, t.coeff, budget);
}

}  // namespace

TruncatedResult compose(const Transseries& f, const Substitution& sub) {
    TruncatedResult acc = tr_exact(Transseries());
    for (const Term& t : f.terms()) acc = tr_add(acc, compose_term(t, sub), sub.budget());
    return acc;
}

TruncatedResult compose(const Transseries& f, const Transseries& g,
                        const TruncationBudget& budget) {
    Substitution sub(g, budget);
    return compose(f, sub);
}

bool compose_right_identity_check(const Transseries& f, const TruncationBudget& budget) {
    TruncatedResult r = compose(f, Transseries::omega(), budget);
    return r.exact && ts_equal(r.value, f);
}

long AdmissibleTree::size() const {
    long s = 1;
    for (const AdmissibleTree& c : children) s += c.size();
    return s;
}

Term contribution(const AdmissibleTree& tree, const Substitution& sub) {
    if (tree.delta_index >= 0) return tree.leaf_value;
    const TruncationBudget& budget = sub.budget();
    TruncatedResult cg = tree.root_exponent.is_zero() ? tr_exact(Transseries())
                                                      : compose(tree.root_exponent, sub);
    Decomposition d = decompose(cg.value, budget.const_bits);
    ConstReal coeff = const_mul(tree.root_coeff, const_exp(d.real));
    Monomial mono = Monomial::exponential(d.big.series(), budget.const_bits);
    Rat nf(1);
    for (std::size_t i = 2; i <= tree.children.size(); ++i) nf *= i;
    coeff = const_mul(coeff, ConstReal(Rat(1) / nf));
    for (const AdmissibleTree& child : tree.children) {
        Term c = contribution(child, sub);
        coeff = const_mul(coeff, c.coeff);
        mono = mono_mul(mono, c.monomial, budget.const_bits);
    }
    return Term{coeff, mono};
}

namespace {

struct WeightedTree {
    AdmissibleTree tree;
    Int count;     // ordered-children variants this representative stands for
    Term contrib;  // cached contribution of the representative
};

struct EnumLimits {
    long max_size;
    long work = 0;
    void step() {
        if (++work > 2000000) throw BudgetExhausted("tree enumeration frontier too large");
    }
};

std::vector<WeightedTree> enum_for_term(const Term& t, const Substitution& sub,
                                        const Monomial& floor, bool infinitesimal_only,
                                        EnumLimits& limits);

/// Trees with generalized root coeff*e^exponent. Children are trees over
/// the terms of the exponent with infinitesimal contribution; every child
/// strictly lowers the contribution monomial, so the floor prunes the
/// search and keeps it finite.
std::vector<WeightedTree> enum_for_root(const ConstReal& coeff, const Transseries& exponent,
                                        const Substitution& sub, const Monomial& floor,
                                        bool infinitesimal_only, EnumLimits& limits) {
    const TruncationBudget& budget = sub.budget();
    const int bits = budget.const_bits;
    TruncatedResult cg = exponent.is_zero() ? tr_exact(Transseries()) : compose(exponent, sub);
    Decomposition d = decompose(cg.value, bits);
    Term base{const_mul(coeff, const_exp(d.real)), Monomial::exponential(d.big.series(), bits)};

    // A child below floor/base can never keep the whole tree above the floor.
    Monomial child_floor = mono_mul(floor, mono_inv(base.monomial, bits), bits);
    std::vector<WeightedTree> pool;
    for (const Term& u : exponent.terms()) {
        auto sub_trees = enum_for_term(u, sub, child_floor, /*infinitesimal_only=*/true, limits);
        pool.insert(pool.end(), sub_trees.begin(), sub_trees.end());
    }

    std::vector<WeightedTree> out;
    struct Pick {
        std::size_t index;
        long count;
    };
    std::vector<Pick> picks;

    auto emit = [&](const Monomial& mono) {
        limits.step();
        if (infinitesimal_only && mono_compare(mono, Monomial(), bits) != Cmp::Less) return;
        AdmissibleTree tree;
        tree.root_coeff = coeff;
        tree.root_exponent = exponent;
        ConstReal c = base.coeff;
        Int count(1);
        long n = 0;
        Rat m_facts(1);  // prod m_j!
        for (const Pick& p : picks) {
            const WeightedTree& w = pool[p.index];
            for (long i = 0; i < p.count; ++i) {
                tree.children.push_back(w.tree);
                c = const_mul(c, w.contrib.coeff);
                count *= w.count;
                ++n;
            }
            for (long i = 2; i <= p.count; ++i) m_facts *= i;
        }
        Rat fact(1);
        for (long i = 2; i <= n; ++i) fact *= i;
        c = const_mul(c, ConstReal(Rat(1) / fact));  // the 1/n! of the contribution
        count *= rat_num(fact / m_facts);            // multinomial n!/prod m_j!
        out.push_back(WeightedTree{std::move(tree), count, Term{c, mono}});
    };

    // Depth-first over child multisets, pool indices non-decreasing.
    std::function<void(std::size_t, const Monomial&, long)> assemble =
        [&](std::size_t start, const Monomial& mono, long size) {
            if (mono_compare(mono, floor, bits) != Cmp::Less) emit(mono);
            for (std::size_t j = start; j < pool.size(); ++j) {
                Monomial next = mono_mul(mono, pool[j].contrib.monomial, bits);
                if (mono_compare(next, floor, bits) == Cmp::Less) continue;
                long nsize = size + pool[j].tree.size();
                if (nsize > limits.max_size)
                    throw BudgetExhausted("admissible tree exceeds the size bound");
                if (!picks.empty() && picks.back().index == j)
                    picks.back().count += 1;
                else
                    picks.push_back(Pick{j, 1});
                assemble(j, next, nsize);
                if (picks.back().count > 1)
                    picks.back().count -= 1;
                else
                    picks.pop_back();
            }
        };
    assemble(0, base.monomial, 1);
    return out;
}

std::vector<WeightedTree> enum_for_term(const Term& t, const Substitution& sub,
                                        const Monomial& floor, bool infinitesimal_only,
                                        EnumLimits& limits) {
    const int bits = sub.budget().const_bits;
    auto atom = t.monomial.as_log_atom();
    if (atom && t.coeff.is_one()) {
        // Log-atom root: leaves carrying the terms of log_k(g).
        std::vector<WeightedTree> out;
        TruncatedResult base = sub.log_base(*atom);
        for (const Term& s : base.value.terms()) {
            limits.step();
            if (mono_compare(s.monomial, floor, bits) == Cmp::Less) continue;
            if (infinitesimal_only && mono_compare(s.monomial, Monomial(), bits) != Cmp::Less)
                continue;
            AdmissibleTree tree;
            tree.root_coeff = t.coeff;
            tree.root_exponent = formal_log(t.monomial, bits);
            tree.delta_index = *atom;
            tree.leaf_value = s;
            out.push_back(WeightedTree{std::move(tree), Int(1), s});
        }
        return out;
    }
    return enum_for_root(t.coeff, formal_log(t.monomial, bits), sub, floor, infinitesimal_only,
                         limits);
}

}  // namespace

std::vector<AdmissibleTree> enumerate_admissible_trees(const Term& t, const Substitution& sub,
                                                       const Monomial& cutoff, long max_size) {
    EnumLimits limits{max_size};
    std::vector<AdmissibleTree> out;
    for (auto& w : enum_for_term(t, sub, cutoff, /*infinitesimal_only=*/false, limits))
        out.push_back(std::move(w.tree));
    return out;
}

std::vector<AdmissibleTree> enumerate_admissible_trees(const ConstReal& coeff,
                                                       const Transseries& exponent,
                                                       const Substitution& sub,
                                                       const Monomial& cutoff, long max_size) {
    EnumLimits limits{max_size};
    std::vector<AdmissibleTree> out;
    for (auto& w :
         enum_for_root(coeff, exponent, sub, cutoff, /*infinitesimal_only=*/false, limits))
        out.push_back(std::move(w.tree));
    return out;
}

Transseries tree_oracle_compose(const Transseries& f, const Transseries& g,
                                const Monomial& cutoff, long max_size,
                                const TruncationBudget& budget) {
    Substitution sub(g, budget);
    EnumLimits limits{max_size};
    std::vector<Transseries> parts;
    for (const Term& t : f.terms()) {
        for (const auto& w : enum_for_term(t, sub, cutoff, /*infinitesimal_only=*/false, limits)) {
            parts.push_back(ts_scale(Transseries::from_term(w.contrib.coeff, w.contrib.monomial),
                                     ConstReal(Rat(w.count)), budget.const_bits));
        }
    }
    return sum_family(parts, budget.const_bits);
}

TaylorExpansion taylor_expand(const Transseries& f, const Transseries& x, long order,
                              const TruncationBudget& budget) {
    TaylorExpansion out;
    out.center = x;
    out.order = order;
    Substitution sub(x, budget);
    Transseries fn = f;
    Rat nf(1);
    for (long n = 0; n <= order; ++n) {
        if (n > 0) {
            fn = derive(fn, budget.const_bits);
            nf *= n;
        }
        TruncatedResult c = compose(fn, sub);
        out.coefficients.push_back(tr_scale(c, ConstReal(Rat(1) / nf), budget));
    }
    return out;
}

bool taylor_check(const Transseries& f, const Transseries& x, const Transseries& eps, long order,
                  const TruncationBudget& budget) {
    const int bits = budget.const_bits;
    TaylorExpansion tay = taylor_expand(f, x, order + 1, budget);
    std::optional<Monomial> eps_lm;
    if (!eps.is_zero()) {
        eps_lm = leading_monomial(eps);
        for (const TruncatedResult& c : tay.coefficients)
            for (const Term& t : c.value.terms())
                if (mono_compare(*eps_lm, t.monomial, bits) != Cmp::Less)
                    throw EpsilonTooLarge(
                        "perturbation is not below every Taylor coefficient monomial");
    }
    TruncatedResult lhs = compose(f, ts_add(x, eps, bits), budget);
    Transseries rhs;
    std::optional<Noise> rhs_noise;
    Transseries power = Transseries::constant(Rat(1));
    for (long n = 0; n <= order; ++n) {
        if (n > 0) power = ts_mul(power, eps, bits);
        if (power.is_zero()) break;
        const TruncatedResult& c = tay.coefficients[n];
        rhs = ts_add(rhs, ts_mul(c.value, power, bits), bits);
        auto nc = tr_noise(c);
        if (nc)
            rhs_noise =
                noise_max(rhs_noise, noise_scaled(*nc, leading_monomial(power), bits), bits);
    }
    // Remainder ceiling from the first omitted coefficient.
    std::optional<Noise> rem;
    const TruncatedResult& next = tay.coefficients[order + 1];
    if (!eps.is_zero()) {
        Monomial epow = mono_pow(*eps_lm, Rat(order + 1), bits);
        if (!next.value.is_zero())
            rem = Noise{mono_mul(leading_monomial(next.value), epow, bits), /*inclusive=*/true};
        else if (auto nn = tr_noise(next))
            rem = noise_scaled(*nn, epow, bits);
    }
    auto noise = noise_max(noise_max(tr_noise(lhs), rhs_noise, bits), rem, bits);
    return agree_outside_noise(lhs.value, rhs, noise, bits);
}

}  // namespace oseries
