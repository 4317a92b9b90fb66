#pragma once

#include "oseries/analysis.hpp"

#include <mutex>
#include <vector>

namespace oseries {

/// Substitution target g > R together with the cached budgeted values of
/// log_k(g). The cache is append-only and idempotent; readers may share a
/// Substitution across threads.
class Substitution {
public:
    Substitution(Transseries target, TruncationBudget budget);

    const Transseries& target() const { return target_; }
    const TruncationBudget& budget() const { return budget_; }

    /// log_k(g); k = 0 is g itself (exact).
    TruncatedResult log_base(long k) const;

private:
    Transseries target_;
    TruncationBudget budget_;
    mutable std::mutex mu_;
    mutable std::vector<TruncatedResult> cache_;
};

/// f o g by structural recursion: log atoms map to iterated logs of g,
/// log powers to exp of scaled logs, and a term r*e^gamma to
/// r*exp(gamma o g). Requires g > R.
TruncatedResult compose(const Transseries& f, const Transseries& g,
                        const TruncationBudget& budget = {});
TruncatedResult compose(const Transseries& f, const Substitution& sub);

/// f o w must reproduce f exactly.
bool compose_right_identity_check(const Transseries& f, const TruncationBudget& budget = {});

/// A tree presenting one term of a composition. The root is a generalized
/// term coeff*e^exponent (for a canonical term r*m the exponent is log m).
/// A root that is itself a log atom log_k(w) is a leaf carrying one term of
/// log_k(g); otherwise each child's root is a term of the exponent and every
/// child's contribution is infinitesimal.
struct AdmissibleTree {
    ConstReal root_coeff;
    Transseries root_exponent;
    long delta_index = -1;  // >= 0 marks the log-atom leaf case
    Term leaf_value;        // designated term when delta_index >= 0
    std::vector<AdmissibleTree> children;

    long size() const;
};

/// All admissible trees with root t whose contribution is >= cutoff (with
/// children listed in a canonical order, i.e. up to reordering). Throws
/// BudgetExhausted when a tree would exceed max_size while still passing
/// the cutoff.
std::vector<AdmissibleTree> enumerate_admissible_trees(const Term& t, const Substitution& sub,
                                                       const Monomial& cutoff, long max_size);

/// Generalized-root variant: root is coeff*e^exponent.
std::vector<AdmissibleTree> enumerate_admissible_trees(const ConstReal& coeff,
                                                       const Transseries& exponent,
                                                       const Substitution& sub,
                                                       const Monomial& cutoff, long max_size);

/// Leaf: its designated term. Internal node with exponent gamma and n
/// children: root_coeff * e^{(gamma o g) purely-infinite-plus-real} * (1/n!)
/// * product of child contributions.
Term contribution(const AdmissibleTree& tree, const Substitution& sub);

/// Sums tree contributions (over ordered tuples of children) across all
/// terms of f, keeping monomials >= cutoff. Agrees with compose there.
Transseries tree_oracle_compose(const Transseries& f, const Transseries& g,
                                const Monomial& cutoff, long max_size,
                                const TruncationBudget& budget = TruncationBudget{64, kDefaultSignBits});

/// Taylor data for f around x: coefficient n is (d^n f o x)/n!.
struct TaylorExpansion {
    Transseries center;
    std::vector<TruncatedResult> coefficients;
    long order = 0;
};

TaylorExpansion taylor_expand(const Transseries& f, const Transseries& x, long order,
                              const TruncationBudget& budget = {});

/// Checks f o (x+eps) against the Taylor sum of the given order on every
/// monomial above the certified bounds. eps must lie strictly below every
/// monomial of the computed coefficients.
bool taylor_check(const Transseries& f, const Transseries& x, const Transseries& eps, long order,
                  const TruncationBudget& budget = {});

}  // namespace oseries
