#pragma once

#include "oseries/frontend.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace oseries::testsupport {

using Rng = std::mt19937_64;

inline Rat random_rational(Rng& rng, bool nonzero = false) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 3);
    while (true) {
        int p = num(rng);
        if (nonzero && p == 0) continue;
        return Rat(p, den(rng));
    }
}

struct GenOptions {
    int height = 2;     // nesting depth of exponential factors
    int depth = 2;      // largest log iteration appearing as a factor
    int max_terms = 5;  // support size bound
    bool tame = false;  // half-integer exponents only, smaller supports
};

Transseries random_purely_infinite(Rng& rng, GenOptions opt, int height);

inline Monomial random_monomial(Rng& rng, const GenOptions& opt, int height) {
    std::vector<std::pair<long, ConstReal>> powers;
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<int> tame_num(-4, 4);
    for (long k = 0; k <= opt.depth; ++k) {
        if (pick(rng) != 0) continue;
        Rat e = opt.tame ? Rat(tame_num(rng), 2) : random_rational(rng, true);
        if (e == 0) e = 1;
        powers.emplace_back(k, ConstReal(e));
    }
    Transseries gamma;
    if (height > 0 && pick(rng) <= 1)
        gamma = random_purely_infinite(rng, opt, height - 1);
    return Monomial::make(std::move(powers), gamma);
}

inline Transseries random_purely_infinite(Rng& rng, GenOptions opt, int height) {
    std::uniform_int_distribution<int> count(1, opt.tame ? 2 : 3);
    std::vector<Term> terms;
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
        Monomial m = random_monomial(rng, opt, height);
        if (m.is_identity()) m = Monomial::omega();
        if (!mono_is_infinite(m)) m = mono_inv(m);
        if (!mono_is_infinite(m)) continue;
        terms.push_back(Term{ConstReal(random_rational(rng, true)), m});
    }
    if (terms.empty()) terms.push_back(Term{ConstReal(1L), Monomial::omega()});
    return Transseries::make(std::move(terms));
}

/// Random series with rational coefficients within the given shape bounds.
inline Transseries random_series(Rng& rng, const GenOptions& opt = {}) {
    std::uniform_int_distribution<int> count(0, opt.max_terms);
    std::vector<Term> terms;
    int n = count(rng);
    for (int i = 0; i < n; ++i)
        terms.push_back(Term{ConstReal(random_rational(rng, true)),
                             random_monomial(rng, opt, opt.height)});
    return Transseries::make(std::move(terms));
}

inline Transseries random_nonzero_series(Rng& rng, const GenOptions& opt = {}) {
    while (true) {
        Transseries s = random_series(rng, opt);
        if (!s.is_zero()) return s;
    }
}

/// Random series exceeding every real (positive leading term, infinite
/// leading monomial).
inline Transseries random_positive_infinite(Rng& rng, const GenOptions& opt = {}) {
    for (int tries = 0; tries < 200; ++tries) {
        Transseries s = random_series(rng, opt);
        if (s.is_zero()) continue;
        if (is_positive_infinite(s)) return s;
        Transseries n = ts_neg(s);
        if (is_positive_infinite(n)) return n;
    }
    return Transseries::omega();
}

/// Positive series (positive leading coefficient).
inline Transseries random_positive_series(Rng& rng, const GenOptions& opt = {}) {
    while (true) {
        Transseries s = random_series(rng, opt);
        if (s.is_zero()) continue;
        if (leading_term(s).coeff.sign() == Sign::Positive) return s;
        return ts_neg(s);
    }
}

/// Parse and evaluate a fixture expression; throws if the evaluation is not
/// exact (fixtures are expected to stay in the exact fragment).
inline Transseries ts(const std::string& text, int max_terms = 64) {
    EvalReport r = evaluate(*parse(text), TruncationBudget{max_terms, kDefaultSignBits});
    if (!r.result.exact)
        throw std::runtime_error("fixture did not evaluate exactly: " + text);
    return r.result.value;
}

/// Budgeted fixture evaluation.
inline TruncatedResult ts_budgeted(const std::string& text, int max_terms) {
    return evaluate(*parse(text), TruncationBudget{max_terms, kDefaultSignBits}).result;
}

inline Monomial mono(const std::string& text) {
    Transseries s = ts(text);
    if (s.size() != 1 || !s.terms()[0].coeff.is_one())
        throw std::runtime_error("not a monomial fixture: " + text);
    return s.terms()[0].monomial;
}

}  // namespace oseries::testsupport
