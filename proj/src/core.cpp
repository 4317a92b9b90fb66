#include "oseries/core.hpp"

#include "oseries/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace oseries {

namespace {

const Transseries& zero_series() {
    static const Transseries z;
    return z;
}

const std::shared_ptr<const std::string>& identity_key() {
    static const auto k = std::make_shared<const std::string>("1");
    return k;
}

/// Process-wide interning of monomial keys: equal canonical forms share an
/// id, so equality and memoized operations reduce to integer lookups.
class MonoIntern {
public:
    std::uint32_t intern(const std::string& key) {
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = ids_.emplace(key, static_cast<std::uint32_t>(ids_.size() + 1));
        return it->second;
    }

private:
    std::mutex mu_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

MonoIntern& mono_intern() {
    static MonoIntern t;
    return t;
}

}  // namespace

Monomial::Monomial() : key_(identity_key()), id_(mono_intern().intern(*identity_key())) {}

const std::string& Monomial::key() const { return *key_; }

void Monomial::build_key() {
    if (log_powers_.empty() && !exp_arg_) {
        key_ = identity_key();
    } else {
        std::string k;
        for (const auto& [depth, a] : log_powers_) {
            k += 'l';
            k += std::to_string(depth);
            k += '^';
            k += a.cache_key();
            k += ';';
        }
        if (exp_arg_) {
            k += "E[";
            for (const Term& t : exp_arg_->terms()) {
                k += t.coeff.cache_key();
                k += '@';
                k += t.monomial.key();
                k += ';';
            }
            k += ']';
        }
        key_ = std::make_shared<const std::string>(std::move(k));
    }
    id_ = mono_intern().intern(*key_);
}

const Transseries& Monomial::exp_arg() const { return exp_arg_ ? *exp_arg_ : zero_series(); }

bool Monomial::is_identity() const { return log_powers_.empty() && !exp_arg_; }

bool Monomial::is_pure_logs() const { return !exp_arg_; }

std::optional<long> Monomial::as_log_atom() const {
    if (exp_arg_ || log_powers_.size() != 1) return std::nullopt;
    if (!log_powers_[0].second.is_one()) return std::nullopt;
    return log_powers_[0].first;
}

Monomial Monomial::make(std::vector<std::pair<long, ConstReal>> log_powers,
                        const Transseries& exp_arg, int max_bits) {
    return make_impl(std::move(log_powers), exp_arg, max_bits, /*verify=*/true);
}

Monomial Monomial::make_trusted(std::vector<std::pair<long, ConstReal>> log_powers,
                                const Transseries& exp_arg) {
    return make_impl(std::move(log_powers), exp_arg, kDefaultSignBits, /*verify=*/false);
}

Monomial Monomial::make_impl(std::vector<std::pair<long, ConstReal>> log_powers,
                             const Transseries& exp_arg, int max_bits, bool verify) {
    std::map<long, ConstReal> powers;
    auto bump = [&](long k, const ConstReal& a) {
        auto it = powers.find(k);
        if (it == powers.end()) {
            if (!a.is_zero()) powers.emplace(k, a);
        } else {
            it->second = const_add(it->second, a);
            if (it->second.is_zero()) powers.erase(it);
        }
    };
    for (auto& [k, a] : log_powers) {
        if (k < 0) throw Error("negative log depth");
        bump(k, a);
    }
    // Absorb plain-log terms of the exponent: r*log_j(w) with j >= 1 becomes
    // a power of log_{j-1}(w). Terms r*w stay in the exponent.
    std::vector<Term> residue;
    for (const Term& t : exp_arg.terms()) {
        auto atom = t.monomial.as_log_atom();
        if (atom && *atom >= 1)
            bump(*atom - 1, t.coeff);
        else
            residue.push_back(t);
    }
    Monomial m;
    m.log_powers_.assign(powers.begin(), powers.end());
    if (!residue.empty()) {
        Transseries gamma = residue.size() == exp_arg.size()
                                ? exp_arg
                                : Transseries::from_sorted(std::move(residue));
        if (verify) {
            for (const Term& t : gamma.terms()) {
                if (!mono_is_infinite(t.monomial, max_bits))
                    throw Error("monomial exponent is not purely infinite");
            }
        }
        m.exp_arg_ = std::make_shared<const Transseries>(std::move(gamma));
    }
    m.build_key();
    return m;
}

Monomial Monomial::omega() { return log_atom(0); }

Monomial Monomial::log_atom(long k) {
    Monomial m;
    m.log_powers_.emplace_back(k, ConstReal::one());
    m.build_key();
    return m;
}

Monomial Monomial::exponential(const Transseries& gamma, int max_bits) {
    return make({}, gamma, max_bits);
}

long Monomial::log_depth() const {
    long d = 0;
    for (const auto& [k, a] : log_powers_) d = std::max(d, k);
    if (exp_arg_)
        for (const Term& t : exp_arg_->terms()) d = std::max(d, t.monomial.log_depth());
    return d;
}

long Monomial::exp_height() const {
    if (!exp_arg_) return 0;
    long h = 0;
    for (const Term& t : exp_arg_->terms()) h = std::max(h, t.monomial.exp_height());
    return 1 + h;
}

Transseries::Transseries() = default;

Transseries Transseries::make(std::vector<Term> terms, int max_bits) {
    std::vector<Term> live;
    live.reserve(terms.size());
    for (auto& t : terms)
        if (!t.coeff.is_zero()) live.push_back(std::move(t));
    std::stable_sort(live.begin(), live.end(), [&](const Term& a, const Term& b) {
        return mono_compare(a.monomial, b.monomial, max_bits) == Cmp::Greater;
    });
    Transseries out;
    for (auto& t : live) {
        if (!out.terms_.empty() && mono_equal(out.terms_.back().monomial, t.monomial)) {
            out.terms_.back().coeff = const_add(out.terms_.back().coeff, t.coeff);
            if (out.terms_.back().coeff.is_zero()) out.terms_.pop_back();
        } else {
            out.terms_.push_back(std::move(t));
        }
    }
    return out;
}

Transseries Transseries::from_sorted(std::vector<Term> terms) {
    Transseries out;
    out.terms_ = std::move(terms);
    return out;
}

Transseries Transseries::constant(const ConstReal& c) {
    Transseries out;
    if (!c.is_zero()) out.terms_.push_back(Term{c, Monomial()});
    return out;
}

Transseries Transseries::constant(const Rat& q) { return constant(ConstReal(q)); }

Transseries Transseries::from_term(const ConstReal& coeff, const Monomial& m) {
    Transseries out;
    if (!coeff.is_zero()) out.terms_.push_back(Term{coeff, m});
    return out;
}

Transseries Transseries::from_monomial(const Monomial& m) {
    return from_term(ConstReal::one(), m);
}

Transseries Transseries::omega() { return from_monomial(Monomial::omega()); }

Transseries Transseries::log_atom(long k) { return from_monomial(Monomial::log_atom(k)); }

bool Transseries::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_[0].monomial.is_identity();
}

PurelyInfinite::PurelyInfinite() = default;

PurelyInfinite::PurelyInfinite(const Transseries& s, int max_bits) : series_(s) {
    for (const Term& t : s.terms()) {
        if (!mono_is_infinite(t.monomial, max_bits))
            throw Error("series is not purely infinite: " + s.to_string());
    }
}

PurelyInfinite PurelyInfinite::trusted(Transseries s) {
    PurelyInfinite out;
    out.series_ = std::move(s);
    return out;
}

bool mono_equal(const Monomial& m, const Monomial& n) { return m.id() == n.id(); }

bool ts_equal(const Transseries& x, const Transseries& y) {
    if (&x == &y) return true;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x.terms()[i].coeff.equals(y.terms()[i].coeff)) return false;
        if (!mono_equal(x.terms()[i].monomial, y.terms()[i].monomial)) return false;
    }
    return true;
}

Transseries merge_add(const Transseries& x, const Transseries& y, int max_bits) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    std::vector<Term> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        const Term& a = x.terms()[i];
        const Term& b = y.terms()[j];
        Cmp c = mono_compare(a.monomial, b.monomial, max_bits);
        if (c == Cmp::Greater) {
            out.push_back(a);
            ++i;
        } else if (c == Cmp::Less) {
            out.push_back(b);
            ++j;
        } else {
            ConstReal sum = const_add(a.coeff, b.coeff);
            if (!sum.is_zero()) out.push_back(Term{std::move(sum), a.monomial});
            ++i;
            ++j;
        }
    }
    for (; i < x.size(); ++i) out.push_back(x.terms()[i]);
    for (; j < y.size(); ++j) out.push_back(y.terms()[j]);
    return Transseries::from_sorted(std::move(out));
}

Transseries formal_log(const Monomial& m, int max_bits) {
    // log factors in increasing depth are already in decreasing monomial
    // order; merge with the (sorted) exponent.
    std::vector<Term> logs;
    logs.reserve(m.log_powers().size());
    for (const auto& [k, a] : m.log_powers()) logs.push_back(Term{a, Monomial::log_atom(k + 1)});
    return merge_add(Transseries::from_sorted(std::move(logs)), m.exp_arg(), max_bits);
}

namespace {

/// Lexicographic comparison of plain log monomials by increasing depth: the
/// factor with the smaller depth dominates, so the first differing exponent
/// decides.
Cmp pure_log_compare(const Monomial& m, const Monomial& n, int max_bits) {
    const auto& a = m.log_powers();
    const auto& b = n.log_powers();
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        long ka = i < a.size() ? a[i].first : -1;
        long kb = j < b.size() ? b[j].first : -1;
        if (i < a.size() && (j >= b.size() || ka < kb)) {
            Sign s = a[i].second.sign(max_bits);
            return s == Sign::Positive ? Cmp::Greater : Cmp::Less;
        }
        if (j < b.size() && (i >= a.size() || kb < ka)) {
            Sign s = b[j].second.sign(max_bits);
            return s == Sign::Positive ? Cmp::Less : Cmp::Greater;
        }
        // same depth
        int c = a[i].second.compare(b[j].second, max_bits);
        if (c != 0) return c > 0 ? Cmp::Greater : Cmp::Less;
        ++i;
        ++j;
    }
    return Cmp::Equal;
}

std::vector<Term> negated(const Transseries& x) {
    std::vector<Term> out;
    out.reserve(x.size());
    for (const Term& t : x.terms()) out.push_back(Term{const_neg(t.coeff), t.monomial});
    return out;
}

}  // namespace

namespace {

std::uint64_t pack_ids(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Decided monomial comparisons hold at any later precision, so they are
/// memoized globally by interned id.
class CompareCache {
public:
    std::optional<Cmp> lookup(std::uint32_t a, std::uint32_t b) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(pack_ids(a, b));
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }
    void store(std::uint32_t a, std::uint32_t b, Cmp c) {
        std::lock_guard<std::mutex> lock(mu_);
        table_.emplace(pack_ids(a, b), c);
        Cmp rev = c == Cmp::Less ? Cmp::Greater : (c == Cmp::Greater ? Cmp::Less : Cmp::Equal);
        table_.emplace(pack_ids(b, a), rev);
    }

private:
    std::mutex mu_;
    std::unordered_map<std::uint64_t, Cmp> table_;
};

CompareCache& compare_cache() {
    static CompareCache c;
    return c;
}

}  // namespace

Cmp mono_compare(const Monomial& m, const Monomial& n, int max_bits) {
    if (m.id() == n.id()) return Cmp::Equal;
    // Equal exponentials leave the order to the log powers, just like the
    // plain-log case (the formal logs differ by log factors only).
    if (ts_equal(m.exp_arg(), n.exp_arg())) return pure_log_compare(m, n, max_bits);
    CompareCache& cache = compare_cache();
    if (auto hit = cache.lookup(m.id(), n.id())) return *hit;
    // Compare by formal logs; the recursion descends in exponential height.
    Transseries d = merge_add(formal_log(m, max_bits),
                              Transseries::from_sorted(negated(formal_log(n, max_bits))),
                              max_bits);
    Cmp out;
    if (d.is_zero()) {
        out = Cmp::Equal;
    } else {
        Sign s = d.terms().front().coeff.sign(max_bits);
        out = s == Sign::Positive ? Cmp::Greater : Cmp::Less;
    }
    cache.store(m.id(), n.id(), out);
    return out;
}

bool mono_is_infinite(const Monomial& m, int max_bits) {
    return mono_compare(m, Monomial(), max_bits) == Cmp::Greater;
}

namespace {

class ProductCache {
public:
    std::optional<Monomial> lookup(std::uint64_t k) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(k);
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }
    void store(std::uint64_t k, const Monomial& m) {
        std::lock_guard<std::mutex> lock(mu_);
        table_.emplace(k, m);
    }

private:
    std::mutex mu_;
    std::unordered_map<std::uint64_t, Monomial> table_;
};

ProductCache& product_cache() {
    static ProductCache c;
    return c;
}

}  // namespace

Monomial mono_mul(const Monomial& m, const Monomial& n, int max_bits) {
    if (m.is_identity()) return n;
    if (n.is_identity()) return m;
    std::uint64_t key = pack_ids(std::min(m.id(), n.id()), std::max(m.id(), n.id()));
    ProductCache& cache = product_cache();
    if (auto hit = cache.lookup(key)) return *hit;
    std::vector<std::pair<long, ConstReal>> powers = m.log_powers();
    for (const auto& p : n.log_powers()) powers.push_back(p);
    Monomial out = Monomial::make_trusted(std::move(powers),
                                          merge_add(m.exp_arg(), n.exp_arg(), max_bits));
    cache.store(key, out);
    return out;
}

Monomial mono_inv(const Monomial& m, int max_bits) { return mono_pow(m, Rat(-1), max_bits); }

Monomial mono_pow(const Monomial& m, const Rat& q, int max_bits) {
    (void)max_bits;
    if (q == 0 || m.is_identity()) return Monomial();
    ConstReal scale{q};
    std::vector<std::pair<long, ConstReal>> powers;
    for (const auto& [k, a] : m.log_powers()) powers.emplace_back(k, const_mul(a, scale));
    std::vector<Term> exp_terms;
    for (const Term& t : m.exp_arg().terms())
        exp_terms.push_back(Term{const_mul(t.coeff, scale), t.monomial});
    return Monomial::make_trusted(std::move(powers),
                                  Transseries::from_sorted(std::move(exp_terms)));
}

Cmp ts_compare(const Transseries& x, const Transseries& y, int max_bits) {
    Transseries d = merge_add(x, Transseries::from_sorted(negated(y)), max_bits);
    if (d.is_zero()) return Cmp::Equal;
    Sign s = d.terms().front().coeff.sign(max_bits);
    return s == Sign::Positive ? Cmp::Greater : Cmp::Less;
}

Dominance dominance(const Transseries& x, const Transseries& y, int max_bits) {
    if (y.is_zero()) throw ZeroArgument("dominance against zero");
    if (x.is_zero()) return Dominance::StrictLess;
    Cmp c = mono_compare(leading_monomial(x), leading_monomial(y), max_bits);
    switch (c) {
        case Cmp::Less:
            return Dominance::StrictLess;
        case Cmp::Equal:
            return Dominance::Comparable;
        case Cmp::Greater:
            return Dominance::StrictGreater;
    }
    throw Error("unreachable");
}

bool asymptotic(const Transseries& x, const Transseries& y, int max_bits) {
    if (y.is_zero()) throw ZeroArgument("asymptotic comparison against zero");
    if (x.is_zero()) return false;
    const Term& tx = leading_term(x);
    const Term& ty = leading_term(y);
    if (mono_compare(tx.monomial, ty.monomial, max_bits) != Cmp::Equal) return false;
    return const_sub(tx.coeff, ty.coeff).is_zero() || tx.coeff.equals(ty.coeff);
}

Decomposition decompose(const Transseries& x, int max_bits) {
    std::vector<Term> big, small;
    ConstReal real;
    for (const Term& t : x.terms()) {
        if (t.monomial.is_identity()) {
            real = const_add(real, t.coeff);
            continue;
        }
        if (mono_is_infinite(t.monomial, max_bits))
            big.push_back(t);
        else
            small.push_back(t);
    }
    Decomposition d;
    d.big = PurelyInfinite::trusted(Transseries::from_sorted(std::move(big)));
    d.real = real;
    d.small = Transseries::from_sorted(std::move(small));
    return d;
}

Transseries truncate_at(const Transseries& x, std::size_t beta) {
    if (beta > x.size()) throw IndexOutOfRange("truncation index beyond series length");
    return Transseries::from_sorted(
        std::vector<Term>(x.terms().begin(), x.terms().begin() + beta));
}

bool is_truncation(const Transseries& y, const Transseries& x) {
    if (y.size() > x.size()) return false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y.terms()[i].coeff.equals(x.terms()[i].coeff)) return false;
        if (!mono_equal(y.terms()[i].monomial, x.terms()[i].monomial)) return false;
    }
    return true;
}

long erank(const Transseries& x, int max_bits) {
    if (x.is_zero()) return 0;
    if (x.size() == 1 && x.terms()[0].coeff.is_one() &&
        x.terms()[0].monomial.as_log_atom().has_value())
        return 0;
    long best = 0;
    for (const Term& t : x.terms()) {
        Transseries gamma = formal_log(t.monomial, max_bits);
        best = std::max(best, erank(gamma, max_bits) + 1);
    }
    return best;
}

const Monomial& leading_monomial(const Transseries& x) {
    if (x.is_zero()) throw ZeroArgument("leading monomial of zero");
    return x.terms().front().monomial;
}

const Term& leading_term(const Transseries& x) {
    if (x.is_zero()) throw ZeroArgument("leading term of zero");
    return x.terms().front();
}

PurelyInfinite log_up(const Transseries& x, int max_bits) {
    if (x.is_zero()) throw ZeroArgument("log_up of zero");
    if (leading_term(x).coeff.sign(max_bits) != Sign::Positive)
        throw NonPositiveArgument("log_up of a negative series");
    return PurelyInfinite(formal_log(leading_monomial(x), max_bits), max_bits);
}

long log_depth(const Transseries& x) {
    long d = 0;
    for (const Term& t : x.terms()) d = std::max(d, t.monomial.log_depth());
    return d;
}

long exp_height(const Transseries& x) {
    long h = 0;
    for (const Term& t : x.terms()) h = std::max(h, t.monomial.exp_height());
    return h;
}

}  // namespace oseries
