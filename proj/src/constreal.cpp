#include "oseries/constreal.hpp"

#include <algorithm>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace oseries {

namespace {
enum class AtomKind { Exp, Log, Inv };
}

struct Atom;
using AtomPtr = std::shared_ptr<const Atom>;

namespace {

struct Factor {
    AtomPtr atom;
    long power;  // nonzero
};

struct Product {
    std::vector<Factor> factors;  // sorted by atom order, nonempty
};

using TermVec = std::vector<std::pair<Product, Rat>>;

}  // namespace

struct ConstReal::Impl {
    Rat rational;
    TermVec terms;  // sorted by product order, rational coefficients nonzero

    mutable std::mutex cache_mu;
    mutable std::optional<Interval> cache;
    mutable int cache_bits = 0;
    mutable std::optional<std::string> key;
};

struct Atom {
    AtomKind kind;
    ConstReal arg;
    // For Log/Inv: precision at which the argument's enclosure separates
    // from zero, recorded when the domain condition was proved.
    int witness_bits = 0;
};

namespace {

/// Structural order via the cached canonical keys: any fixed total order on
/// canonical forms works, and key comparison avoids deep recursion.
int atom_cmp(const AtomPtr& a, const AtomPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    return a->arg.cache_key().compare(b->arg.cache_key());
}

int product_cmp(const Product& a, const Product& b) {
    std::size_t n = std::min(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = atom_cmp(a.factors[i].atom, b.factors[i].atom);
        if (c != 0) return c;
        if (a.factors[i].power != b.factors[i].power)
            return a.factors[i].power < b.factors[i].power ? -1 : 1;
    }
    if (a.factors.size() != b.factors.size())
        return a.factors.size() < b.factors.size() ? -1 : 1;
    return 0;
}

int impl_cmp(const ConstReal::Impl& a, const ConstReal::Impl& b) {
    if (&a == &b) return 0;
    if (a.rational != b.rational) return a.rational < b.rational ? -1 : 1;
    if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        int c = product_cmp(a.terms[i].first, b.terms[i].first);
        if (c != 0) return c;
        if (a.terms[i].second != b.terms[i].second)
            return a.terms[i].second < b.terms[i].second ? -1 : 1;
    }
    return 0;
}

std::shared_ptr<const ConstReal::Impl> make_impl(Rat rational, TermVec terms) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& x, const auto& y) { return product_cmp(x.first, y.first) < 0; });
    TermVec merged;
    for (auto& t : terms) {
        if (t.second == 0) continue;
        if (!merged.empty() && product_cmp(merged.back().first, t.first) == 0) {
            merged.back().second += t.second;
            if (merged.back().second == 0) merged.pop_back();
        } else {
            merged.push_back(std::move(t));
        }
    }
    auto impl = std::make_shared<ConstReal::Impl>();
    impl->rational = std::move(rational);
    impl->terms = std::move(merged);
    return impl;
}

/// For term vectors already in canonical sorted-merged shape.
std::shared_ptr<const ConstReal::Impl> make_impl_sorted(Rat rational, TermVec terms) {
    auto impl = std::make_shared<ConstReal::Impl>();
    impl->rational = std::move(rational);
    impl->terms = std::move(terms);
    return impl;
}

ConstReal from_impl(Rat rational, TermVec terms) {
    return ConstReal(make_impl(std::move(rational), std::move(terms)));
}

ConstReal atom_value(AtomKind kind, ConstReal arg, int witness_bits = 0) {
    auto atom = std::make_shared<Atom>();
    atom->kind = kind;
    atom->arg = std::move(arg);
    atom->witness_bits = witness_bits;
    Product p;
    p.factors.push_back(Factor{std::move(atom), 1});
    TermVec terms;
    terms.emplace_back(std::move(p), Rat(1));
    return from_impl(Rat(0), std::move(terms));
}

/// Canonicalize a factor list: sort, merge equal atoms, fuse exp atoms into
/// one via exp(a)^m * exp(b)^n = exp(m*a + n*b). Returns the surviving
/// factors plus a rational multiplier (from factors collapsing to 1) and an
/// optional residual value for exp arguments that normalize further.
struct ProductNorm {
    std::vector<Factor> factors;
    ConstReal multiplier;  // extra value to multiply in (from exp-of-log pullout)
};

ConstReal mul_impl(const ConstReal& a, const ConstReal& b);

ProductNorm normalize_factors(std::vector<Factor> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const Factor& x, const Factor& y) { return atom_cmp(x.atom, y.atom) < 0; });
    std::vector<Factor> merged;
    for (auto& f : raw) {
        if (f.power == 0) continue;
        if (!merged.empty() && atom_cmp(merged.back().atom, f.atom) == 0) {
            merged.back().power += f.power;
            if (merged.back().power == 0) merged.pop_back();
        } else {
            merged.push_back(std::move(f));
        }
    }
    // Fuse exp factors.
    ConstReal exp_arg;  // zero
    std::vector<Factor> rest;
    bool saw_exp = false;
    for (auto& f : merged) {
        if (f.atom->kind == AtomKind::Exp) {
            saw_exp = true;
            ConstReal scaled = f.atom->arg;
            if (f.power != 1) scaled = mul_impl(scaled, ConstReal(Rat(f.power)));
            exp_arg = const_add(exp_arg, scaled);
        } else {
            rest.push_back(std::move(f));
        }
    }
    ProductNorm out;
    out.multiplier = ConstReal::one();
    out.factors = std::move(rest);
    if (saw_exp && !exp_arg.is_zero()) {
        // Re-run the exp smart constructor: it may pull rational powers back
        // out of log atoms.
        ConstReal e = const_exp(exp_arg);
        const auto& ei = e.impl();
        if (ei.rational == 0 && ei.terms.size() == 1 && ei.terms[0].second == 1) {
            for (const auto& f : ei.terms[0].first.factors) out.factors.push_back(f);
            std::sort(out.factors.begin(), out.factors.end(),
                      [](const Factor& x, const Factor& y) { return atom_cmp(x.atom, y.atom) < 0; });
        } else {
            out.multiplier = e;
        }
    }
    return out;
}

ConstReal term_value(const Product& p, const Rat& coeff) {
    TermVec terms;
    terms.emplace_back(p, coeff);
    return from_impl(Rat(0), std::move(terms));
}

ConstReal mul_impl(const ConstReal& a, const ConstReal& b) {
    const auto& ia = a.impl();
    const auto& ib = b.impl();
    if (ia.terms.empty() && ib.terms.empty()) return ConstReal(Rat(ia.rational * ib.rational));
    if (ia.terms.empty() && ia.rational == 1) return b;
    if (ib.terms.empty() && ib.rational == 1) return a;
    Rat rational = ia.rational * ib.rational;
    TermVec terms;
    for (const auto& t : ib.terms)
        if (ia.rational != 0) terms.emplace_back(t.first, t.second * ia.rational);
    for (const auto& t : ia.terms)
        if (ib.rational != 0) terms.emplace_back(t.first, t.second * ib.rational);
    std::vector<ConstReal> extras;
    for (const auto& ta : ia.terms) {
        for (const auto& tb : ib.terms) {
            std::vector<Factor> raw = ta.first.factors;
            raw.insert(raw.end(), tb.first.factors.begin(), tb.first.factors.end());
            ProductNorm norm = normalize_factors(std::move(raw));
            Rat coeff = ta.second * tb.second;
            if (norm.multiplier.is_one()) {
                if (norm.factors.empty()) {
                    rational += coeff;
                } else {
                    Product p;
                    p.factors = std::move(norm.factors);
                    terms.emplace_back(std::move(p), std::move(coeff));
                }
            } else {
                ConstReal piece;
                if (norm.factors.empty()) {
                    piece = ConstReal(coeff);
                } else {
                    Product p;
                    p.factors = std::move(norm.factors);
                    piece = term_value(p, coeff);
                }
                extras.push_back(mul_impl(piece, norm.multiplier));
            }
        }
    }
    ConstReal acc = from_impl(std::move(rational), std::move(terms));
    for (const ConstReal& e : extras) acc = const_add(acc, e);
    return acc;
}

/// Factor a positive integer over primes <= 4096; the unfactored remainder
/// (if any) is returned in `rest`.
std::vector<std::pair<Int, long>> factor_small(Int n, Int& rest) {
    std::vector<std::pair<Int, long>> out;
    for (long p = 2; p <= 4096 && n > 1; p = (p == 2 ? 3 : p + 2)) {
        if (n % p == 0) {
            long e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(Int(p), e);
        }
    }
    rest = n;
    return out;
}

ConstReal log_of_rational(const Rat& q, int max_bits) {
    if (q <= 0) throw LogNonPositive("log of nonpositive rational " + rat_to_string(q));
    if (q == 1) return ConstReal::zero();
    ConstReal acc;
    auto add_part = [&](Int n, long sign) {
        Int rest;
        auto fac = factor_small(n, rest);
        for (auto& [p, e] : fac) {
            ConstReal lp = atom_value(AtomKind::Log, ConstReal(Rat(p)), 8);
            acc = const_add(acc, mul_impl(lp, ConstReal(Rat(sign * e))));
        }
        if (rest > 1) {
            ConstReal lr = atom_value(AtomKind::Log, ConstReal(Rat(rest)), 8);
            acc = const_add(acc, mul_impl(lr, ConstReal(Rat(sign))));
        }
    };
    (void)max_bits;
    add_part(rat_num(q), 1);
    add_part(rat_den(q), -1);
    return acc;
}

/// Sign of an atom's value, decided by enclosure when needed.
Sign atom_sign(const AtomPtr& atom, int max_bits);

Interval atom_enclosure(const AtomPtr& atom, int bits);

Interval impl_enclosure(const ConstReal::Impl& impl, int bits) {
    Interval acc = Interval::point(impl.rational);
    for (const auto& [product, coeff] : impl.terms) {
        Interval term = Interval::point(coeff);
        for (const auto& f : product.factors) {
            Interval base = atom_enclosure(f.atom, bits + 8);
            term = iv_mul(term, iv_pow(base, f.power, bits + 8), bits + 8);
        }
        acc = iv_add(acc, term, bits + 4);
    }
    return iv_round(acc, bits);
}

Interval atom_enclosure(const AtomPtr& atom, int bits) {
    switch (atom->kind) {
        case AtomKind::Exp:
            return iv_exp(atom->arg.enclosure(bits + 4), bits);
        case AtomKind::Log: {
            int b = std::max(bits + 4, atom->witness_bits);
            Interval arg = atom->arg.enclosure(b);
            while (arg.lo <= 0 && b < atom->witness_bits + 64) {
                b *= 2;
                arg = atom->arg.enclosure(b);
            }
            if (arg.lo <= 0)
                throw SignUndecided("log argument no longer separates from zero");
            return iv_log(arg, bits);
        }
        case AtomKind::Inv: {
            int b = std::max(bits + 4, atom->witness_bits);
            Interval arg = atom->arg.enclosure(b);
            while (arg.contains_zero() && b < atom->witness_bits + 64) {
                b *= 2;
                arg = atom->arg.enclosure(b);
            }
            if (arg.contains_zero())
                throw SignUndecided("inverse argument no longer separates from zero");
            return iv_inv(arg, bits);
        }
    }
    throw Error("unreachable atom kind");
}

Sign atom_sign(const AtomPtr& atom, int max_bits) {
    if (atom->kind == AtomKind::Exp) return Sign::Positive;
    for (int bits = 16; bits <= max_bits; bits *= 2) {
        Interval iv = atom_enclosure(atom, bits);
        if (iv.is_positive()) return Sign::Positive;
        if (iv.is_negative()) return Sign::Negative;
    }
    throw SignUndecided("atom sign undecided");
}

/// Content used to normalize arguments of opaque log/inv atoms: the
/// coefficient of the structurally first component.
Rat content_of(const ConstReal::Impl& impl) {
    if (impl.rational != 0) return impl.rational;
    if (!impl.terms.empty()) return impl.terms[0].second;
    return Rat(1);
}

Int int_nth_root_exact(const Int& n, unsigned long k) {
    // Returns r with r^k == n, or -1 if no exact root. n >= 0.
    if (n == 0 || n == 1) return n;
    Int lo = 1, hi = n;
    while (lo <= hi) {
        Int mid = (lo + hi) / 2;
        Int p = 1;
        bool over = false;
        for (unsigned long i = 0; i < k; ++i) {
            p *= mid;
            if (p > n) {
                over = true;
                break;
            }
        }
        if (!over && p == n) return mid;
        if (over || p > n)
            hi = mid - 1;
        else
            lo = mid + 1;
    }
    return Int(-1);
}

}  // namespace

namespace {

const std::shared_ptr<const ConstReal::Impl>& zero_impl() {
    static const std::shared_ptr<const ConstReal::Impl> z = make_impl(Rat(0), {});
    return z;
}

}  // namespace

ConstReal::ConstReal() : impl_(zero_impl()) {}
ConstReal::ConstReal(long n) : impl_(n == 0 ? zero_impl() : make_impl(Rat(n), {})) {}
ConstReal::ConstReal(const Rat& q) : impl_(q == 0 ? zero_impl() : make_impl(q, {})) {}

ConstReal ConstReal::zero() { return ConstReal(); }
ConstReal ConstReal::one() { return ConstReal(1); }

bool ConstReal::is_rational() const { return impl_->terms.empty(); }
bool ConstReal::is_zero() const { return impl_->terms.empty() && impl_->rational == 0; }
bool ConstReal::is_one() const { return impl_->terms.empty() && impl_->rational == 1; }

const Rat& ConstReal::rational_value() const {
    if (!is_rational()) throw Error("rational_value on irrational constant");
    return impl_->rational;
}

Sign ConstReal::sign(int max_bits) const {
    if (is_rational()) {
        int s = rat_sign(impl_->rational);
        return s < 0 ? Sign::Negative : (s > 0 ? Sign::Positive : Sign::Zero);
    }
    for (int bits = 16;; bits *= 2) {
        if (bits > max_bits) bits = max_bits;
        Interval iv = enclosure(bits);
        if (iv.is_positive()) return Sign::Positive;
        if (iv.is_negative()) return Sign::Negative;
        if (bits == max_bits) break;
    }
    throw SignUndecided("sign of " + to_string() + " undecided at " +
                        std::to_string(max_bits) + " bits");
}

int ConstReal::compare(const ConstReal& other, int max_bits) const {
    if (equals(other)) return 0;
    Sign s = const_sub(*this, other).sign(max_bits);
    return s == Sign::Negative ? -1 : (s == Sign::Positive ? 1 : 0);
}

bool ConstReal::equals(const ConstReal& other) const {
    if (impl_.get() == other.impl_.get()) return true;
    return cache_key() == other.cache_key();
}

Interval ConstReal::enclosure(int bits) const {
    {
        std::lock_guard<std::mutex> lock(impl_->cache_mu);
        if (impl_->cache && impl_->cache_bits >= bits) return *impl_->cache;
    }
    Interval fresh = impl_enclosure(*impl_, bits);
    std::lock_guard<std::mutex> lock(impl_->cache_mu);
    if (impl_->cache) fresh = iv_meet(fresh, *impl_->cache);
    impl_->cache = fresh;
    impl_->cache_bits = std::max(impl_->cache_bits, bits);
    return fresh;
}

int ConstReal::struct_cmp(const ConstReal& a, const ConstReal& b) {
    return impl_cmp(*a.impl_, *b.impl_);
}

bool ConstReal::leading_negative() const {
    if (impl_->rational != 0) return impl_->rational < 0;
    if (!impl_->terms.empty()) return impl_->terms[0].second < 0;
    return false;
}

ConstReal const_add(const ConstReal& a, const ConstReal& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const auto& ia = a.impl();
    const auto& ib = b.impl();
    // Both term lists are canonical; merge linearly.
    TermVec merged;
    merged.reserve(ia.terms.size() + ib.terms.size());
    std::size_t i = 0, j = 0;
    while (i < ia.terms.size() && j < ib.terms.size()) {
        int c = product_cmp(ia.terms[i].first, ib.terms[j].first);
        if (c < 0) {
            merged.push_back(ia.terms[i++]);
        } else if (c > 0) {
            merged.push_back(ib.terms[j++]);
        } else {
            Rat sum = ia.terms[i].second + ib.terms[j].second;
            if (sum != 0) merged.emplace_back(ia.terms[i].first, std::move(sum));
            ++i;
            ++j;
        }
    }
    for (; i < ia.terms.size(); ++i) merged.push_back(ia.terms[i]);
    for (; j < ib.terms.size(); ++j) merged.push_back(ib.terms[j]);
    return ConstReal(make_impl_sorted(ia.rational + ib.rational, std::move(merged)));
}

ConstReal const_neg(const ConstReal& a) {
    const auto& ia = a.impl();
    TermVec terms = ia.terms;
    for (auto& t : terms) t.second = -t.second;
    return from_impl(-ia.rational, std::move(terms));
}

ConstReal const_sub(const ConstReal& a, const ConstReal& b) { return const_add(a, const_neg(b)); }

ConstReal const_mul(const ConstReal& a, const ConstReal& b) { return mul_impl(a, b); }

ConstReal const_inv(const ConstReal& a, int max_bits) {
    if (a.is_zero()) throw DivisionByZero("inverse of zero");
    if (a.is_rational()) return ConstReal(Rat(1) / a.rational_value());
    Sign s = a.sign(max_bits);  // may throw SignUndecided
    const auto& ia = a.impl();
    if (ia.rational == 0 && ia.terms.size() == 1) {
        // Single product: invert the coefficient and negate factor powers.
        std::vector<Factor> raw = ia.terms[0].first.factors;
        for (auto& f : raw) f.power = -f.power;
        ProductNorm norm = normalize_factors(std::move(raw));
        Rat coeff = Rat(1) / ia.terms[0].second;
        ConstReal out;
        if (norm.factors.empty()) {
            out = ConstReal(coeff);
        } else {
            Product p;
            p.factors = std::move(norm.factors);
            out = term_value(p, coeff);
        }
        if (!norm.multiplier.is_one()) out = mul_impl(out, norm.multiplier);
        return out;
    }
    // Opaque inverse of a normalized argument.
    (void)s;
    Rat c = content_of(ia);
    ConstReal scaled = mul_impl(a, ConstReal(Rat(1) / c));
    int witness = max_bits;
    for (int bits = 16; bits <= max_bits; bits *= 2) {
        Interval iv = scaled.enclosure(bits);
        if (!iv.contains_zero()) {
            witness = bits;
            break;
        }
    }
    ConstReal inv_atom = atom_value(AtomKind::Inv, scaled, witness);
    return mul_impl(inv_atom, ConstReal(Rat(1) / c));
}

ConstReal const_div(const ConstReal& a, const ConstReal& b, int max_bits) {
    return const_mul(a, const_inv(b, max_bits));
}

ConstReal const_exp(const ConstReal& a) {
    if (a.is_zero()) return ConstReal::one();
    const auto& ia = a.impl();
    // Pull integer parts of rational multiples of plain log atoms:
    // exp(q*log v + r) = v^floor(q) * exp((q - floor(q))*log v + r).
    ConstReal pulled = ConstReal::one();
    TermVec remainder;
    for (const auto& t : ia.terms) {
        const Product& p = t.first;
        if (p.factors.size() == 1 && p.factors[0].atom->kind == AtomKind::Log &&
            p.factors[0].power == 1) {
            const Rat& q = t.second;
            Int fl = rat_num(q) / rat_den(q);
            if (q < 0 && fl * rat_den(q) != rat_num(q)) fl -= 1;
            if (fl != 0)
                pulled =
                    const_mul(pulled, const_pow_int(p.factors[0].atom->arg,
                                                    static_cast<long>(fl)));
            Rat frac = q - Rat(fl);
            if (frac != 0) remainder.emplace_back(p, frac);
        } else {
            remainder.push_back(t);
        }
    }
    ConstReal rest = from_impl(ia.rational, std::move(remainder));
    if (rest.is_zero()) return pulled;
    ConstReal e = atom_value(AtomKind::Exp, rest);
    return pulled.is_one() ? e : const_mul(pulled, e);
}

ConstReal const_log(const ConstReal& a, int max_bits) {
    if (a.sign(max_bits) != Sign::Positive)
        throw LogNonPositive("log of nonpositive value " + a.to_string());
    if (a.is_one()) return ConstReal::zero();
    const auto& ia = a.impl();
    if (a.is_rational()) return log_of_rational(ia.rational, max_bits);
    if (ia.rational == 0 && ia.terms.size() == 1) {
        // log(q * prod F^e) = log q + sum e*log F, valid when each factor is
        // provably positive.
        const Rat& q = ia.terms[0].second;
        bool splittable = q > 0;
        if (splittable) {
            for (const auto& f : ia.terms[0].first.factors) {
                try {
                    if (atom_sign(f.atom, max_bits) != Sign::Positive) {
                        splittable = false;
                        break;
                    }
                } catch (const SignUndecided&) {
                    splittable = false;
                    break;
                }
            }
        }
        if (splittable) {
            ConstReal acc = q == 1 ? ConstReal::zero() : log_of_rational(q, max_bits);
            for (const auto& f : ia.terms[0].first.factors) {
                ConstReal lf;
                switch (f.atom->kind) {
                    case AtomKind::Exp:
                        lf = f.atom->arg;
                        break;
                    case AtomKind::Log:
                        lf = atom_value(AtomKind::Log, atom_value(AtomKind::Log, f.atom->arg,
                                                                  f.atom->witness_bits),
                                        max_bits);
                        break;
                    case AtomKind::Inv:
                        lf = const_neg(const_log(f.atom->arg, max_bits));
                        break;
                }
                acc = const_add(acc, const_mul(lf, ConstReal(Rat(f.power))));
            }
            return acc;
        }
    }
    // Opaque log of a content-normalized argument.
    Rat c = content_of(ia);
    Rat ac = c < 0 ? -c : c;
    ConstReal scaled = mul_impl(a, ConstReal(Rat(1) / ac));
    int witness = max_bits;
    for (int bits = 16; bits <= max_bits; bits *= 2) {
        Interval iv = scaled.enclosure(bits);
        if (iv.is_positive()) {
            witness = bits;
            break;
        }
    }
    ConstReal la = atom_value(AtomKind::Log, scaled, witness);
    if (ac == 1) return la;
    return const_add(log_of_rational(ac, max_bits), la);
}

Sign const_sign(const ConstReal& a, int max_bits) { return a.sign(max_bits); }

ConstReal const_pow_int(const ConstReal& a, long n, int max_bits) {
    if (n == 0) return ConstReal::one();
    bool neg = n < 0;
    unsigned long k = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    ConstReal acc = ConstReal::one();
    ConstReal base = a;
    while (k) {
        if (k & 1) acc = const_mul(acc, base);
        k >>= 1;
        if (k) base = const_mul(base, base);
    }
    return neg ? const_inv(acc, max_bits) : acc;
}

ConstReal const_pow_rational(const ConstReal& a, const Rat& q, int max_bits) {
    if (is_integer(q)) return const_pow_int(a, static_cast<long>(rat_num(q)), max_bits);
    if (a.is_rational()) {
        const Rat& base = a.rational_value();
        if (base > 0) {
            unsigned long den = static_cast<unsigned long>(rat_den(q));
            Int rn = int_nth_root_exact(rat_num(base), den);
            Int rd = int_nth_root_exact(rat_den(base), den);
            if (rn >= 0 && rd >= 0) {
                Rat root(rn, rd);
                return ConstReal(rat_pow(root, static_cast<long>(rat_num(q))));
            }
        }
    }
    return const_exp(const_mul(ConstReal(q), const_log(a, max_bits)));
}

namespace {

std::string product_to_string(const Product& p, const Rat& coeff);

std::string atom_base_string(const AtomPtr& atom) {
    switch (atom->kind) {
        case AtomKind::Exp:
            return "exp(" + atom->arg.to_string() + ")";
        case AtomKind::Log:
            return "log(" + atom->arg.to_string() + ")";
        case AtomKind::Inv:
            return "(" + atom->arg.to_string() + ")";
    }
    return "?";
}

std::string product_to_string(const Product& p, const Rat& coeff) {
    std::string out;
    Rat ac = coeff < 0 ? -coeff : coeff;
    bool need_star = false;
    if (ac != 1 || p.factors.empty()) {
        out += rat_to_string(ac);
        need_star = true;
    }
    for (const auto& f : p.factors) {
        if (need_star) out += "*";
        long power = f.power;
        if (f.atom->kind == AtomKind::Inv) power = -power;
        out += atom_base_string(f.atom);
        if (power != 1) out += "^" + std::to_string(power);
        need_star = true;
    }
    return out;
}

}  // namespace

namespace {

void append_key(const ConstReal::Impl& impl, std::string& out);

void append_product_key(const Product& p, std::string& out) {
    for (const auto& f : p.factors) {
        switch (f.atom->kind) {
            case AtomKind::Exp:
                out += 'e';
                break;
            case AtomKind::Log:
                out += 'l';
                break;
            case AtomKind::Inv:
                out += 'i';
                break;
        }
        out += '(';
        append_key(f.atom->arg.impl(), out);
        out += ")^";
        out += std::to_string(f.power);
    }
}

void append_key(const ConstReal::Impl& impl, std::string& out) {
    out += rat_to_string(impl.rational);
    for (const auto& [product, coeff] : impl.terms) {
        out += '+';
        out += rat_to_string(coeff);
        out += '*';
        append_product_key(product, out);
    }
}

}  // namespace

const std::string& ConstReal::cache_key() const {
    std::lock_guard<std::mutex> lock(impl_->cache_mu);
    if (!impl_->key) {
        std::string k;
        append_key(*impl_, k);
        impl_->key = std::move(k);
    }
    return *impl_->key;
}

ConstReal::Parts ConstReal::parts() const {
    Parts out;
    out.rational = impl_->rational;
    for (const auto& [product, coeff] : impl_->terms) {
        Parts::Product pp;
        pp.coeff = coeff;
        for (const auto& f : product.factors) {
            ConstFactorKind kind = f.atom->kind == AtomKind::Exp
                                       ? ConstFactorKind::Exp
                                       : (f.atom->kind == AtomKind::Log ? ConstFactorKind::Log
                                                                        : ConstFactorKind::Inv);
            pp.factors.push_back(Parts::Factor{kind, f.atom->arg, f.power});
        }
        out.products.push_back(std::move(pp));
    }
    return out;
}

std::string ConstReal::to_string() const {
    const auto& impl = *impl_;
    if (impl.terms.empty()) return rat_to_string(impl.rational);
    std::string out;
    bool first = true;
    for (const auto& [product, coeff] : impl.terms) {
        if (first) {
            if (coeff < 0) out += "-";
            first = false;
        } else {
            out += coeff < 0 ? " - " : " + ";
        }
        out += product_to_string(product, coeff);
    }
    if (impl.rational != 0) {
        out += impl.rational < 0 ? " - " : " + ";
        Rat ac = impl.rational < 0 ? Rat(-impl.rational) : impl.rational;
        out += rat_to_string(ac);
    }
    return out;
}

}  // namespace oseries
