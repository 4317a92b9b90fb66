#pragma once

#include "oseries/errors.hpp"
#include "oseries/interval.hpp"
#include "oseries/rational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace oseries {

/// Default refinement cutoff for sign queries, in bits.
inline constexpr int kDefaultSignBits = 256;

enum class Sign { Negative, Zero, Positive };

/// An exact element of the coefficient field: the closure of the rationals
/// under +, -, *, /, exp and log.
///
/// Values are held in a canonical sum-of-products form
///     q0 + sum_i q_i * prod_j atom_{ij}^{e_ij}
/// with rational q's, integer e's, and atoms exp(v), log(v) or (v)^-1 over
/// further ConstReal arguments. Rational-only expressions fold to q0, exp
/// atoms in a product merge their arguments, exp(log v) and log(exp v)
/// collapse, and logs of rationals split over small prime factors. Equality
/// of canonical forms is structural; order is decided by interval refinement
/// and may raise SignUndecided.
///
/// Values are immutable; the cached interval enclosure refines under a lock,
/// so sharing across threads is safe.
class ConstReal {
public:
    ConstReal();  // zero
    ConstReal(long n);
    explicit ConstReal(const Rat& q);

    static ConstReal zero();
    static ConstReal one();

    bool is_rational() const;
    bool is_zero() const;  // literal zero
    bool is_one() const;
    const Rat& rational_value() const;  // requires is_rational()

    /// Decides the sign. `Zero` is returned only for the literal zero;
    /// otherwise the enclosure is refined up to max_bits until it excludes
    /// zero, and SignUndecided is thrown if it never does.
    Sign sign(int max_bits = kDefaultSignBits) const;

    /// -1 / 0 / +1 in the numeric order; 0 only when canonical forms match.
    int compare(const ConstReal& other, int max_bits = kDefaultSignBits) const;

    /// Canonical forms identical.
    bool equals(const ConstReal& other) const;

    /// An interval guaranteed to contain the exact value. Repeated calls
    /// with growing bits shrink monotonically (results are intersected with
    /// the cache).
    Interval enclosure(int bits) const;

    std::string to_string() const;

    /// True when the canonical rendering starts with a minus sign.
    bool leading_negative() const;

    /// Deterministic total order on canonical forms. Not the numeric order;
    /// used for sorting and canonicalization.
    static int struct_cmp(const ConstReal& a, const ConstReal& b);

    /// Read-only view of the canonical form, for serialization.
    struct Parts;
    Parts parts() const;

    /// Injective serialization of the canonical form; lazily built and
    /// cached. Two values are equal iff their keys coincide.
    const std::string& cache_key() const;

    struct Impl;
    const Impl& impl() const { return *impl_; }
    explicit ConstReal(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

enum class ConstFactorKind { Exp, Log, Inv };

struct ConstReal::Parts {
    struct Factor {
        ConstFactorKind kind;
        ConstReal arg;
        long power;
    };
    struct Product {
        Rat coeff;
        std::vector<Factor> factors;
    };
    Rat rational;
    std::vector<Product> products;
};

ConstReal const_add(const ConstReal& a, const ConstReal& b);
ConstReal const_sub(const ConstReal& a, const ConstReal& b);
ConstReal const_neg(const ConstReal& a);
ConstReal const_mul(const ConstReal& a, const ConstReal& b);

/// Requires a provably nonzero (DivisionByZero for the literal zero,
/// SignUndecided when refinement cannot separate).
ConstReal const_inv(const ConstReal& a, int max_bits = kDefaultSignBits);
ConstReal const_div(const ConstReal& a, const ConstReal& b, int max_bits = kDefaultSignBits);

ConstReal const_exp(const ConstReal& a);

/// Requires a provably positive (LogNonPositive / SignUndecided).
ConstReal const_log(const ConstReal& a, int max_bits = kDefaultSignBits);

Sign const_sign(const ConstReal& a, int max_bits = kDefaultSignBits);

/// a^n for integer n; negative n requires a provably nonzero.
ConstReal const_pow_int(const ConstReal& a, long n, int max_bits = kDefaultSignBits);

/// a^q for rational q. Integer exponents are exact powers; otherwise the
/// value is exp(q*log a) (base must be provably positive), except that exact
/// rational roots are folded.
ConstReal const_pow_rational(const ConstReal& a, const Rat& q, int max_bits = kDefaultSignBits);

inline ConstReal operator+(const ConstReal& a, const ConstReal& b) { return const_add(a, b); }
inline ConstReal operator-(const ConstReal& a, const ConstReal& b) { return const_sub(a, b); }
inline ConstReal operator-(const ConstReal& a) { return const_neg(a); }
inline ConstReal operator*(const ConstReal& a, const ConstReal& b) { return const_mul(a, b); }

}  // namespace oseries
