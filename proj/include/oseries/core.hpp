#pragma once

#include "oseries/constreal.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace oseries {

class Transseries;

enum class Cmp { Less, Equal, Greater };
enum class Dominance { StrictLess, Comparable, StrictGreater };

/// A canonical monomial  prod_k log_k(w)^{a_k} * exp(gamma)  where the a_k
/// are nonzero constants, log_0(w) = w, and gamma is a purely infinite
/// series. Canonical form: gamma never contains a term r*log_j(w) with
/// j >= 1 (such a term is absorbed into the exponent of log_{j-1}(w));
/// terms r*w stay in gamma. The identity monomial has no log factors and
/// gamma = 0.
class Monomial {
public:
    Monomial();  // the identity monomial 1

    /// Canonicalizing constructor; absorbs plain-log terms of exp_arg into
    /// log powers and checks that the remainder is purely infinite.
    static Monomial make(std::vector<std::pair<long, ConstReal>> log_powers,
                         const Transseries& exp_arg, int max_bits = kDefaultSignBits);

    /// As make(), but trusts the caller that every non-absorbed exp_arg term
    /// is already a verified infinite monomial (products and powers of
    /// canonical monomials qualify).
    static Monomial make_trusted(std::vector<std::pair<long, ConstReal>> log_powers,
                                 const Transseries& exp_arg);

    static Monomial omega();           // w
    static Monomial log_atom(long k);  // log_k(w)
    /// e^gamma for purely infinite gamma (canonicalized, so e.g. gamma =
    /// 2*log(w) yields w^2).
    static Monomial exponential(const Transseries& gamma, int max_bits = kDefaultSignBits);

    bool is_identity() const;
    bool is_pure_logs() const;  // no exponential factor

    /// True when the monomial is exactly log_k(w); returns k.
    std::optional<long> as_log_atom() const;

    const std::vector<std::pair<long, ConstReal>>& log_powers() const { return log_powers_; }
    const Transseries& exp_arg() const;

    long log_depth() const;
    long exp_height() const;

    /// Injective serialization; equal keys iff equal monomials. Built at
    /// construction and shared by copies.
    const std::string& key() const;

    /// Stable identity of the canonical form (process-wide interning).
    std::uint32_t id() const { return id_; }

private:
    static Monomial make_impl(std::vector<std::pair<long, ConstReal>> log_powers,
                              const Transseries& exp_arg, int max_bits, bool verify);
    void build_key();

    std::vector<std::pair<long, ConstReal>> log_powers_;  // sorted by depth index
    std::shared_ptr<const Transseries> exp_arg_;          // null means 0
    std::shared_ptr<const std::string> key_;
    std::uint32_t id_ = 0;
};

/// A term r*m with provably nonzero coefficient.
struct Term {
    ConstReal coeff;
    Monomial monomial;
};

/// A finite formal sum of terms in strictly decreasing monomial order.
/// Zero is the empty sum.
class Transseries {
public:
    Transseries();  // zero

    /// Sorts, merges equal monomials, and drops zero coefficients.
    static Transseries make(std::vector<Term> terms, int max_bits = kDefaultSignBits);

    /// Adopts terms that are already strictly decreasing with nonzero
    /// coefficients; no checking.
    static Transseries from_sorted(std::vector<Term> terms);

    static Transseries constant(const ConstReal& c);
    static Transseries constant(const Rat& q);
    static Transseries from_term(const ConstReal& coeff, const Monomial& m);
    static Transseries from_monomial(const Monomial& m);
    static Transseries omega();
    static Transseries log_atom(long k);

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    bool is_constant() const;  // zero or a single term with monomial 1

    std::string to_string() const;  // canonical text form

private:
    std::vector<Term> terms_;
};

/// A series verified to have every support monomial > 1.
class PurelyInfinite {
public:
    PurelyInfinite();  // zero
    explicit PurelyInfinite(const Transseries& s, int max_bits = kDefaultSignBits);
    /// Adopts a series whose monomials were already verified infinite.
    static PurelyInfinite trusted(Transseries s);
    const Transseries& series() const { return series_; }

private:
    Transseries series_;
};

/// x = big + real + small with big purely infinite and small infinitesimal.
struct Decomposition {
    PurelyInfinite big;
    ConstReal real;
    Transseries small;
};

// --- Monomial-level operations ---

/// Total group order; m < n iff log(m) < log(n), recursing on exponential
/// height with a lexicographic base case on plain log monomials.
Cmp mono_compare(const Monomial& m, const Monomial& n, int max_bits = kDefaultSignBits);

bool mono_equal(const Monomial& m, const Monomial& n);

/// log m as an exact purely infinite (or zero) series:
/// sum_k a_k*log_{k+1}(w) + gamma.
Transseries formal_log(const Monomial& m, int max_bits = kDefaultSignBits);

Monomial mono_mul(const Monomial& m, const Monomial& n, int max_bits = kDefaultSignBits);
Monomial mono_inv(const Monomial& m, int max_bits = kDefaultSignBits);
/// m^q, exact for any rational q (zero gives the identity).
Monomial mono_pow(const Monomial& m, const Rat& q, int max_bits = kDefaultSignBits);

/// m > 1 (equivalently, m is infinite).
bool mono_is_infinite(const Monomial& m, int max_bits = kDefaultSignBits);

// --- Series-level operations ---

Cmp ts_compare(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);

/// Dominance by leading monomials; y must be nonzero.
Dominance dominance(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);

/// x ~ y: identical leading terms; y must be nonzero.
bool asymptotic(const Transseries& x, const Transseries& y, int max_bits = kDefaultSignBits);

Decomposition decompose(const Transseries& x, int max_bits = kDefaultSignBits);

/// First beta terms; 0 <= beta <= size.
Transseries truncate_at(const Transseries& x, std::size_t beta);
bool is_truncation(const Transseries& y, const Transseries& x);

/// Exponential rank: 0 for 0 and for the log atoms themselves; otherwise
/// 1 + the largest rank of a support exponent.
long erank(const Transseries& x, int max_bits = kDefaultSignBits);

const Monomial& leading_monomial(const Transseries& x);
const Term& leading_term(const Transseries& x);

/// Purely infinite part of log x, read off the leading monomial. Requires
/// x > 0.
PurelyInfinite log_up(const Transseries& x, int max_bits = kDefaultSignBits);

long log_depth(const Transseries& x);
long exp_height(const Transseries& x);

bool ts_equal(const Transseries& x, const Transseries& y);

/// Merge of two series sorted in the canonical order (the workhorse behind
/// addition; linear in the combined length).
Transseries merge_add(const Transseries& x, const Transseries& y,
                      int max_bits = kDefaultSignBits);

}  // namespace oseries
