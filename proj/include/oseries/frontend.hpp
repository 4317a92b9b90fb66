#pragma once

#include "oseries/compose.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace oseries {

/// Surface syntax tree. `w` is the series variable; pow exponents are
/// restricted to rational literals; log carries an iteration count so that
/// log^k(w) parses as the k-fold log.
struct Expr {
    enum class Kind { Number, Omega, Neg, Add, Sub, Mul, Div, Pow, Exp, Log };

    Kind kind = Kind::Number;
    Rat number;         // Number
    Rat exponent;       // Pow
    long log_iterations = 1;  // Log
    std::vector<std::shared_ptr<const Expr>> args;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Standard precedence: pow binds tightest, then unary minus, then mul/div,
/// then add/sub; binary operators of equal precedence associate left.
ExprPtr parse(const std::string& text);

struct EvalReport {
    TruncatedResult result;
    TruncationBudget budget;
};

EvalReport evaluate(const Expr& e, const TruncationBudget& budget = {});

/// Canonical text form: terms in decreasing order joined by +/-, monomial
/// factors as an exp(...) factor followed by w / log(w) / log^k(w) powers,
/// negative powers collected into a denominator.
std::string render(const Transseries& x);
/// render(value), plus " (+ o(bound))" when inexact.
std::string render(const TruncatedResult& r);
std::string render_monomial(const Monomial& m);

nlohmann::json serialize(const Transseries& x);
Transseries deserialize(const nlohmann::json& doc);

nlohmann::json report_to_json(const EvalReport& report);

}  // namespace oseries
