#include "oseries/frontend.hpp"

#include "oseries/errors.hpp"

#include <cctype>
#include <sstream>

namespace oseries {

// --- Parsing ---

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;

    explicit Lexer(const std::string& t) : text(t) {}

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_space();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw SyntaxError(std::string("expected ") + what, pos);
    }

    bool eat_word(const char* w) {
        skip_space();
        std::size_t n = std::strlen(w);
        if (text.compare(pos, n, w) != 0) return false;
        // Reject identifier continuation so "www" does not lex as w w w.
        if (pos + n < text.size() && std::isalnum(static_cast<unsigned char>(text[pos + n])))
            return false;
        pos += n;
        return true;
    }

    Int integer() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw SyntaxError("expected a number", pos);
        return Int(text.substr(start, pos - start));
    }
};

ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr make_binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = kind;
    e.args = {std::move(a), std::move(b)};
    return make_expr(std::move(e));
}

ExprPtr parse_sum(Lexer& lex);

/// Rational literal for a pow exponent: INT, -INT, or (p/q) forms.
Rat parse_exponent(Lexer& lex) {
    if (lex.eat('(')) {
        bool neg = lex.eat('-');
        Int p = lex.integer();
        Int q = 1;
        if (lex.eat('/')) q = lex.integer();
        lex.expect(')', "')'");
        if (q == 0) throw SyntaxError("zero denominator in exponent", lex.pos);
        Rat r(p, q);
        return neg ? Rat(-r) : r;
    }
    bool neg = lex.eat('-');
    std::size_t at = lex.pos;
    if (!std::isdigit(static_cast<unsigned char>(lex.peek())))
        throw UnsupportedExponent("pow exponent must be a rational literal (at position " +
                                  std::to_string(at) + ")");
    Rat r(lex.integer());
    return neg ? Rat(-r) : r;
}

ExprPtr parse_primary(Lexer& lex) {
    char c = lex.peek();
    if (c == '(') {
        lex.eat('(');
        ExprPtr inner = parse_sum(lex);
        lex.expect(')', "')'");
        return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
        Expr e;
        e.kind = Expr::Kind::Number;
        e.number = Rat(lex.integer());
        return make_expr(std::move(e));
    }
    if (lex.eat_word("exp")) {
        lex.expect('(', "'(' after exp");
        ExprPtr inner = parse_sum(lex);
        lex.expect(')', "')'");
        Expr e;
        e.kind = Expr::Kind::Exp;
        e.args = {std::move(inner)};
        return make_expr(std::move(e));
    }
    if (lex.eat_word("log") || (lex.peek() == 'l' && lex.eat_word("log"))) {
        long k = 1;
        if (lex.eat('^')) {
            Int n = lex.integer();
            if (n < 1) throw SyntaxError("log iteration count must be positive", lex.pos);
            k = static_cast<long>(n);
        }
        lex.expect('(', "'(' after log");
        ExprPtr inner = parse_sum(lex);
        lex.expect(')', "')'");
        Expr e;
        e.kind = Expr::Kind::Log;
        e.log_iterations = k;
        e.args = {std::move(inner)};
        return make_expr(std::move(e));
    }
    if (lex.eat_word("w")) {
        Expr e;
        e.kind = Expr::Kind::Omega;
        return make_expr(std::move(e));
    }
    throw SyntaxError("unexpected input", lex.pos);
}

ExprPtr parse_postfix(Lexer& lex) {
    ExprPtr base = parse_primary(lex);
    if (lex.eat('^')) {
        Expr e;
        e.kind = Expr::Kind::Pow;
        e.exponent = parse_exponent(lex);
        e.args = {std::move(base)};
        if (lex.peek() == '^') throw SyntaxError("chained pow is not supported", lex.pos);
        return make_expr(std::move(e));
    }
    return base;
}

ExprPtr parse_unary(Lexer& lex) {
    if (lex.eat('-')) {
        Expr e;
        e.kind = Expr::Kind::Neg;
        e.args = {parse_unary(lex)};
        return make_expr(std::move(e));
    }
    return parse_postfix(lex);
}

ExprPtr parse_product(Lexer& lex) {
    ExprPtr acc = parse_unary(lex);
    while (true) {
        if (lex.eat('*'))
            acc = make_binary(Expr::Kind::Mul, acc, parse_unary(lex));
        else if (lex.eat('/'))
            acc = make_binary(Expr::Kind::Div, acc, parse_unary(lex));
        else
            return acc;
    }
}

ExprPtr parse_sum(Lexer& lex) {
    ExprPtr acc = parse_product(lex);
    while (true) {
        if (lex.eat('+'))
            acc = make_binary(Expr::Kind::Add, acc, parse_product(lex));
        else if (lex.eat('-'))
            acc = make_binary(Expr::Kind::Sub, acc, parse_product(lex));
        else
            return acc;
    }
}

}  // namespace

ExprPtr parse(const std::string& text) {
    Lexer lex(text);
    ExprPtr e = parse_sum(lex);
    lex.skip_space();
    if (lex.pos != text.size()) throw SyntaxError("trailing input", lex.pos);
    return e;
}

// --- Evaluation ---

namespace {

TruncatedResult eval_node(const Expr& e, const TruncationBudget& budget) {
    switch (e.kind) {
        case Expr::Kind::Number:
            return tr_exact(Transseries::constant(e.number));
        case Expr::Kind::Omega:
            return tr_exact(Transseries::omega());
        case Expr::Kind::Neg:
            return tr_neg(eval_node(*e.args[0], budget));
        case Expr::Kind::Add:
            return tr_add(eval_node(*e.args[0], budget), eval_node(*e.args[1], budget), budget);
        case Expr::Kind::Sub:
            return tr_add(eval_node(*e.args[0], budget), tr_neg(eval_node(*e.args[1], budget)),
                          budget);
        case Expr::Kind::Mul:
            return tr_mul(eval_node(*e.args[0], budget), eval_node(*e.args[1], budget), budget);
        case Expr::Kind::Div:
            return tr_div(eval_node(*e.args[0], budget), eval_node(*e.args[1], budget), budget);
        case Expr::Kind::Exp:
            return tr_exp(eval_node(*e.args[0], budget), budget);
        case Expr::Kind::Log: {
            TruncatedResult acc = eval_node(*e.args[0], budget);
            for (long i = 0; i < e.log_iterations; ++i) acc = tr_log(acc, budget);
            return acc;
        }
        case Expr::Kind::Pow: {
            TruncatedResult base = eval_node(*e.args[0], budget);
            const Rat& q = e.exponent;
            if (is_integer(q)) {
                long n = static_cast<long>(rat_num(q));
                if (n >= 0) return tr_npow(base, static_cast<unsigned long>(n), budget);
                return tr_inverse(tr_npow(base, static_cast<unsigned long>(-n), budget), budget);
            }
            if (base.exact && base.value.size() == 1) {
                const Term& t = base.value.terms()[0];
                if (t.coeff.sign(budget.const_bits) == Sign::Positive)
                    return tr_exact(
                        Transseries::from_term(const_pow_rational(t.coeff, q, budget.const_bits),
                                               mono_pow(t.monomial, q, budget.const_bits)));
            }
            return tr_exp(tr_scale(tr_log(base, budget), ConstReal(q), budget), budget);
        }
    }
    throw Error("unreachable expression kind");
}

}  // namespace

EvalReport evaluate(const Expr& e, const TruncationBudget& budget) {
    return EvalReport{eval_node(e, budget), budget};
}

// --- Rendering ---

namespace {

bool const_needs_parens(const ConstReal& c) {
    if (c.is_rational()) return false;
    // A lone product renders as a multiplication chain; sums need parens.
    const auto str = c.to_string();
    return str.find(" + ") != std::string::npos || str.find(" - ") != std::string::npos;
}

std::string log_base_string(long k) {
    if (k == 0) return "w";
    if (k == 1) return "log(w)";
    return "log^" + std::to_string(k) + "(w)";
}

std::string power_suffix(const Rat& q) {
    if (q == 1) return "";
    if (is_integer(q)) return "^" + rat_to_string(q);
    return "^(" + rat_to_string(q) + ")";
}

/// Renders |coeff| * monomial as numerator/denominator fragments.
std::string term_abs_string(const ConstReal& coeff_abs, const Monomial& m) {
    std::vector<std::string> num, den;
    if (!m.exp_arg().is_zero()) num.push_back("exp(" + render(m.exp_arg()) + ")");
    for (const auto& [k, a] : m.log_powers()) {
        if (a.is_rational()) {
            const Rat& q = a.rational_value();
            if (q > 0)
                num.push_back(log_base_string(k) + power_suffix(q));
            else
                den.push_back(log_base_string(k) + power_suffix(Rat(-q)));
        } else if (a.leading_negative()) {
            den.push_back(log_base_string(k) + "^(" + const_neg(a).to_string() + ")");
        } else {
            num.push_back(log_base_string(k) + "^(" + a.to_string() + ")");
        }
    }
    if (coeff_abs.is_rational()) {
        const Rat& q = coeff_abs.rational_value();
        Int p = rat_num(q);
        Int d = rat_den(q);
        if (p != 1 || num.empty()) num.insert(num.begin(), p.str());
        if (d != 1) den.insert(den.begin(), d.str());
    } else {
        std::string cs = coeff_abs.to_string();
        if (const_needs_parens(coeff_abs)) cs = "(" + cs + ")";
        num.insert(num.begin(), cs);
    }
    std::string out;
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (i) out += "*";
        out += num[i];
    }
    if (out.empty()) out = "1";
    if (!den.empty()) {
        std::string ds;
        for (std::size_t i = 0; i < den.size(); ++i) {
            if (i) ds += "*";
            ds += den[i];
        }
        out += "/";
        out += den.size() > 1 ? "(" + ds + ")" : ds;
    }
    return out;
}

}  // namespace

std::string render_monomial(const Monomial& m) {
    return term_abs_string(ConstReal::one(), m);
}

std::string render(const Transseries& x) {
    if (x.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : x.terms()) {
        bool neg = t.coeff.leading_negative();
        ConstReal abs_coeff = neg ? const_neg(t.coeff) : t.coeff;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        out += term_abs_string(abs_coeff, t.monomial);
    }
    return out;
}

std::string render(const TruncatedResult& r) {
    std::string out = render(r.value);
    if (!r.exact && r.error_bound)
        out += " (+ o(" + render_monomial(*r.error_bound) + "))";
    return out;
}

std::string Transseries::to_string() const { return render(*this); }

// --- Serialization ---

namespace {

nlohmann::json const_to_json(const ConstReal& c);

nlohmann::json series_to_json(const Transseries& x) {
    nlohmann::json terms = nlohmann::json::array();
    for (const Term& t : x.terms()) {
        nlohmann::json logs = nlohmann::json::array();
        for (const auto& [k, a] : t.monomial.log_powers())
            logs.push_back(nlohmann::json::array({k, const_to_json(a)}));
        nlohmann::json mono = {{"logs", std::move(logs)}};
        if (!t.monomial.exp_arg().is_zero()) mono["exp"] = series_to_json(t.monomial.exp_arg());
        terms.push_back({{"coeff", const_to_json(t.coeff)}, {"monomial", std::move(mono)}});
    }
    return {{"terms", std::move(terms)}};
}

Transseries series_from_json(const nlohmann::json& doc);

ConstReal const_from_json(const nlohmann::json& doc);

const char* factor_kind_name(ConstFactorKind k) {
    switch (k) {
        case ConstFactorKind::Exp:
            return "exp";
        case ConstFactorKind::Log:
            return "log";
        case ConstFactorKind::Inv:
            return "inv";
    }
    return "?";
}

nlohmann::json const_to_json(const ConstReal& c) {
    if (c.is_rational()) return {{"rat", rat_to_string(c.rational_value())}};
    ConstReal::Parts parts = c.parts();
    nlohmann::json products = nlohmann::json::array();
    for (const auto& p : parts.products) {
        nlohmann::json factors = nlohmann::json::array();
        for (const auto& f : p.factors) {
            nlohmann::json fd;
            fd["kind"] = factor_kind_name(f.kind);
            fd["arg"] = const_to_json(f.arg);
            fd["power"] = f.power;
            factors.push_back(std::move(fd));
        }
        nlohmann::json pd;
        pd["coeff"] = rat_to_string(p.coeff);
        pd["factors"] = std::move(factors);
        products.push_back(std::move(pd));
    }
    nlohmann::json out;
    out["rat"] = rat_to_string(parts.rational);
    out["products"] = std::move(products);
    return out;
}

Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw MalformedDocument("bad rational literal: " + s);
    }
}

ConstReal const_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("rat"))
        throw MalformedDocument("constant must be an object with 'rat'");
    ConstReal acc(rat_from_string(doc.at("rat").get<std::string>()));
    if (!doc.contains("products")) return acc;
    for (const auto& pd : doc.at("products")) {
        if (!pd.is_object() || !pd.contains("coeff") || !pd.contains("factors"))
            throw MalformedDocument("bad constant product entry");
        ConstReal prod(rat_from_string(pd.at("coeff").get<std::string>()));
        for (const auto& fd : pd.at("factors")) {
            if (!fd.is_object() || !fd.contains("kind") || !fd.contains("arg") ||
                !fd.contains("power"))
                throw MalformedDocument("bad constant factor entry");
            std::string kind = fd.at("kind").get<std::string>();
            ConstReal arg = const_from_json(fd.at("arg"));
            long power = fd.at("power").get<long>();
            ConstReal base;
            if (kind == "exp")
                base = const_exp(arg);
            else if (kind == "log")
                base = const_log(arg);
            else if (kind == "inv")
                base = const_inv(arg);
            else
                throw MalformedDocument("unknown constant factor kind: " + kind);
            prod = const_mul(prod, const_pow_int(base, power));
        }
        acc = const_add(acc, prod);
    }
    return acc;
}

Transseries series_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("terms") || !doc.at("terms").is_array())
        throw MalformedDocument("series must be an object with a 'terms' array");
    std::vector<Term> terms;
    for (const auto& td : doc.at("terms")) {
        if (!td.is_object() || !td.contains("coeff") || !td.contains("monomial"))
            throw MalformedDocument("term must carry 'coeff' and 'monomial'");
        ConstReal coeff = const_from_json(td.at("coeff"));
        const auto& md = td.at("monomial");
        if (!md.is_object() || !md.contains("logs"))
            throw MalformedDocument("monomial must carry 'logs'");
        std::vector<std::pair<long, ConstReal>> powers;
        for (const auto& ld : md.at("logs")) {
            if (!ld.is_array() || ld.size() != 2) throw MalformedDocument("bad log power entry");
            powers.emplace_back(ld[0].get<long>(), const_from_json(ld[1]));
        }
        Transseries exp_arg;
        if (md.contains("exp")) exp_arg = series_from_json(md.at("exp"));
        terms.push_back(Term{coeff, Monomial::make(std::move(powers), exp_arg)});
    }
    return Transseries::make(std::move(terms));
}

}  // namespace

nlohmann::json serialize(const Transseries& x) {
    nlohmann::json doc = series_to_json(x);
    doc["schema"] = 1;
    return doc;
}

Transseries deserialize(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("schema", 0) != 1)
        throw MalformedDocument("unsupported document schema");
    return series_from_json(doc);
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json doc;
    doc["schema"] = 1;
    doc["normal_form"] = render(report.result.value);
    doc["exact"] = report.result.exact;
    if (report.result.error_bound)
        doc["error_bound"] = render_monomial(*report.result.error_bound);
    else
        doc["error_bound"] = nullptr;
    doc["budget"] = {{"terms", report.budget.max_terms}, {"const_bits", report.budget.const_bits}};
    return doc;
}

}  // namespace oseries
