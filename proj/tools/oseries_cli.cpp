#include "oseries/frontend.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace oseries;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitUndecided = 4;

struct Options {
    int terms = 16;
    int const_bits = 256;
    std::string format = "text";

    TruncationBudget budget() const { return TruncationBudget{terms, const_bits}; }
};

EvalReport eval_text(const std::string& text, const Options& opt) {
    return evaluate(*parse(text), opt.budget());
}

void print_report(const EvalReport& report, const Options& opt) {
    if (opt.format == "json")
        std::cout << report_to_json(report).dump() << "\n";
    else
        std::cout << render(report.result) << "\n";
}

int cmd_normalize(const std::string& expr, const Options& opt) {
    print_report(eval_text(expr, opt), opt);
    return kExitOk;
}

int cmd_diff(const std::string& expr, long n, const Options& opt) {
    EvalReport rep = eval_text(expr, opt);
    TruncatedResult out;
    out.value = derive_n(rep.result.value, static_cast<unsigned long>(n), opt.const_bits);
    out.exact = rep.result.exact;
    if (!rep.result.exact && rep.result.error_bound) {
        // Ceiling for the derivative of the discarded tail.
        Transseries db =
            derive_n(Transseries::from_monomial(*rep.result.error_bound),
                     static_cast<unsigned long>(n), opt.const_bits);
        out.error_bound = db.is_zero() ? *rep.result.error_bound : leading_monomial(db);
    }
    print_report(EvalReport{out, opt.budget()}, opt);
    return kExitOk;
}

int cmd_compose(const std::string& f_text, const std::string& g_text, const Options& opt) {
    EvalReport f = eval_text(f_text, opt);
    EvalReport g = eval_text(g_text, opt);
    TruncatedResult out = compose(f.result.value, g.result.value, opt.budget());
    if (!f.result.exact && f.result.error_bound) {
        // The tail of f maps below the image of its bound.
        TruncatedResult bimg = compose(Transseries::from_monomial(*f.result.error_bound),
                                       g.result.value, opt.budget());
        std::optional<Noise> prop;
        if (!bimg.value.is_zero())
            prop = Noise{leading_monomial(bimg.value), /*inclusive=*/true};
        out = certify(out.value, noise_max(tr_noise(out), prop, opt.const_bits), opt.budget());
    }
    print_report(EvalReport{out, opt.budget()}, opt);
    return kExitOk;
}

int cmd_compare(const std::string& f_text, const std::string& g_text, const Options& opt) {
    EvalReport fr = eval_text(f_text, opt);
    EvalReport gr = eval_text(g_text, opt);
    const Transseries& f = fr.result.value;
    const Transseries& g = gr.result.value;
    Cmp order = ts_compare(f, g, opt.const_bits);
    std::string order_text = order == Cmp::Less ? "f < g" : (order == Cmp::Equal ? "f = g" : "f > g");
    std::string dom_text;
    if (f.is_zero() && g.is_zero()) {
        dom_text = "";
    } else if (f.is_zero()) {
        dom_text = "f ≺ g";
    } else if (g.is_zero()) {
        dom_text = "f ≻ g";
    } else {
        switch (dominance(f, g, opt.const_bits)) {
            case Dominance::StrictLess:
                dom_text = "f ≺ g";
                break;
            case Dominance::StrictGreater:
                dom_text = "f ≻ g";
                break;
            case Dominance::Comparable: {
                if (asymptotic(f, g, opt.const_bits)) {
                    dom_text = "f ∼ g";
                } else {
                    ConstReal ratio = const_div(leading_term(f).coeff, leading_term(g).coeff,
                                                opt.const_bits);
                    dom_text = "f ≍ g (ratio → " + ratio.to_string() + ")";
                }
                break;
            }
        }
    }
    if (opt.format == "json") {
        nlohmann::json doc{{"schema", 1}, {"order", order_text}, {"dominance", dom_text}};
        std::cout << doc.dump() << "\n";
    } else {
        std::cout << order_text;
        if (!dom_text.empty()) std::cout << "; " << dom_text;
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_taylor(const std::string& f_text, const std::string& at_text, long order,
               const Options& opt) {
    EvalReport f = eval_text(f_text, opt);
    EvalReport x = eval_text(at_text, opt);
    TaylorExpansion tay = taylor_expand(f.result.value, x.result.value, order, opt.budget());
    if (opt.format == "json") {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& c : tay.coefficients) coeffs.push_back(render(c));
        std::cout << nlohmann::json{{"schema", 1}, {"coefficients", coeffs}}.dump() << "\n";
        return kExitOk;
    }
    for (long n = 0; n <= order; ++n)
        std::cout << "c" << n << ": " << render(tay.coefficients[n]) << "\n";
    return kExitOk;
}

int cmd_limit(const std::string& expr, const Options& opt) {
    EvalReport rep = eval_text(expr, opt);
    const Transseries& x = rep.result.value;
    std::string lead_text = x.is_zero() ? "0" : render(truncate_at(x, 1));
    std::string limit_text;
    if (x.is_zero()) {
        limit_text = "0";
    } else {
        const Term& lead = leading_term(x);
        if (mono_is_infinite(lead.monomial, opt.const_bits)) {
            limit_text = lead.coeff.sign(opt.const_bits) == Sign::Positive ? "+inf" : "-inf";
        } else if (lead.monomial.is_identity()) {
            limit_text = lead.coeff.to_string();
        } else {
            limit_text = "0";
        }
    }
    if (opt.format == "json") {
        nlohmann::json doc{{"schema", 1}, {"leading_term", lead_text}, {"limit", limit_text}};
        std::cout << doc.dump() << "\n";
    } else {
        std::cout << "leading term: " << lead_text << "\n";
        std::cout << "limit: " << limit_text << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oseries: exact arithmetic, differentiation and composition for exp-log series in w"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--terms", opt.terms, "leading terms kept by truncating operations")
        ->capture_default_str();
    app.add_option("--const-bits", opt.const_bits, "precision budget for constant sign queries")
        ->capture_default_str();
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    std::string expr_a, expr_b, expr_at;
    long diff_order = 1;
    long taylor_order = 2;

    auto* normalize = app.add_subcommand("normalize", "evaluate to canonical form");
    normalize->add_option("expr", expr_a, "expression")->required();

    auto* diff = app.add_subcommand("diff", "differentiate");
    diff->add_option("expr", expr_a, "expression")->required();
    diff->add_option("-n", diff_order, "derivative order")->capture_default_str();

    auto* comp = app.add_subcommand("compose", "substitute G for w in F");
    comp->add_option("f", expr_a, "outer expression")->required();
    comp->add_option("g", expr_b, "inner expression (must exceed every real)")->required();

    auto* cmp = app.add_subcommand("compare", "order and dominance verdicts");
    cmp->add_option("f", expr_a, "left expression")->required();
    cmp->add_option("g", expr_b, "right expression")->required();

    auto* taylor = app.add_subcommand("taylor", "Taylor coefficients of F around X");
    taylor->add_option("f", expr_a, "expression")->required();
    taylor->add_option("--at", expr_at, "expansion center (must exceed every real)")->required();
    taylor->add_option("--order", taylor_order, "expansion order")->capture_default_str();

    auto* limit = app.add_subcommand("limit", "asymptotic class as w grows without bound");
    limit->add_option("expr", expr_a, "expression")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (normalize->parsed()) return cmd_normalize(expr_a, opt);
        if (diff->parsed()) return cmd_diff(expr_a, diff_order, opt);
        if (comp->parsed()) return cmd_compose(expr_a, expr_b, opt);
        if (cmp->parsed()) return cmd_compare(expr_a, expr_b, opt);
        if (taylor->parsed()) return cmd_taylor(expr_a, expr_at, taylor_order, opt);
        if (limit->parsed()) return cmd_limit(expr_a, opt);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const UnsupportedExponent& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const SignUndecided& e) {
        std::cerr << "undecided: " << e.what() << "\n";
        return kExitUndecided;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
