#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ztraj/core/polynomial.hpp"

namespace ztraj {

using VariableNames = std::vector<std::string>;

inline VariableNames default_names(std::size_t n)
{
    VariableNames v;
    for (std::size_t j = 1; j <= n; ++j)
        v.push_back("x" + std::to_string(j));
    return v;
}

namespace detail {

inline std::string monomial_text(const Monomial& m, const VariableNames& names)
{
    std::string s;
    for (std::size_t j = 0; j < m.nvars(); ++j) {
        if (!m[j])
            continue;
        if (!s.empty())
            s += '*';
        s += names.at(j);
        if (m[j] > 1)
            s += '^' + std::to_string(m[j]);
    }
    return s;
}

} // namespace detail

/// Canonical text form: terms in descending deglex order, coefficients in
/// lowest terms, Gaussian coefficients parenthesised. parse(print(P)) == P and
/// print(parse(print(P))) == print(P).
inline std::string to_string(const Polynomial& p, const VariableNames& names)
{
    if (names.size() != p.nvars())
        throw DimensionError("variable name count does not match polynomial");
    if (p.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        std::string mono = detail::monomial_text(m, names);
        bool negative = false;
        std::string coef;
        if (c.is_real() || sgn(c.re()) == 0) {
            const Rational& v = c.is_real() ? c.re() : c.im();
            negative = sgn(v) < 0;
            Rational a = abs(v);
            if (c.is_real())
                coef = (a == 1 && !mono.empty()) ? "" : a.get_str();
            else
                coef = a == 1 ? "I" : a.get_str() + "*I";
        } else {
            coef = "(" + to_string(c) + ")";
        }
        std::string term;
        if (mono.empty())
            term = coef;
        else if (coef.empty())
            term = mono;
        else
            term = coef + "*" + mono;
        if (first)
            out += negative ? "-" + term : term;
        else
            out += negative ? " - " + term : " + " + term;
        first = false;
    }
    return out;
}

inline std::string to_string(const Polynomial& p) { return to_string(p, default_names(p.nvars())); }

/// Recursive-descent parser for the polynomial text syntax. Value is the
/// algebra the expression is evaluated in; Ops supplies constants, variables,
/// division and powers.
template <class Value, class Ops>
class ExprParser {
public:
    ExprParser(std::string_view text, const VariableNames& names, Ops ops)
        : text_(text), names_(names), ops_(std::move(ops))
    {}

    Value parse()
    {
        Value v = expr();
        skip();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Value expr()
    {
        Value v = term();
        for (;;) {
            if (accept('+'))
                v = ops_.add(v, term());
            else if (accept('-'))
                v = ops_.sub(v, term());
            else
                return v;
        }
    }

    Value term()
    {
        Value v = factor();
        for (;;) {
            if (accept('*'))
                v = ops_.mul(v, factor());
            else if (accept('/'))
                v = ops_.div(v, factor());
            else
                return v;
        }
    }

    Value factor()
    {
        if (accept('-'))
            return ops_.neg(factor());
        if (accept('+'))
            return factor();
        Value b = base();
        if (accept('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (start == pos_)
                fail("expected nonnegative integer exponent");
            unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
            return ops_.pow(b, static_cast<unsigned>(e));
        }
        return b;
    }

    Value base()
    {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Value v = expr();
            if (!accept(')'))
                fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            return ops_.constant(GaussianRational(Rational(Integer(std::string(text_.substr(start, pos_ - start))))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string id(text_.substr(start, pos_ - start));
            for (std::size_t j = 0; j < names_.size(); ++j)
                if (names_[j] == id)
                    return ops_.variable(j);
            if (id == "I")
                return ops_.constant(GaussianRational::i());
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    const VariableNames& names_;
    Ops ops_;
    std::size_t pos_ = 0;
};

struct PolynomialOps {
    std::size_t n;
    Polynomial constant(const GaussianRational& c) const { return Polynomial::constant(n, c); }
    Polynomial variable(std::size_t j) const { return Polynomial::variable(n, j); }
    Polynomial add(const Polynomial& a, const Polynomial& b) const { return a + b; }
    Polynomial sub(const Polynomial& a, const Polynomial& b) const { return a - b; }
    Polynomial mul(const Polynomial& a, const Polynomial& b) const { return a * b; }
    Polynomial neg(const Polynomial& a) const { return -a; }
    Polynomial pow(const Polynomial& a, unsigned e) const { return a.pow(e); }
    Polynomial div(const Polynomial& a, const Polynomial& b) const
    {
        if (!b.is_constant() || b.is_zero())
            throw ParseError("division is only allowed by nonzero constants");
        return a * b.constant_term().inverse();
    }
};

inline Polynomial parse_polynomial(std::string_view text, const VariableNames& names)
{
    return ExprParser<Polynomial, PolynomialOps>(text, names, PolynomialOps{names.size()}).parse();
}

inline GaussianRational parse_gaussian(std::string_view text)
{
    static const VariableNames none;
    Polynomial p = parse_polynomial(text, none);
    return p.constant_term();
}

} // namespace ztraj
