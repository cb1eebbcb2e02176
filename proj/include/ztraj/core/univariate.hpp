#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ztraj/core/polynomial.hpp"
#include "ztraj/core/text.hpp"

namespace ztraj {

/// Dense univariate polynomial over Q(i), coefficients stored low to high.
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<GaussianRational> c) : c_(std::move(c)) { trim(); }
    UPoly(std::initializer_list<GaussianRational> c) : c_(c) { trim(); }

    static UPoly constant(const GaussianRational& a) { return UPoly({a}); }
    static UPoly x() { return UPoly({GaussianRational(0), GaussianRational(1)}); }
    static UPoly monomial(std::size_t k, const GaussianRational& a = GaussianRational(1))
    {
        std::vector<GaussianRational> c(k + 1);
        c[k] = a;
        return UPoly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<GaussianRational>& coeffs() const { return c_; }
    GaussianRational operator[](std::size_t k) const { return k < c_.size() ? c_[k] : GaussianRational(); }
    const GaussianRational& leading() const
    {
        if (c_.empty())
            throw DomainError("leading coefficient of zero polynomial");
        return c_.back();
    }

    /// Index of the lowest nonzero coefficient; zero polynomial → -1.
    int valuation() const
    {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero())
                return static_cast<int>(k);
        return -1;
    }

    UPoly operator-() const
    {
        UPoly r(*this);
        for (auto& a : r.c_)
            a = -a;
        return r;
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b)
    {
        std::vector<GaussianRational> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] = a[k] + b[k];
        return UPoly(std::move(c));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
    friend UPoly operator*(const UPoly& a, const UPoly& b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        std::vector<GaussianRational> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero())
                continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                if (!b.c_[j].is_zero())
                    c[i + j] += a.c_[i] * b.c_[j];
        }
        return UPoly(std::move(c));
    }
    friend UPoly operator*(const GaussianRational& s, const UPoly& a)
    {
        UPoly r(a);
        for (auto& x : r.c_)
            x *= s;
        r.trim();
        return r;
    }
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    UPoly pow(unsigned e) const
    {
        UPoly r = constant(GaussianRational(1)), b = *this;
        while (e) {
            if (e & 1u)
                r = r * b;
            e >>= 1;
            if (e)
                b = b * b;
        }
        return r;
    }

    /// Quotient and remainder of Euclidean division.
    std::pair<UPoly, UPoly> divmod(const UPoly& d) const
    {
        if (d.is_zero())
            throw DomainError("polynomial division by zero");
        std::vector<GaussianRational> r = c_;
        if (degree() < d.degree())
            return {UPoly(), *this};
        std::vector<GaussianRational> q(c_.size() - d.c_.size() + 1);
        GaussianRational inv = d.leading().inverse();
        for (std::size_t k = q.size(); k-- > 0;) {
            GaussianRational f = r[k + d.c_.size() - 1] * inv;
            q[k] = f;
            if (f.is_zero())
                continue;
            for (std::size_t j = 0; j < d.c_.size(); ++j)
                r[k + j] -= f * d.c_[j];
        }
        r.resize(d.c_.size() - 1);
        return {UPoly(std::move(q)), UPoly(std::move(r))};
    }

    UPoly monic() const
    {
        if (is_zero())
            return *this;
        return leading().inverse() * *this;
    }

    UPoly derivative() const
    {
        if (c_.size() <= 1)
            return {};
        std::vector<GaussianRational> c(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            c[k - 1] = c_[k] * GaussianRational(static_cast<long>(k));
        return UPoly(std::move(c));
    }

    GaussianRational evaluate(const GaussianRational& z) const
    {
        GaussianRational acc;
        for (std::size_t k = c_.size(); k-- > 0;)
            acc = acc * z + c_[k];
        return acc;
    }

    /// p(x + a).
    UPoly shifted(const GaussianRational& a) const
    {
        UPoly r;
        UPoly lin({a, GaussianRational(1)});
        for (std::size_t k = c_.size(); k-- > 0;)
            r = r * lin + constant(c_[k]);
        return r;
    }

    /// Embeds as a polynomial in variable j of an n-variable ring.
    Polynomial to_polynomial(std::size_t n, std::size_t j) const
    {
        Polynomial p(n);
        for (std::size_t k = 0; k < c_.size(); ++k)
            p.add_term(Monomial::variable(n, j, static_cast<unsigned>(k)), c_[k]);
        return p;
    }

    static UPoly from_polynomial(const Polynomial& p, std::size_t j)
    {
        std::vector<GaussianRational> c(p.is_zero() ? 0 : static_cast<std::size_t>(p.degree()) + 1);
        for (const auto& [m, a] : p.terms()) {
            for (std::size_t i = 0; i < m.nvars(); ++i)
                if (i != j && m[i])
                    throw DomainError("polynomial is not univariate in the requested variable");
            c[m[j]] = a;
        }
        return UPoly(std::move(c));
    }

    std::string to_string(const std::string& var = "t") const
    {
        return ztraj::to_string(to_polynomial(1, 0), VariableNames{var});
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero())
            c_.pop_back();
    }
    std::vector<GaussianRational> c_;
};

/// Monic gcd (zero if both inputs are zero).
inline UPoly gcd(UPoly a, UPoly b)
{
    while (!b.is_zero()) {
        UPoly r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Univariate rational function num/den in lowest terms with monic denominator.
class RationalFunction {
public:
    RationalFunction() : num_(), den_(UPoly::constant(GaussianRational(1))) {}
    RationalFunction(UPoly num) : num_(std::move(num)), den_(UPoly::constant(GaussianRational(1))) {}
    RationalFunction(UPoly num, UPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    const UPoly& num() const { return num_; }
    const UPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b)
    {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b)
    {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b)
    {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b)
    {
        if (b.is_zero())
            throw DomainError("rational function division by zero");
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    RationalFunction operator-() const { return {-num_, den_}; }
    friend bool operator==(const RationalFunction& a, const RationalFunction& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    RationalFunction derivative() const
    {
        return {num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_};
    }

    std::string to_string(const std::string& var = "t") const
    {
        if (is_polynomial())
            return num_.to_string(var);
        return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
    }

private:
    void normalize()
    {
        if (den_.is_zero())
            throw DomainError("rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = UPoly::constant(GaussianRational(1));
            return;
        }
        UPoly g = gcd(num_, den_);
        num_ = num_.divmod(g).first;
        den_ = den_.divmod(g).first;
        GaussianRational lc = den_.leading().inverse();
        num_ = lc * num_;
        den_ = lc * den_;
    }

    UPoly num_;
    UPoly den_;
};

struct RationalFunctionOps {
    RationalFunction constant(const GaussianRational& c) const { return RationalFunction(UPoly::constant(c)); }
    RationalFunction variable(std::size_t) const { return RationalFunction(UPoly::x()); }
    RationalFunction add(const RationalFunction& a, const RationalFunction& b) const { return a + b; }
    RationalFunction sub(const RationalFunction& a, const RationalFunction& b) const { return a - b; }
    RationalFunction mul(const RationalFunction& a, const RationalFunction& b) const { return a * b; }
    RationalFunction div(const RationalFunction& a, const RationalFunction& b) const { return a / b; }
    RationalFunction neg(const RationalFunction& a) const { return -a; }
    RationalFunction pow(const RationalFunction& a, unsigned e) const
    {
        return {a.num().pow(e), a.den().pow(e)};
    }
};

inline RationalFunction parse_rational_function(std::string_view text, const std::string& var = "t")
{
    VariableNames names{var};
    return ExprParser<RationalFunction, RationalFunctionOps>(text, names, RationalFunctionOps{}).parse();
}

inline UPoly parse_upoly(std::string_view text, const std::string& var = "t")
{
    return UPoly::from_polynomial(parse_polynomial(text, VariableNames{var}), 0);
}

} // namespace ztraj
