#pragma once

#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ztraj/core/gaussian.hpp"
#include "ztraj/core/monomial.hpp"

namespace ztraj {

/// Sparse multivariate polynomial over Q(i). Terms are kept in descending
/// deglex order with no stored zero coefficients.
class Polynomial {
public:
    using TermMap = std::map<Monomial, GaussianRational, DeglexGreater>;

    Polynomial() = default;
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, const GaussianRational& c)
    {
        Polynomial p(nvars);
        p.add_term(Monomial(nvars), c);
        return p;
    }

    static Polynomial variable(std::size_t nvars, std::size_t j)
    {
        Polynomial p(nvars);
        p.add_term(Monomial::variable(nvars, j), GaussianRational(1));
        return p;
    }

    static Polynomial monomial(const Monomial& m, const GaussianRational& c = GaussianRational(1))
    {
        Polynomial p(m.nvars());
        p.add_term(m, c);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    /// Total degree; -1 for the zero polynomial.
    int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.begin()->first.degree()); }

    bool is_constant() const { return degree() <= 0; }

    const Monomial& leading_monomial() const
    {
        if (terms_.empty())
            throw DomainError("leading term of zero polynomial");
        return terms_.begin()->first;
    }
    const GaussianRational& leading_coefficient() const
    {
        if (terms_.empty())
            throw DomainError("leading term of zero polynomial");
        return terms_.begin()->second;
    }

    GaussianRational coefficient(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? GaussianRational() : it->second;
    }

    GaussianRational constant_term() const { return coefficient(Monomial(nvars_)); }

    std::vector<Monomial> support() const
    {
        std::vector<Monomial> s;
        s.reserve(terms_.size());
        for (const auto& [m, c] : terms_)
            s.push_back(m);
        return s;
    }

    void add_term(const Monomial& m, const GaussianRational& c)
    {
        if (m.nvars() != nvars_)
            throw DimensionError("term has wrong number of variables");
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    Polynomial operator-() const
    {
        Polynomial r(*this);
        for (auto& [m, c] : r.terms_)
            c = -c;
        return r;
    }

    Polynomial& operator+=(const Polynomial& o)
    {
        check_same(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o)
    {
        check_same(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const GaussianRational& s)
    {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_)
            c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const GaussianRational& s) { return a *= s; }
    friend Polynomial operator*(const GaussianRational& s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        a.check_same(b);
        std::unordered_map<Monomial, GaussianRational, MonomialHash> acc;
        acc.reserve(a.size() * b.size());
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                auto [it, inserted] = acc.try_emplace(ma * mb);
                it->second += ca * cb;
            }
        Polynomial r(a.nvars_);
        for (auto& [m, c] : acc)
            if (!c.is_zero())
                r.terms_.emplace(m, std::move(c));
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b)
    {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    Polynomial pow(unsigned e) const
    {
        Polynomial r = constant(nvars_, GaussianRational(1));
        Polynomial base = *this;
        while (e) {
            if (e & 1u)
                r *= base;
            e >>= 1;
            if (e)
                base *= base;
        }
        return r;
    }

    /// Partial derivative with respect to x_j.
    Polynomial derivative(std::size_t j) const
    {
        if (j >= nvars_)
            throw DimensionError("derivative variable out of range");
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_)
            if (m[j] > 0)
                r.add_term(m.lowered(j), c * GaussianRational(static_cast<long>(m[j])));
        return r;
    }

    /// Exact evaluation at a point of Q(i)^n.
    GaussianRational evaluate(std::span<const GaussianRational> point) const
    {
        if (point.size() != nvars_)
            throw DimensionError("evaluation point has wrong dimension");
        // cache of powers per variable
        std::vector<std::vector<GaussianRational>> powers(nvars_);
        auto power = [&](std::size_t j, unsigned e) -> const GaussianRational& {
            auto& pw = powers[j];
            if (pw.empty())
                pw.emplace_back(1);
            while (pw.size() <= e)
                pw.push_back(pw.back() * point[j]);
            return pw[e];
        };
        GaussianRational acc;
        for (const auto& [m, c] : terms_) {
            GaussianRational t = c;
            for (std::size_t j = 0; j < nvars_; ++j)
                if (m[j])
                    t *= power(j, m[j]);
            acc += t;
        }
        return acc;
    }

    /// Homogeneous component of degree k.
    Polynomial homogeneous_part(unsigned k) const
    {
        Polynomial r(nvars_);
        for (const auto& [m, c] : terms_)
            if (m.degree() == k)
                r.terms_.emplace(m, c);
        return r;
    }

    /// Set of variable indices that actually occur.
    std::vector<bool> variables_used() const
    {
        std::vector<bool> used(nvars_, false);
        for (const auto& [m, c] : terms_)
            for (std::size_t j = 0; j < nvars_; ++j)
                if (m[j])
                    used[j] = true;
        return used;
    }

    /// Exact quotient by a divisor that is known to divide this polynomial.
    /// Throws DomainError if the division leaves a remainder.
    Polynomial divide_exact(const Polynomial& divisor) const
    {
        check_same(divisor);
        if (divisor.is_zero())
            throw DomainError("division by zero polynomial");
        Polynomial rem(*this);
        Polynomial quo(nvars_);
        const Monomial& lm = divisor.leading_monomial();
        GaussianRational lc_inv = divisor.leading_coefficient().inverse();
        while (!rem.is_zero()) {
            const Monomial& rm = rem.leading_monomial();
            if (!lm.divides(rm))
                throw DomainError("polynomial division is not exact");
            Monomial q = lm.quotient_of(rm);
            GaussianRational c = rem.leading_coefficient() * lc_inv;
            quo.add_term(q, c);
            for (const auto& [m, dc] : divisor.terms_)
                rem.add_term(m * q, -(dc * c));
        }
        return quo;
    }

    /// Embeds into a ring with more variables (new variables appended).
    Polynomial extended(std::size_t new_nvars) const
    {
        if (new_nvars < nvars_)
            throw DimensionError("cannot shrink variable count");
        Polynomial r(new_nvars);
        for (const auto& [m, c] : terms_) {
            std::vector<unsigned> e(m.exponents().begin(), m.exponents().end());
            e.resize(new_nvars, 0);
            r.terms_.emplace(Monomial(std::move(e)), c);
        }
        return r;
    }

private:
    void check_same(const Polynomial& o) const
    {
        if (o.nvars_ != nvars_)
            throw DimensionError("polynomials in different numbers of variables");
    }

    std::size_t nvars_ = 0;
    TermMap terms_;
};

} // namespace ztraj
