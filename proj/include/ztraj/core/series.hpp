#pragma once

#include <algorithm>
#include <vector>

#include "ztraj/core/univariate.hpp"

namespace ztraj {

/// Truncated power series a_0 + a_1 z + ... + O(z^N) over Q(i). The
/// truncation order N is the number of known coefficients; arithmetic keeps
/// the smallest order that is still exact.
class Series {
public:
    Series() = default;
    explicit Series(std::vector<GaussianRational> c) : c_(std::move(c)) {}
    Series(std::vector<GaussianRational> c, std::size_t order) : c_(std::move(c)) { c_.resize(order); }

    static Series constant(const GaussianRational& a, std::size_t order)
    {
        std::vector<GaussianRational> c(order);
        if (order)
            c[0] = a;
        return Series(std::move(c));
    }
    static Series variable(std::size_t order)
    {
        std::vector<GaussianRational> c(order);
        if (order > 1)
            c[1] = GaussianRational(1);
        return Series(std::move(c));
    }
    static Series from_upoly(const UPoly& p, std::size_t order)
    {
        std::vector<GaussianRational> c(order);
        for (std::size_t k = 0; k < order; ++k)
            c[k] = p[k];
        return Series(std::move(c));
    }

    std::size_t order() const { return c_.size(); }
    const std::vector<GaussianRational>& coeffs() const { return c_; }
    const GaussianRational& operator[](std::size_t k) const { return c_.at(k); }
    GaussianRational& operator[](std::size_t k) { return c_.at(k); }

    Series truncated(std::size_t n) const
    {
        if (n > c_.size())
            throw DomainError("cannot extend a truncated series");
        return Series({c_.begin(), c_.begin() + static_cast<long>(n)});
    }

    /// Index of the first nonzero coefficient, or order() if all known ones vanish.
    std::size_t valuation() const
    {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero())
                return k;
        return c_.size();
    }

    Series operator-() const
    {
        Series r(*this);
        for (auto& a : r.c_)
            a = -a;
        return r;
    }
    friend Series operator+(const Series& a, const Series& b)
    {
        std::size_t n = std::min(a.order(), b.order());
        std::vector<GaussianRational> c(n);
        for (std::size_t k = 0; k < n; ++k)
            c[k] = a.c_[k] + b.c_[k];
        return Series(std::move(c));
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }
    friend Series operator*(const GaussianRational& s, const Series& a)
    {
        Series r(a);
        for (auto& x : r.c_)
            x *= s;
        return r;
    }
    friend Series operator*(const Series& a, const Series& b)
    {
        // valuations extend the exact range: (z^va A)(z^vb B) is known to
        // order min(va + Nb, vb + Na)
        std::size_t va = a.valuation(), vb = b.valuation();
        std::size_t n = std::min(va + b.order(), vb + a.order());
        std::vector<GaussianRational> c(n);
        for (std::size_t i = va; i < std::min(n, a.order()); ++i) {
            if (a.c_[i].is_zero())
                continue;
            for (std::size_t j = vb; i + j < n && j < b.order(); ++j)
                if (!b.c_[j].is_zero())
                    c[i + j] += a.c_[i] * b.c_[j];
        }
        return Series(std::move(c));
    }
    friend bool operator==(const Series& a, const Series& b) { return a.c_ == b.c_; }

    Series pow(unsigned e) const
    {
        Series r = constant(GaussianRational(1), order());
        Series b = *this;
        while (e) {
            if (e & 1u)
                r = r * b;
            e >>= 1;
            if (e)
                b = b * b;
        }
        return r;
    }

    /// d/dz; the order drops by one.
    Series derivative() const
    {
        if (c_.empty())
            return {};
        std::vector<GaussianRational> c(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            c[k - 1] = c_[k] * GaussianRational(static_cast<long>(k));
        return Series(std::move(c));
    }

    /// Antiderivative with zero constant term; the order grows by one.
    Series integral() const
    {
        std::vector<GaussianRational> c(c_.size() + 1);
        for (std::size_t k = 0; k < c_.size(); ++k)
            c[k + 1] = c_[k] / GaussianRational(static_cast<long>(k + 1));
        return Series(std::move(c));
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    Series inverse() const
    {
        if (c_.empty() || c_[0].is_zero())
            throw DomainError("series inverse needs a nonzero constant term");
        std::vector<GaussianRational> b(c_.size());
        GaussianRational inv0 = c_[0].inverse();
        b[0] = inv0;
        for (std::size_t k = 1; k < c_.size(); ++k) {
            GaussianRational s;
            for (std::size_t j = 1; j <= k; ++j)
                if (!c_[j].is_zero())
                    s += c_[j] * b[k - j];
            b[k] = -(s * inv0);
        }
        return Series(std::move(b));
    }

    friend Series operator/(const Series& a, const Series& b) { return a * b.inverse(); }

    /// f(g(z)) for g(0) = 0. Known to order min(order(g), order(f) * val(g)).
    Series compose(const Series& g) const
    {
        if (g.order() == 0 || !g.c_[0].is_zero())
            throw DomainError("composition needs g(0) = 0");
        std::size_t vg = g.valuation();
        if (vg >= g.order())
            return constant(c_.empty() ? GaussianRational() : c_[0], g.order());
        std::size_t n = std::min(g.order(), c_.size() * vg);
        // Horner in the series ring
        Series acc = constant(GaussianRational(), n);
        Series gg = g.order() >= n ? g.truncated(n) : g;
        for (std::size_t k = c_.size(); k-- > 0;) {
            acc = acc * gg;
            if (acc.order() > n)
                acc = acc.truncated(n);
            acc = acc + constant(c_[k], acc.order());
        }
        return acc.truncated(std::min(acc.order(), n));
    }

    /// Compositional inverse g with f(g(z)) = z; requires f(0) = 0, f'(0) != 0.
    Series reversion() const
    {
        if (c_.size() < 2 || !c_[0].is_zero() || c_[1].is_zero())
            throw DomainError("reversion needs f(0) = 0 and f'(0) != 0");
        std::size_t n = c_.size();
        // Newton-free iterative solve: g_k determined from [z^k] f(g) = 0 for k >= 2.
        std::vector<GaussianRational> g(n);
        g[1] = c_[1].inverse();
        for (std::size_t k = 2; k < n; ++k) {
            Series gs(g);
            Series fg = compose(gs.truncated(k + 1));
            // fg[k] currently includes c_1 * g[k] with g[k] = 0
            g[k] = -(fg[k] * g[1]);
        }
        return Series(std::move(g));
    }

private:
    std::vector<GaussianRational> c_;
};

} // namespace ztraj
