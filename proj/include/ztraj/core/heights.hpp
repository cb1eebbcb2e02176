#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ztraj/core/ball.hpp"
#include "ztraj/core/polynomial.hpp"

namespace ztraj {

/// lcm of all coefficient denominators (real and imaginary parts).
inline Integer denominator_lcm(const Polynomial& p)
{
    Integer l = 1;
    for (const auto& [m, c] : p.terms()) {
        Integer d = c.denominator_lcm();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    return l;
}

/// Logarithmic height: log of the largest coefficient modulus of the
/// Gaussian-integer polynomial obtained by clearing denominators.
inline double height(const Polynomial& p)
{
    if (p.is_zero())
        throw DomainError("height of the zero polynomial");
    Integer l = denominator_lcm(p);
    Integer best = 0;
    for (const auto& [m, c] : p.terms()) {
        Integer a = Integer(c.re() * l), b = Integer(c.im() * l);
        Integer n2 = a * a + b * b;
        if (n2 > best)
            best = n2;
    }
    return 0.5 * log_abs(best);
}

/// Height of a Gaussian rational constant viewed as a degree-0 polynomial.
inline double height(const GaussianRational& c) { return height(Polynomial::constant(0, c)); }

/// Euclidean norm of the coefficient vector.
inline double l2_norm(const Polynomial& p)
{
    if (p.is_zero())
        return 0.0;
    Rational s = 0;
    for (const auto& [m, c] : p.terms())
        s += c.norm();
    return std::exp(0.5 * log_abs(s));
}

inline double log_l2_norm(const Polynomial& p)
{
    if (p.is_zero())
        throw DomainError("log norm of the zero polynomial");
    Rational s = 0;
    for (const auto& [m, c] : p.terms())
        s += c.norm();
    return 0.5 * log_abs(s);
}

/// Max-modulus norm of a point.
inline double sup_norm(std::span<const GaussianRational> p)
{
    double m = 0;
    for (const auto& c : p)
        if (!c.is_zero())
            m = std::max(m, std::exp(c.log_abs()));
    return m;
}

/// Exact value at an exact point.
inline GaussianRational evaluate(const Polynomial& P, std::span<const GaussianRational> p) { return P.evaluate(p); }

/// Enclosure of P over a box of balls.
inline ComplexBall evaluate(const Polynomial& P, std::span<const ComplexBall> p, mpfr_prec_t prec)
{
    if (p.size() != P.nvars())
        throw DimensionError("evaluation point has wrong dimension");
    std::vector<std::vector<ComplexBall>> powers(P.nvars());
    auto power = [&](std::size_t j, unsigned e) -> const ComplexBall& {
        auto& pw = powers[j];
        if (pw.empty())
            pw.push_back(ComplexBall::exact(GaussianRational(1), prec));
        while (pw.size() <= e)
            pw.push_back(pw.back() * p[j]);
        return pw[e];
    };
    ComplexBall acc(prec);
    for (const auto& [m, c] : P.terms()) {
        ComplexBall t = ComplexBall::exact(c, prec);
        for (std::size_t j = 0; j < P.nvars(); ++j)
            if (m[j])
                t = t * power(j, m[j]);
        acc = acc + t;
    }
    return acc;
}

inline ComplexBall evaluate(const Polynomial& P, std::span<const GaussianRational> p, mpfr_prec_t prec)
{
    std::vector<ComplexBall> b;
    b.reserve(p.size());
    for (const auto& c : p)
        b.push_back(ComplexBall::exact(c, prec));
    return evaluate(P, std::span<const ComplexBall>(b), prec);
}

/// Right-hand side of the evaluation bound
///   log|P(p)| <= n log max(d, 1) + h(P) + d log+ ||p|| + c,
/// i.e. everything except the additive constant c.
inline double evaluation_bound_log(const Polynomial& P, double sup_norm_p)
{
    double d = std::max(P.degree(), 0);
    double n = static_cast<double>(P.nvars());
    return n * std::log(std::max(d, 1.0)) + height(P) + d * std::max(0.0, std::log(sup_norm_p));
}

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Determinant of a square polynomial matrix by Bareiss fraction-free
/// elimination; every intermediate division is exact.
inline Polynomial det_poly_matrix(PolyMatrix a)
{
    std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n)
            throw DimensionError("det_poly_matrix needs a square matrix");
    if (n == 0)
        return Polynomial::constant(0, GaussianRational(1));
    std::size_t nv = a[0][0].nvars();
    Polynomial prev = Polynomial::constant(nv, GaussianRational(1));
    bool negate = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k].is_zero()) {
            std::size_t s = k + 1;
            while (s < n && a[s][k].is_zero())
                ++s;
            if (s == n)
                return Polynomial(nv);
            std::swap(a[k], a[s]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial t = a[k][k] * a[i][j] - a[i][k] * a[k][j];
                a[i][j] = t.divide_exact(prev);
            }
            a[i][k] = Polynomial(nv);
        }
        prev = a[k][k];
    }
    Polynomial d = a[n - 1][n - 1];
    return negate ? -d : d;
}

} // namespace ztraj
