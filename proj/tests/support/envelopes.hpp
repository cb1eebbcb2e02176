#pragma once

// Fitting routines for the O(.)-constants of the height lemmas. Each routine
// draws `count` random instances from `seed` and returns the smallest
// constant c for which the envelope holds on every instance. The shipped
// values live in constants.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "support/random.hpp"
#include "ztraj/core/heights.hpp"
#include "ztraj/dynamics/vector_field.hpp"

namespace ztraj::testing {

/// Naive Laplace expansion along the first row (oracle for det_poly_matrix).
inline Polynomial cofactor_det(const PolyMatrix& a)
{
    std::size_t n = a.size();
    if (n == 1)
        return a[0][0];
    std::size_t nv = a[0][0].nvars();
    Polynomial acc(nv);
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero())
            continue;
        PolyMatrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Polynomial> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j)
                    row.push_back(a[i][k]);
            minor.push_back(std::move(row));
        }
        Polynomial t = a[0][j] * cofactor_det(minor);
        acc += (j % 2 == 0) ? t : -t;
    }
    return acc;
}

/// h(P_1...P_s) <= sum h(P_i) + c deg(P_1...P_s); s in 2..3, n <= 3, deg <= 4,
/// integer coefficients. The product is expanded term by term (no shortcuts).
inline double fit_height_prod(std::uint64_t seed, int count)
{
    Rng rng(seed);
    double c = 0;
    int done = 0;
    while (done < count) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        int s = static_cast<int>(rng.uniform(2, 3));
        Polynomial prod = Polynomial::constant(n, GaussianRational(1));
        double hsum = 0;
        for (int i = 0; i < s; ++i) {
            Polynomial p = random_nonzero_polynomial(rng, n, static_cast<unsigned>(rng.uniform(1, 4)), 30, 0.7);
            hsum += height(p);
            prod = prod * p;
        }
        if (prod.degree() < 1)
            continue;
        c = std::max(c, (height(prod) - hsum) / prod.degree());
        ++done;
    }
    return c;
}

/// log|P(p)| <= n log max(d,1) + h(P) + d log+ ||p|| + c.
inline double fit_poly_eval(std::uint64_t seed, int count)
{
    Rng rng(seed);
    double c = 0;
    int done = 0;
    while (done < count) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        Polynomial P = random_nonzero_polynomial(rng, n, static_cast<unsigned>(rng.uniform(0, 5)), 40, 0.6, 6, true);
        auto p = random_point(rng, n, 12, 5);
        GaussianRational v = P.evaluate(p);
        ++done;
        if (v.is_zero())
            continue;
        c = std::max(c, v.log_abs() - evaluation_bound_log(P, sup_norm(p)));
    }
    return c;
}

/// h(det A) <= rho h + c rho max(d, 1) for rho x rho polynomial matrices with
/// entries of degree <= d and height <= h. Degree-0 matrices use max(d, 1)
/// because the Hadamard factor rho^{rho/2} is not absorbed by rho * 0.
inline double fit_height_det(std::uint64_t seed, int count)
{
    Rng rng(seed);
    double c = 0;
    int done = 0;
    while (done < count) {
        std::size_t rho = static_cast<std::size_t>(rng.uniform(1, 4));
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 2));
        unsigned dmax = static_cast<unsigned>(rng.uniform(0, 2));
        PolyMatrix a(rho, std::vector<Polynomial>(rho));
        double h = 0;
        int d = 0;
        for (auto& row : a)
            for (auto& e : row) {
                e = random_nonzero_polynomial(rng, n, dmax, 25, 0.7);
                h = std::max(h, height(e));
                d = std::max(d, e.degree());
            }
        Polynomial M = det_poly_matrix(a);
        ++done;
        if (M.is_zero())
            continue;
        double r = static_cast<double>(rho);
        c = std::max(c, (height(M) - r * h) / (r * std::max(d, 1)));
    }
    return c;
}

/// Random field with integer coefficients, n <= 3, delta <= 2, no zero component.
inline VectorField random_field(Rng& rng, std::size_t n, unsigned delta, long coef_bound, double density = 0.5)
{
    std::vector<Polynomial> comps;
    for (std::size_t i = 0; i < n; ++i)
        comps.push_back(random_nonzero_polynomial(rng, n, delta, coef_bound, density));
    return VectorField(std::move(comps));
}

/// h(xi^k P) <= h(P) + c (deg P + k log(deg P + k)), fitted over random
/// integer fields (n <= 3, delta <= 2) and P with deg P <= 3, k <= 12.
inline double fit_xi_height(std::uint64_t seed, int count)
{
    Rng rng(seed);
    double c = 0;
    int done = 0;
    while (done < count) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        unsigned delta = static_cast<unsigned>(rng.uniform(0, 2));
        VectorField xi = random_field(rng, n, delta, 5, 0.4);
        Polynomial P = random_nonzero_polynomial(rng, n, static_cast<unsigned>(rng.uniform(1, 3)), 5, 0.5);
        unsigned k = static_cast<unsigned>(rng.uniform(1, n == 3 && delta == 2 ? 6 : 12));
        double hP = height(P);
        for (const auto& rec : iterated_lie_heights(xi, P, k)) {
            if (rec.k == 0 || std::isnan(rec.height))
                continue;
            c = std::max(c, (rec.height - hP) / lie_height_envelope(P.degree(), rec.k));
        }
        ++done;
    }
    return c;
}

} // namespace ztraj::testing
