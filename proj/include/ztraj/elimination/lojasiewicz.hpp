#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "ztraj/core/heights.hpp"
#include "ztraj/util/rng.hpp"

namespace ztraj {

using CVector = std::vector<std::complex<double>>;

/// Fubini-Study style chordal distance on P^n: with representatives scaled to
/// max-modulus 1, dist(w, v) = max_{i<j} |w_i v_j - w_j v_i|.
inline double projective_distance(CVector w, CVector v)
{
    if (w.size() != v.size())
        throw DimensionError("projective points of different dimension");
    auto normalize = [](CVector& a) {
        double m = 0;
        for (auto& z : a)
            m = std::max(m, std::abs(z));
        if (m == 0)
            throw DomainError("the zero vector is not a projective point");
        for (auto& z : a)
            z /= m;
    };
    normalize(w);
    normalize(v);
    double d = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j)
            d = std::max(d, std::abs(w[i] * v[j] - w[j] * v[i]));
    return d;
}

/// psi(p) = (1 : p_1 : ... : p_n).
inline CVector affine_to_projective(const CVector& p)
{
    CVector w{1.0};
    w.insert(w.end(), p.begin(), p.end());
    return w;
}

/// Distance from psi(p) to the hyperplane at infinity {w_0 = 0}.
inline double distance_to_infinity(const CVector& p)
{
    double m = 1;
    for (auto& z : p)
        m = std::max(m, std::abs(z));
    return 1.0 / m;
}

/// Floating-point image of a polynomial for Newton-type iterations.
class NumericPolynomial {
public:
    explicit NumericPolynomial(const Polynomial& P) : n_(P.nvars())
    {
        for (const auto& [m, c] : P.terms()) {
            auto e = m.exponents();
            exps_.emplace_back(e.begin(), e.end());
            coefs_.push_back(c.to_complex());
        }
    }

    std::complex<double> operator()(const CVector& x) const
    {
        std::complex<double> s = 0;
        for (std::size_t t = 0; t < coefs_.size(); ++t) {
            std::complex<double> v = coefs_[t];
            for (std::size_t i = 0; i < n_; ++i)
                if (exps_[t][i])
                    v *= std::pow(x[i], static_cast<int>(exps_[t][i]));
            s += v;
        }
        return s;
    }

    CVector gradient(const CVector& x) const
    {
        CVector g(n_, 0.0);
        for (std::size_t t = 0; t < coefs_.size(); ++t)
            for (std::size_t j = 0; j < n_; ++j) {
                if (!exps_[t][j])
                    continue;
                std::complex<double> v = coefs_[t] * static_cast<double>(exps_[t][j]);
                for (std::size_t i = 0; i < n_; ++i) {
                    unsigned e = exps_[t][i] - (i == j ? 1 : 0);
                    if (e)
                        v *= std::pow(x[i], static_cast<int>(e));
                }
                g[j] += v;
            }
        return g;
    }

private:
    std::size_t n_;
    std::vector<std::vector<unsigned>> exps_;
    CVector coefs_;
};

struct ZeroSearchOptions {
    unsigned starts = 64;
    unsigned max_iterations = 80;
    double tolerance = 1e-11;
    std::uint64_t seed = 1;
};

/// Gauss-Newton (minimum-norm least-squares steps) from the base point, from
/// seeded perturbations of it and from random points in a box around it.
/// Returns the distinct approximate common zeros found.
inline std::vector<CVector> find_common_zeros(const std::vector<Polynomial>& polys, const CVector& p,
                                              const ZeroSearchOptions& opt = {})
{
    std::size_t n = p.size(), m = polys.size();
    std::vector<NumericPolynomial> f;
    for (const auto& q : polys)
        f.emplace_back(q);
    double scale = 1;
    for (auto& z : p)
        scale = std::max(scale, std::abs(z));

    Rng rng(opt.seed);
    std::vector<CVector> starts{p};
    for (unsigned s = 1; s < opt.starts; ++s) {
        CVector x(n);
        double r = s % 2 ? scale * std::pow(10.0, -3.0 + 4.0 * rng.unit()) : 2 * scale;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> u(2 * rng.unit() - 1, 2 * rng.unit() - 1);
            x[i] = (s % 2 ? p[i] : 0.0) + r * u;
        }
        starts.push_back(std::move(x));
    }

    std::vector<CVector> zeros;
    for (auto x : starts) {
        bool ok = false;
        for (unsigned it = 0; it < opt.max_iterations; ++it) {
            Eigen::VectorXcd F(static_cast<Eigen::Index>(m));
            Eigen::MatrixXcd J(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
            double res = 0;
            for (std::size_t k = 0; k < m; ++k) {
                F(static_cast<Eigen::Index>(k)) = f[k](x);
                res = std::max(res, std::abs(F(static_cast<Eigen::Index>(k))));
                auto g = f[k].gradient(x);
                for (std::size_t j = 0; j < n; ++j)
                    J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = g[j];
            }
            double xs = 1;
            for (auto& z : x)
                xs = std::max(xs, std::abs(z));
            if (!std::isfinite(res) || xs > 1e8)
                break;
            if (res <= opt.tolerance * xs) {
                ok = true;
                break;
            }
            Eigen::VectorXcd step = J.completeOrthogonalDecomposition().solve(-F);
            if (!step.allFinite() || step.norm() == 0)
                break;
            for (std::size_t j = 0; j < n; ++j)
                x[j] += step(static_cast<Eigen::Index>(j));
        }
        if (!ok)
            continue;
        bool dup = false;
        for (const auto& z : zeros) {
            double d = 0;
            for (std::size_t j = 0; j < n; ++j)
                d = std::max(d, std::abs(z[j] - x[j]));
            if (d <= 1e-8 * scale)
                dup = true;
        }
        if (!dup)
            zeros.push_back(std::move(x));
    }
    return zeros;
}

struct LojasiewiczReport {
    double log_epsilon = 0;        // log max |P_alpha(p)|
    double log_distance = 0;       // log dist(psi(p), psi(W) or H_inf)
    double distance_to_zeros = std::numeric_limits<double>::infinity();
    double distance_to_infinity = 1;
    std::size_t zeros_found = 0;
    std::size_t n = 0;
    int d = 0;
    double h = 0;
    double needed_c = 0;            // smallest c making the inequality hold
    std::optional<double> c;
    bool holds = true;
    bool on_variety = false;
};

/// Checks log eps >= d^n (n log dist - c (d + h)) at an exact point. The
/// distance uses the zeros found numerically, so it is an upper bound on the
/// true distance and the needed c is an upper bound on the true one.
inline LojasiewiczReport lojasiewicz_check(const std::vector<Polynomial>& polys, const std::vector<GaussianRational>& p,
                                           std::optional<double> c = std::nullopt, const ZeroSearchOptions& opt = {})
{
    if (polys.empty())
        throw DomainError("empty polynomial family");
    LojasiewiczReport r;
    r.n = p.size();
    r.log_epsilon = -std::numeric_limits<double>::infinity();
    for (const auto& q : polys) {
        if (q.nvars() != r.n)
            throw DimensionError("polynomial and point in different dimensions");
        if (q.is_zero())
            continue;
        r.d = std::max(r.d, q.degree());
        r.h = std::max(r.h, height(q));
        GaussianRational v = q.evaluate(p);
        if (!v.is_zero())
            r.log_epsilon = std::max(r.log_epsilon, v.log_abs());
    }
    r.c = c;
    if (!std::isfinite(r.log_epsilon)) {
        r.on_variety = true;
        r.log_distance = -std::numeric_limits<double>::infinity();
        return r;
    }
    CVector pc;
    for (const auto& z : p)
        pc.push_back(z.to_complex());
    r.distance_to_infinity = distance_to_infinity(pc);
    CVector wp = affine_to_projective(pc);
    auto zeros = find_common_zeros(polys, pc, opt);
    r.zeros_found = zeros.size();
    for (const auto& z : zeros)
        r.distance_to_zeros = std::min(r.distance_to_zeros, projective_distance(wp, affine_to_projective(z)));
    double dist = std::min(r.distance_to_zeros, r.distance_to_infinity);
    r.log_distance = std::log(dist);
    double dn = std::pow(static_cast<double>(std::max(r.d, 1)), static_cast<double>(r.n));
    double denom = std::max(r.d, 1) + r.h;
    r.needed_c = std::max(0.0, (static_cast<double>(r.n) * r.log_distance - r.log_epsilon / dn) / denom);
    r.holds = !c || r.needed_c <= *c;
    return r;
}

} // namespace ztraj
