#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "ztraj/core/linalg.hpp"
#include "ztraj/core/series.hpp"
#include "ztraj/util/parallel.hpp"

namespace ztraj {

/// Known Taylor coefficients a_0, ..., a_{N-1} of a power series.
using TaylorPrefix = std::vector<GaussianRational>;

/// P = f Q + O(t^N) with deg P, deg Q <= d.
struct PadePair {
    UPoly P;
    UPoly Q;
};

/// The N x (2d + 2) homogeneous system in (p_0..p_d, q_0..q_d):
/// p_k - sum_j a_{k-j} q_j = 0 for k < N.
inline Matrix pade_system(const TaylorPrefix& f, unsigned d, std::size_t N)
{
    if (N > f.size())
        throw DomainError("Pade system needs N <= length of the prefix");
    if (N <= d)
        throw DomainError("Pade system needs N > d");
    Matrix m(N, 2 * d + 2);
    for (std::size_t k = 0; k < N; ++k) {
        if (k <= d)
            m(k, k) = GaussianRational(1);
        for (std::size_t j = 0; j <= std::min<std::size_t>(k, d); ++j)
            m(k, d + 1 + j) = -f[k - j];
    }
    return m;
}

/// A nonzero solution of the Pade system, normalized so that the lowest
/// nonzero coefficient of Q is 1, or nullopt when only the trivial one exists.
inline std::optional<PadePair> pade_solve(const TaylorPrefix& f, unsigned d, std::size_t N)
{
    auto ker = kernel(pade_system(f, d, N));
    if (ker.empty())
        return std::nullopt;
    const auto& v = ker.front();
    std::vector<GaussianRational> p(v.begin(), v.begin() + d + 1), q(v.begin() + d + 1, v.end());
    UPoly P(std::move(p)), Q(std::move(q));
    // Q = 0 would force P = O(t^N) with deg P < N, so P = 0 as well
    if (Q.is_zero())
        throw DomainError("Pade kernel vector with Q = 0");
    GaussianRational s = Q[static_cast<std::size_t>(Q.valuation())].inverse();
    return PadePair{s * P, s * Q};
}

/// Whether f agrees to order N with a rational function of degree <= d:
/// the Pade system has a nontrivial kernel (all its maximal minors vanish).
inline bool rationality_conditions(const TaylorPrefix& f, unsigned d, std::size_t N)
{
    return rank(pade_system(f, d, N)) < 2 * d + 2;
}

inline TaylorPrefix taylor_prefix(const RationalFunction& R, std::size_t N)
{
    Series num = Series::from_upoly(R.num(), N), den = Series::from_upoly(R.den(), N);
    return (num / den).coeffs();
}

/// Rational function from the Pade solution at order N, accepted only when
/// its expansion matches the whole prefix.
inline std::optional<RationalFunction> reconstruct_at(const TaylorPrefix& f, unsigned d, std::size_t N)
{
    auto pq = pade_solve(f, d, N);
    if (!pq)
        return std::nullopt;
    RationalFunction R(pq->P, pq->Q);
    if (R.den()[0].is_zero())
        return std::nullopt;
    if (taylor_prefix(R, f.size()) != f)
        return std::nullopt;
    return R;
}

/// R = R_{3d+1}, verified against every known coefficient.
inline std::optional<RationalFunction> reconstruct(const TaylorPrefix& f, unsigned d)
{
    if (f.size() < 3 * static_cast<std::size_t>(d) + 2)
        throw DomainError("reconstruction at degree d needs at least 3d + 2 coefficients");
    return reconstruct_at(f, d, 3 * static_cast<std::size_t>(d) + 1);
}

inline int rational_degree(const RationalFunction& R) { return std::max(R.num().degree(), R.den().degree()); }

struct DegreeScanRow {
    std::size_t index = 0;
    std::optional<unsigned> degree; // minimal d <= dMax with a successful reconstruction
    std::optional<RationalFunction> R;
};

struct DegreeScan {
    std::vector<DegreeScanRow> rows;
    std::optional<unsigned> max_degree; // over the rational members
    bool all_rational = true;
};

/// Minimal reconstruction degree for each member of an indexed family.
inline DegreeScan uniform_degree_scan(const std::function<TaylorPrefix(std::size_t)>& family, std::size_t count,
                                      unsigned dmax, std::size_t terms, unsigned threads = 1)
{
    if (terms < 3 * static_cast<std::size_t>(dmax) + 2)
        throw DomainError("degree scan needs at least 3 dMax + 2 terms");
    DegreeScan out;
    out.rows = parallel_map(count, threads, [&](std::size_t i) {
        TaylorPrefix f = family(i);
        if (f.size() < terms)
            throw DomainError("family member shorter than the requested number of terms");
        f.resize(terms);
        DegreeScanRow row{i, std::nullopt, std::nullopt};
        for (unsigned d = 0; d <= dmax; ++d)
            if (auto R = reconstruct(f, d)) {
                row.degree = d;
                row.R = std::move(R);
                break;
            }
        return row;
    });
    for (const auto& r : out.rows) {
        if (!r.degree) {
            out.all_rational = false;
            continue;
        }
        out.max_degree = std::max(out.max_degree.value_or(0), *r.degree);
    }
    return out;
}

} // namespace ztraj
