#pragma once

#include <string>
#include <vector>

#include "ztraj/core/series.hpp"
#include "ztraj/dynamics/trajectory.hpp"

namespace ztraj {

/// S(f) = (f''/f')' - (f''/f')^2 / 2, known to order N - 3.
inline Series schwarzian(const Series& f)
{
    if (f.order() < 4)
        throw DomainError("schwarzian needs at least four coefficients");
    Series d1 = f.derivative();
    if (d1[0].is_zero())
        throw DomainError("schwarzian needs f'(0) != 0");
    Series u = d1.derivative() / d1.truncated(d1.order() - 1);
    Series du = u.derivative();
    return du - GaussianRational(make_rational(1, 2)) * (u * u).truncated(du.order());
}

/// R(f) = (f^2 - 1968 f + 2654208) / (2 f^2 (f - 1728)^2).
inline Series j_rational_coefficient(const Series& f)
{
    if (f.order() == 0 || f[0].is_zero() || f[0] == GaussianRational(1728))
        throw DomainError("R(f) needs f(0) not in {0, 1728}");
    std::size_t n = f.order();
    Series one = Series::constant(GaussianRational(1), n);
    Series num = f * f - GaussianRational(1968) * f + GaussianRational(2654208) * one;
    Series g = f - GaussianRational(1728) * one;
    Series den = GaussianRational(2) * (f * f * g * g);
    return num / den;
}

/// chi(f) = S(f) + R(f) (f')^2, known to order N - 3.
inline Series chi(const Series& f)
{
    Series S = schwarzian(f);
    Series d1 = f.derivative();
    Series r = (j_rational_coefficient(f).truncated(d1.order()) * d1 * d1).truncated(S.order());
    return S + r;
}

namespace detail {

inline Polynomial j_q(std::size_t n, std::size_t y, std::size_t yp)
{
    Polynomial Y = Polynomial::variable(n, y), P = Polynomial::variable(n, yp);
    Polynomial c = Polynomial::constant(n, GaussianRational(1728));
    return (Y * (Y - c)).pow(3) * P * P;
}

/// q A with A = 3 f''^2 / (2 f') - R(f) f'^3, the right-hand side of chi(f) = 0
/// solved for f'''.
inline Polynomial j_qA(std::size_t n, std::size_t y, std::size_t yp, std::size_t ypp)
{
    Polynomial Y = Polynomial::variable(n, y), P = Polynomial::variable(n, yp), W = Polynomial::variable(n, ypp);
    auto C = [n](long v) { return Polynomial::constant(n, GaussianRational(v)); };
    Polynomial quad = Y * Y - C(1968) * Y + C(2654208);
    Polynomial first = GaussianRational(make_rational(3, 2)) * ((Y * (Y - C(1728))).pow(3) * P * W * W);
    Polynomial second = GaussianRational(make_rational(1, 2)) * (quad * Y * (Y - C(1728)) * P.pow(5));
    return first - second;
}

} // namespace detail

/// q(y, y', y'') [d/dt + y' d/dy + y'' d/dy' + A d/dy''] with
/// q = y^3 (y - 1728)^3 (y')^2, on variables (t, y, yp, ypp).
inline VectorField jfunction_field()
{
    const std::size_t n = 4;
    Polynomial q = detail::j_q(n, 1, 2);
    return VectorField({"t", "y", "yp", "ypp"},
                       {q, q * Polynomial::variable(n, 2), q * Polynomial::variable(n, 3), detail::j_qA(n, 1, 2, 3)});
}

/// Shared-time field whose trajectories are t -> (t, F_k(r_k(t)), F_k'(r_k(t)),
/// F_k''(r_k(t)))_k with chi(F_k) = 0. Derivatives are taken in the argument of
/// F_k, so d/dt acts on copy k through r_k'(t). The field is cleared by the
/// lcm of the denominators of the r_k' and by the product of the q's.
inline VectorField translates_field(const std::vector<RationalFunction>& r)
{
    if (r.empty())
        throw DomainError("translates_field needs at least one function");
    std::size_t copies = r.size(), n = 1 + 3 * copies;
    std::vector<RationalFunction> dr;
    UPoly D = UPoly::constant(GaussianRational(1));
    for (const auto& rk : r) {
        if (rk.num().degree() <= 0 && rk.den().degree() <= 0)
            throw DomainError("translates_field needs nonconstant functions");
        dr.push_back(rk.derivative());
        const UPoly& b = dr.back().den();
        D = (D * b).divmod(gcd(D, b)).first.monic();
    }
    std::vector<Polynomial> q;
    for (std::size_t k = 0; k < copies; ++k)
        q.push_back(detail::j_q(n, 1 + 3 * k, 2 + 3 * k));
    Polynomial all_q = Polynomial::constant(n, GaussianRational(1));
    for (const auto& qk : q)
        all_q *= qk;

    VariableNames names{"t"};
    std::vector<Polynomial> comps{D.to_polynomial(n, 0) * all_q};
    for (std::size_t k = 0; k < copies; ++k) {
        std::string s = copies == 1 ? "" : std::to_string(k + 1);
        names.insert(names.end(), {"y" + s, "yp" + s, "ypp" + s});
        auto [Dr, rem] = (D * dr[k].num()).divmod(dr[k].den());
        if (!rem.is_zero())
            throw CertificationError("denominator clearing failed");
        Polynomial c = Dr.to_polynomial(n, 0);
        Polynomial others = Polynomial::constant(n, GaussianRational(1));
        for (std::size_t l = 0; l < copies; ++l)
            if (l != k)
                others *= q[l];
        comps.push_back(c * all_q * Polynomial::variable(n, 2 + 3 * k));
        comps.push_back(c * all_q * Polynomial::variable(n, 3 + 3 * k));
        comps.push_back(c * others * detail::j_qA(n, 1 + 3 * k, 2 + 3 * k, 3 + 3 * k));
    }
    return VectorField(names, std::move(comps));
}

/// Coordinates of a trajectory re-expanded in tau = t - t(0), where the time
/// coordinate is coordinate 0 and t'(0) != 0.
inline std::vector<Series> time_parametrized(const TrajectoryGerm& g)
{
    Series tau = g.coords.at(0) - Series::constant(g.coords[0][0], g.coords[0].order());
    if (tau.order() < 2 || tau[1].is_zero())
        throw DomainError("time coordinate is stationary at the base point");
    Series z = tau.reversion();
    std::vector<Series> out;
    for (const auto& c : g.coords)
        out.push_back(c.compose(z));
    return out;
}

/// chi of the y-coordinate of the jfunction_field trajectory through p,
/// re-expanded in the time variable; zero to order K - 3 for nonsingular p.
inline Series jfunction_chi_residual(const std::vector<GaussianRational>& p, std::size_t K)
{
    auto xi = jfunction_field();
    if (xi.is_singular(p) || xi[0].evaluate(p).is_zero())
        throw DomainError("initial point lies on the singular locus q = 0");
    auto coords = time_parametrized(trajectory_series(xi, p, K));
    return chi(coords[1]);
}

} // namespace ztraj
