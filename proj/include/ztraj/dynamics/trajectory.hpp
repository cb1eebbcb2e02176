#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ztraj/core/ball.hpp"
#include "ztraj/core/heights.hpp"
#include "ztraj/dynamics/series_engine.hpp"

namespace ztraj {

/// Truncated solution of x' = xi(x), x(0) = base, with exact coefficients of
/// z^0..z^K in every coordinate.
struct TrajectoryGerm {
    VectorField field;
    std::vector<GaussianRational> base;
    std::vector<Series> coords; // each of order K + 1

    std::size_t truncation() const { return coords.empty() ? 0 : coords[0].order() - 1; }
    bool is_constant() const
    {
        for (const auto& s : coords)
            for (std::size_t k = 1; k < s.order(); ++k)
                if (!s[k].is_zero())
                    return false;
        return true;
    }
};

inline TrajectoryGerm trajectory_series(const VectorField& xi, const std::vector<GaussianRational>& p, std::size_t K)
{
    SeriesEngine eng(xi, p);
    eng.extend_to(K + 1);
    TrajectoryGerm g{xi, p, {}};
    for (std::size_t i = 0; i < xi.dim(); ++i)
        g.coords.push_back(eng.coordinate(i, K + 1));
    return g;
}

/// P(phi(z)) as a truncated series of the same order as the germ.
inline Series compose(const Polynomial& P, const TrajectoryGerm& germ)
{
    SeriesEngine eng(germ.coords);
    std::size_t h = eng.track(P);
    return eng.series(h, eng.order());
}

/// 2^(n+1) (d + (n-1) delta)^n: the multiplicity bound along a trajectory.
inline unsigned long mult_morse_bound(std::size_t n, int d, int delta)
{
    unsigned long base = static_cast<unsigned long>(d + static_cast<int>(n - 1) * delta);
    unsigned long r = 1ul << (n + 1);
    for (std::size_t i = 0; i < n; ++i)
        r *= base;
    return r;
}

struct MultiplicityResult {
    std::optional<unsigned long> value; // nullopt: P o phi vanishes to order > cap
    unsigned long cap;
};

/// Order of vanishing of P o phi at z = 0, searched up to the given cap
/// (default: the multiplicity bound for deg P and delta).
inline MultiplicityResult multiplicity(const VectorField& xi, const std::vector<GaussianRational>& p,
                                       const Polynomial& P, std::optional<unsigned long> cap = std::nullopt)
{
    unsigned long c = cap ? *cap : mult_morse_bound(xi.dim(), std::max(P.degree(), 0), xi.delta());
    if (P.is_zero())
        return {std::nullopt, c};
    SeriesEngine eng(xi, p);
    std::size_t h = eng.track(P);
    for (unsigned long k = 0; k <= c; ++k)
        if (!eng.coefficient(h, k).is_zero())
            return {k, c};
    return {std::nullopt, c};
}

/// Germ reparametrized by z -> s z (the trajectory of s * xi).
inline TrajectoryGerm rescaled(const TrajectoryGerm& g, const GaussianRational& s)
{
    TrajectoryGerm r{g.field.scaled(s), g.base, {}};
    for (const auto& c : g.coords) {
        std::vector<GaussianRational> v = c.coeffs();
        GaussianRational pw(1);
        for (auto& x : v) {
            x *= pw;
            pw *= s;
        }
        r.coords.emplace_back(std::move(v));
    }
    return r;
}

/// Polynomial in z with ball coefficients.
using BallPoly = std::vector<ComplexBall>;

namespace detail {

inline BallPoly ball_poly_mul(const BallPoly& a, const BallPoly& b, mpfr_prec_t prec)
{
    if (a.empty() || b.empty())
        return {};
    BallPoly c(a.size() + b.size() - 1, ComplexBall(prec));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = c[i + j] + a[i] * b[j];
    return c;
}

/// Upper bound of sum |c_k| rho^k.
inline double majorant(const BallPoly& p, double rho, std::size_t from = 0)
{
    double s = 0, pw = 1;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k >= from)
            s = up(s + up(p[k].abs_upper() * pw));
        pw = up(pw * rho);
    }
    return s;
}

/// Upper bound of sup |Q| over the polydisc |x_j| <= R_j.
inline double polydisc_sup(const Polynomial& Q, const std::vector<double>& R)
{
    double s = 0;
    for (const auto& [m, c] : Q.terms()) {
        double t = up(std::exp(c.log_abs()) * (1 + 1e-12));
        for (std::size_t j = 0; j < R.size(); ++j)
            if (m[j])
                t = up(t * std::pow(R[j], m[j]) * (1 + 1e-14));
        s = up(s + t);
    }
    return s;
}

} // namespace detail

/// A germ together with a certified disc of convergence: for |z| <= radius
/// the true solution satisfies |phi_j(z) - S_j(z)| <= eta, where S is the
/// truncated series.
class ParametrizedTrajectory {
public:
    ParametrizedTrajectory(TrajectoryGerm germ, double radius, double eta, mpfr_prec_t prec)
        : germ_(std::move(germ)), radius_(radius), eta_(eta), prec_(prec)
    {
        for (const auto& s : germ_.coords) {
            BallPoly b;
            for (const auto& c : s.coeffs())
                b.push_back(ComplexBall::exact(c, prec_));
            balls_.push_back(std::move(b));
        }
    }

    const TrajectoryGerm& germ() const { return germ_; }
    double radius() const { return radius_; }
    double tail_bound() const { return eta_; }
    mpfr_prec_t precision() const { return prec_; }

    /// Same certificate evaluated at a different working precision.
    ParametrizedTrajectory with_precision(mpfr_prec_t prec) const { return {germ_, radius_, eta_, prec}; }

    /// Enclosures of phi_j(z) for every z in the ball; the ball must lie in
    /// the closed disc of the certified radius.
    std::vector<ComplexBall> evaluate(const ComplexBall& z) const
    {
        if (z.abs_upper() > radius_ * (1 + 1e-12))
            throw DomainError("evaluation outside the certified disc");
        std::vector<ComplexBall> out;
        for (const auto& b : balls_) {
            ComplexBall acc(prec_);
            for (std::size_t k = b.size(); k-- > 0;)
                acc = acc * z + b[k];
            out.push_back(acc.inflated(eta_));
        }
        return out;
    }

    ComplexBall evaluate(const Polynomial& P, const ComplexBall& z) const
    {
        auto pt = evaluate(z);
        return ztraj::evaluate(P, std::span<const ComplexBall>(pt), prec_);
    }

private:
    TrajectoryGerm germ_;
    double radius_;
    double eta_;
    mpfr_prec_t prec_;
    std::vector<BallPoly> balls_;
};

struct RadiusAttempt {
    double rho;
    double residual;  // sup of |xi(S) - S'| on the disc
    double lipschitz; // at the accepted eta
    double eta;       // 0 when the attempt failed
};

/// Error bound of the truncated germ on |z| <= rho, or nullopt when the
/// a-posteriori estimate does not close.
///
/// With r = xi(S) - S' and L a Lipschitz bound for xi on the polydisc of
/// radii sup|S_j| + eta, Gronwall along rays gives |phi - S| <= R rho e^(L rho)
/// as long as this stays below eta.
inline RadiusAttempt certify_at(const TrajectoryGerm& g, double rho, mpfr_prec_t prec = 128)
{
    const VectorField& xi = g.field;
    std::size_t n = xi.dim();
    std::vector<BallPoly> S(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& c : g.coords[i].coeffs())
            S[i].push_back(ComplexBall::exact(c, prec));
    // residual r_i = xi_i(S) - S_i'
    double R = 0;
    std::vector<std::vector<BallPoly>> powers(n);
    auto power = [&](std::size_t j, unsigned e) -> const BallPoly& {
        auto& pw = powers[j];
        if (pw.empty())
            pw.push_back(BallPoly{ComplexBall::exact(GaussianRational(1), prec)});
        while (pw.size() <= e)
            pw.push_back(detail::ball_poly_mul(pw.back(), S[j], prec));
        return pw[e];
    };
    for (std::size_t i = 0; i < n; ++i) {
        BallPoly acc;
        for (const auto& [m, c] : xi[i].terms()) {
            BallPoly t{ComplexBall::exact(c, prec)};
            for (std::size_t j = 0; j < n; ++j)
                if (m[j])
                    t = detail::ball_poly_mul(t, power(j, m[j]), prec);
            if (acc.size() < t.size())
                acc.resize(t.size(), ComplexBall(prec));
            for (std::size_t k = 0; k < t.size(); ++k)
                acc[k] = acc[k] + t[k];
        }
        for (std::size_t k = 1; k < S[i].size(); ++k) {
            if (acc.size() < k)
                acc.resize(k, ComplexBall(prec));
            acc[k - 1] = acc[k - 1] - S[i][k] * ComplexBall::exact(GaussianRational(static_cast<long>(k)), prec);
        }
        R = std::max(R, detail::majorant(acc, rho));
    }
    std::vector<double> B(n);
    for (std::size_t j = 0; j < n; ++j)
        B[j] = detail::majorant(S[j], rho);
    std::vector<std::vector<Polynomial>> jac(n, std::vector<Polynomial>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            jac[i][j] = xi[i].derivative(j);
    double bmax = *std::max_element(B.begin(), B.end());
    double eta = std::max(1e-300, detail::up(2 * R * rho));
    for (int it = 0; it < 200; ++it) {
        std::vector<double> rad(n);
        for (std::size_t j = 0; j < n; ++j)
            rad[j] = detail::up(B[j] + eta);
        double L = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j)
                s = detail::up(s + detail::polydisc_sup(jac[i][j], rad));
            L = std::max(L, s);
        }
        double need = detail::up(R * rho * std::exp(L * rho) * (1 + 1e-9));
        if (std::isfinite(need) && need <= eta)
            return {rho, R, L, eta};
        // grow eta geometrically; give up once it is no longer small
        eta = std::max(eta * 4, need);
        if (!(eta < 1e-2 * (1 + bmax)))
            return {rho, R, L, 0};
    }
    return {rho, R, 0, 0};
}

/// Certifies the largest radius of the form target * 0.9^j. Throws if no
/// positive radius down to target * 1e-6 can be certified.
inline ParametrizedTrajectory certify_radius(const TrajectoryGerm& g, double target, mpfr_prec_t prec = 128)
{
    if (g.is_constant())
        throw CertificationError("constant germ: no trajectory disc to certify");
    for (double rho = target; rho > target * 1e-6; rho *= 0.9) {
        RadiusAttempt a = certify_at(g, rho, prec);
        if (a.eta > 0)
            return ParametrizedTrajectory(g, rho, a.eta, prec);
    }
    throw CertificationError("could not certify a positive convergence radius");
}

} // namespace ztraj
