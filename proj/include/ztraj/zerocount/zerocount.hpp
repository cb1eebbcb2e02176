#pragma once

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ztraj/dynamics/trajectory.hpp"
#include "ztraj/orbit/orbit_ideal.hpp"
#include "ztraj/util/parallel.hpp"
#include "ztraj/util/rng.hpp"

namespace ztraj {

/// f = P o phi on the certified disc of a parametrized trajectory.
class DiscFunction {
public:
    DiscFunction(ParametrizedTrajectory traj, Polynomial poly) : traj_(std::move(traj)), poly_(std::move(poly))
    {
        if (poly_.nvars() != traj_.germ().coords.size())
            throw DimensionError("polynomial and trajectory in different dimensions");
        derivative_ = lie_derivative(traj_.germ().field, poly_);
    }

    const ParametrizedTrajectory& trajectory() const { return traj_; }
    const Polynomial& poly() const { return poly_; }
    double radius() const { return traj_.radius(); }
    mpfr_prec_t precision() const { return traj_.precision(); }

    DiscFunction with_precision(mpfr_prec_t prec) const { return {traj_.with_precision(prec), poly_}; }

    /// Enclosure of f over every point of the ball z: the tighter of the
    /// direct enclosure and the mean-value form f(c) + f'(z) (z - c), where
    /// f' = (xi P) o phi because phi' = xi(phi).
    ComplexBall operator()(const ComplexBall& z) const
    {
        ComplexBall direct = traj_.evaluate(poly_, z);
        if (z.rad() == 0)
            return direct;
        auto c = z.mid();
        ComplexBall fc = traj_.evaluate(poly_, ComplexBall::from_double(c.real(), c.imag(), precision()));
        ComplexBall slope = traj_.evaluate(derivative_, z);
        ComplexBall centered = fc + slope * ComplexBall::from_double(0, 0, precision(), z.rad());
        return centered.rad() < direct.rad() ? centered : direct;
    }

    /// Exact Taylor series of f up to the germ truncation.
    Series series() const { return compose(poly_, traj_.germ()); }

    /// Whether every known Taylor coefficient vanishes.
    bool vanishes_to_truncation() const
    {
        Series s = series();
        for (const auto& c : s.coeffs())
            if (!c.is_zero())
                return false;
        return true;
    }

private:
    ParametrizedTrajectory traj_;
    Polynomial poly_;
    Polynomial derivative_;
};

struct WindingOptions {
    unsigned initial_arcs = 64;
    double min_arc = 1e-7;    // radians
    unsigned threads = 1;
};

struct WindingResult {
    bool certified = false;
    long winding = 0;
    std::size_t arcs = 0;
    double error_bound = 0; // bound on |sum of arguments - 2 pi winding| before rounding
};

namespace detail {

/// Angular radius of a ball as seen from 0 (ball must exclude 0).
inline double angular_radius(const ComplexBall& b)
{
    double lo = b.abs_lower();
    if (lo <= 0)
        return std::numbers::pi;
    double s = b.rad() / (lo + b.rad());
    return s >= 1 ? std::numbers::pi : up(std::asin(s) * (1 + 1e-12));
}

struct ArcSum {
    bool ok = true;
    double arg = 0;
    double err = 0;
    std::size_t arcs = 0;
};

/// Argument change of f along the arc center + r e^{i theta}, theta in [a, b],
/// by bisection until each sub-arc's enclosure excludes 0.
inline ArcSum arc_argument(const DiscFunction& f, std::complex<double> center, double r, double a, double b,
                           const WindingOptions& opt, std::atomic<bool>& abort)
{
    mpfr_prec_t prec = f.precision();
    auto point = [&](double t) {
        std::complex<double> z = center + std::polar(r, t);
        return ComplexBall::from_double(z.real(), z.imag(), prec);
    };
    ArcSum out;
    std::vector<std::pair<double, double>> stack{{a, b}};
    while (!stack.empty()) {
        if (abort.load(std::memory_order_relaxed)) {
            out.ok = false;
            return out;
        }
        auto [lo, hi] = stack.back();
        stack.pop_back();
        double mid = 0.5 * (lo + hi);
        std::complex<double> zc = center + std::polar(r, mid);
        // the arc lies within r (hi - lo) / 2 of its midpoint; widen for the
        // double rounding of the midpoint itself
        double rad = up(r * (hi - lo) / 2 * (1 + 1e-12) + 4e-16 * (std::abs(zc) + 1));
        ComplexBall cover = ComplexBall::from_double(zc.real(), zc.imag(), prec, rad);
        ComplexBall fc = f(cover);
        if (!fc.contains_zero() && angular_radius(fc) < std::numbers::pi / 2) {
            // both endpoints lie in fc, so the continuous argument change is the
            // principal argument of f(hi) / f(lo)
            ComplexBall fa = f(point(lo)), fb = f(point(hi));
            std::complex<double> q = fb.mid() / fa.mid();
            out.arg += std::arg(q);
            out.err = up(out.err + angular_radius(fa) + angular_radius(fb) + 1e-15);
            ++out.arcs;
            continue;
        }
        if (hi - lo < opt.min_arc) {
            // a zero sits on (or numerically at) the contour; stop all arcs
            abort.store(true, std::memory_order_relaxed);
            out.ok = false;
            return out;
        }
        stack.emplace_back(mid, hi);
        stack.emplace_back(lo, mid);
    }
    return out;
}

} // namespace detail

/// Certified winding number of f around 0 along |z - center| = r.
inline WindingResult winding_number(const DiscFunction& f, std::complex<double> center, double r,
                                    const WindingOptions& opt = {})
{
    if (std::abs(center) + r * (1 + 1e-9) > f.radius())
        throw DomainError("contour leaves the certified disc");
    unsigned n = std::max(4u, opt.initial_arcs);
    double step = 2 * std::numbers::pi / n;
    std::atomic<bool> abort{false};
    auto parts = parallel_map(n, opt.threads, [&](std::size_t j) {
        double a = step * static_cast<double>(j), b = j + 1 == n ? 2 * std::numbers::pi : step * static_cast<double>(j + 1);
        return detail::arc_argument(f, center, r, a, b, opt, abort);
    });
    WindingResult res;
    double total = 0;
    for (const auto& p : parts) {
        if (!p.ok)
            return res;
        total += p.arg;
        res.error_bound += p.err;
        res.arcs += p.arcs;
    }
    double w = total / (2 * std::numbers::pi);
    res.winding = std::lround(w);
    double miss = std::abs(total - 2 * std::numbers::pi * static_cast<double>(res.winding));
    res.certified = miss + res.error_bound < std::numbers::pi;
    return res;
}

struct ZeroCount {
    long count = 0;
    bool certified = false;
    double radius = 1;              // counting radius actually used
    mpfr_prec_t precision = 0;      // precision of the certified run
    std::size_t arcs = 0;
    std::vector<mpfr_prec_t> attempts;
};

struct CountOptions {
    mpfr_prec_t max_precision = 1024;
    unsigned dilations = 8;
    WindingOptions winding;
};

/// Zeros of f in the closed unit disc, counted with multiplicity by the
/// argument principle. Precision is doubled up to max_precision; if the unit
/// circle still cannot be certified, the radius is dilated within (1, r) and
/// the radius used is reported.
inline ZeroCount count_zeros(const DiscFunction& f, mpfr_prec_t precision, const CountOptions& opt = {})
{
    if (f.vanishes_to_truncation())
        throw DomainError("function vanishes identically to the series truncation");
    if (f.radius() <= 1)
        throw DomainError("trajectory is not certified beyond the unit disc");
    ZeroCount zc;
    std::vector<double> radii{1.0};
    for (unsigned j = 1; j <= opt.dilations; ++j)
        radii.push_back(1 + (f.radius() - 1) * j / (4.0 * (opt.dilations + 1)));
    for (double r : radii) {
        for (mpfr_prec_t prec = precision; prec <= std::max(precision, opt.max_precision); prec *= 2) {
            zc.attempts.push_back(prec);
            WindingResult w = winding_number(f.with_precision(prec), {0, 0}, r, opt.winding);
            if (w.certified) {
                zc.count = w.winding;
                zc.certified = true;
                zc.radius = r;
                zc.precision = prec;
                zc.arcs = w.arcs;
                return zc;
            }
        }
    }
    throw CertificationError("argument principle could not be certified at any precision or radius");
}

struct RootEnclosure {
    std::complex<double> center;
    double radius;
    long multiplicity;
};

/// Locates the zeros counted by count_zeros: approximate roots of the
/// truncated Taylor polynomial, clustered, each cluster certified by its own
/// winding number on a small circle. The enclosures are pairwise disjoint.
inline std::vector<RootEnclosure> localize_zeros(const DiscFunction& f, double counting_radius,
                                                 const WindingOptions& opt = {})
{
    Series s = f.series();
    // drop the numerically negligible top of the series
    double scale = std::max(1.0, counting_radius * 1.5);
    std::vector<std::complex<double>> c;
    double cmax = 0;
    for (std::size_t k = 0; k < s.order(); ++k) {
        c.push_back(s[k].to_complex());
        cmax = std::max(cmax, std::abs(c.back()) * std::pow(scale, static_cast<double>(k)));
    }
    while (!c.empty() && std::abs(c.back()) * std::pow(scale, static_cast<double>(c.size() - 1)) < 1e-14 * cmax)
        c.pop_back();
    std::vector<std::complex<double>> approx;
    if (c.size() >= 2) {
        // roots of S(scale w), mapped back
        Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1> poly(static_cast<Eigen::Index>(c.size()));
        for (std::size_t k = 0; k < c.size(); ++k)
            poly(static_cast<Eigen::Index>(k)) = c[k] * std::pow(scale, static_cast<double>(k));
        Eigen::PolynomialSolver<std::complex<double>, Eigen::Dynamic> solver(poly);
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
            std::complex<double> z = solver.roots()(i) * scale;
            if (std::abs(z) <= counting_radius + 0.25 * (f.radius() - counting_radius))
                approx.push_back(z);
        }
    }
    // cluster roots closer than 1e-3
    std::vector<std::vector<std::complex<double>>> clusters;
    for (auto z : approx) {
        bool placed = false;
        for (auto& cl : clusters)
            if (std::abs(cl.front() - z) < 1e-3) {
                cl.push_back(z);
                placed = true;
                break;
            }
        if (!placed)
            clusters.push_back({z});
    }
    std::vector<std::complex<double>> centers;
    for (const auto& cl : clusters) {
        std::complex<double> m = 0;
        for (auto z : cl)
            m += z;
        centers.push_back(m / static_cast<double>(cl.size()));
    }
    std::vector<RootEnclosure> out;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double gap = 0.05;
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (j != i)
                gap = std::min(gap, 0.45 * std::abs(centers[i] - centers[j]));
        // stay inside the certified disc
        gap = std::min(gap, 0.9 * (f.radius() - std::abs(centers[i])));
        if (gap <= 0)
            continue;
        for (double rad = gap; rad >= gap * 1e-3; rad *= 0.5) {
            WindingResult w = winding_number(f, centers[i], rad, opt);
            if (w.certified) {
                if (w.winding > 0)
                    out.push_back({centers[i], rad, w.winding});
                break;
            }
        }
    }
    return out;
}

/// Certified max |f| over the closed disc of radius r: the maximum over the
/// circle (maximum principle). Returns {lower, upper} bounds whose ratio is
/// refined down to 1 + tol or until max_arcs arcs are in use (|f| nearly
/// constant on the circle).
inline std::pair<double, double> disc_maximum(const DiscFunction& f, double r, unsigned samples = 64,
                                              double tol = 1e-2, std::size_t max_arcs = 2048)
{
    if (r > f.radius() * (1 + 1e-12))
        throw DomainError("maximum requested outside the certified disc");
    mpfr_prec_t prec = f.precision();
    struct Arc {
        double a, b, upper;
    };
    double lower = 0;
    auto cover = [&](double a, double b) {
        double mid = 0.5 * (a + b);
        std::complex<double> zc = std::polar(r, mid);
        double rad = detail::up(r * (b - a) / 2 * (1 + 1e-12) + 4e-16 * (r + 1));
        ComplexBall fb = f(ComplexBall::from_double(zc.real(), zc.imag(), prec, rad));
        ComplexBall fm = f(ComplexBall::from_double(zc.real(), zc.imag(), prec));
        lower = std::max(lower, fm.abs_lower());
        return Arc{a, b, fb.abs_upper()};
    };
    std::vector<Arc> arcs;
    double step = 2 * std::numbers::pi / samples;
    for (unsigned j = 0; j < samples; ++j)
        arcs.push_back(cover(step * j, step * (j + 1)));
    while (arcs.size() < max_arcs) {
        std::vector<Arc> next;
        bool split = false;
        for (const auto& arc : arcs) {
            if (arc.upper > lower * (1 + tol)) {
                double m = 0.5 * (arc.a + arc.b);
                next.push_back(cover(arc.a, m));
                next.push_back(cover(m, arc.b));
                split = true;
            } else {
                next.push_back(arc);
            }
        }
        arcs.swap(next);
        if (!split)
            break;
    }
    double upper = 0;
    for (const auto& arc : arcs)
        upper = std::max(upper, arc.upper);
    return {lower, upper};
}

/// C_r = 1 / log((r^2 + 1) / (2 r)): a Blaschke factor for D_r with zero in
/// the closed unit disc has modulus at most 2r / (r^2 + 1) on that disc.
inline double jensen_constant(double r)
{
    if (!(r > 1))
        throw DomainError("Jensen constant needs r > 1");
    return 1 / std::log((r * r + 1) / (2 * r));
}

struct JensenReport {
    double r = 0;
    double constant = 0;
    double M_upper = 0;  // upper bound for max over the r-disc
    double m_lower = 0;  // lower bound for max over the unit disc
    double bound = 0;    // C_r log(M / m), an upper bound on the zero count
};

/// Upper bound on the zeros of f in the closed unit disc from the maxima of
/// |f| over the unit disc and the r-disc. Escalates precision when the unit
/// maximum cannot be separated from 0.
inline JensenReport jensen_bound(const DiscFunction& f, double r, mpfr_prec_t max_precision = 1024)
{
    JensenReport rep;
    rep.r = r;
    rep.constant = jensen_constant(r);
    Series s = f.series();
    bool constant = true;
    for (std::size_t k = 1; k < s.order(); ++k)
        if (!s[k].is_zero())
            constant = false;
    if (constant)
        return rep; // M = m: the bound is exactly 0
    for (mpfr_prec_t prec = f.precision(); prec <= std::max(f.precision(), max_precision); prec *= 2) {
        DiscFunction g = f.with_precision(prec);
        auto [Mlo, Mup] = disc_maximum(g, r);
        auto [mlo, mup] = disc_maximum(g, 1.0);
        (void)Mlo;
        (void)mup;
        if (mlo > 0) {
            rep.M_upper = Mup;
            rep.m_lower = mlo;
            rep.bound = std::max(0.0, rep.constant * std::log(Mup / mlo));
            return rep;
        }
    }
    throw CertificationError("could not bound max |f| on the unit disc away from zero");
}

struct GrowthRow {
    int d = 0;
    std::size_t samples = 0;
    long max_count = 0;
    double envelope = 0;             // d^(2 kappa (m+1)) log d; 0 for d = 1
    double fitted_c = 0;             // max_count / envelope (d >= 2)
    unsigned long morse_envelope = 0; // 2^(n+1) (d + (n-1) delta)^n
    std::size_t kappa = 0;
    std::vector<long> counts;
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    double fitted_c = 0;  // smallest C with N(d) <= C d^(2 kappa (m+1)) log d for d >= 2
};

/// Random P in P_d with Gaussian-integer coefficients in [-bound, bound] and
/// exact degree d. The zero count is scale invariant, so no normalization.
inline Polynomial harness_polynomial(Rng& rng, std::size_t n, int d, long bound = 9)
{
    return random_gaussian_polynomial(rng, n, static_cast<unsigned>(d), bound);
}

/// For each degree draws seeded random P, counts zeros of P o phi on the
/// closed unit disc and fits the growth constant. Samples run in parallel;
/// each sample owns a generator split from the seed in index order.
inline GrowthTable main_theorem_harness(const VectorField& xi, const ParametrizedTrajectory& traj,
                                        const std::vector<int>& degrees, std::size_t samples, std::uint64_t seed,
                                        mpfr_prec_t precision = 128, unsigned threads = 1)
{
    GrowthTable table;
    std::size_t n = xi.dim();
    const auto& base = traj.germ().base;
    for (int d : degrees) {
        GrowthRow row;
        row.d = d;
        row.samples = samples;
        row.kappa = leading_diagram(ideal_slice(xi, base, d)).kappa();
        row.morse_envelope = mult_morse_bound(n, d, xi.delta());
        double m = static_cast<double>(n);
        row.envelope = d >= 2 ? std::pow(d, 2.0 * static_cast<double>(row.kappa) * (m + 1)) * std::log(d) : 0.0;
        Rng master(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(d)));
        std::vector<Rng> gens;
        for (std::size_t s = 0; s < samples; ++s)
            gens.push_back(master.split(s));
        row.counts = parallel_map(samples, threads, [&](std::size_t s) {
            Rng rng = gens[s];
            Polynomial P = harness_polynomial(rng, n, d);
            return count_zeros(DiscFunction(traj, P), precision).count;
        });
        for (long c : row.counts)
            row.max_count = std::max(row.max_count, c);
        if (d >= 2) {
            row.fitted_c = static_cast<double>(row.max_count) / row.envelope;
            table.fitted_c = std::max(table.fitted_c, row.fitted_c);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace ztraj
