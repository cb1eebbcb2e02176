#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ztraj/core/linalg.hpp"
#include "ztraj/zerocount/zerocount.hpp"

namespace ztraj {

/// H(a/b) = max(|a|, |b|) for the reduced fraction; H(0) = 1.
inline Integer height_of(const Rational& q)
{
    Rational r(q);
    r.canonicalize();
    Integer a = abs(r.get_num());
    return a > r.get_den() ? a : Integer(r.get_den());
}

/// Maximum height over the components.
inline Integer height_of(std::span<const Rational> v)
{
    Integer h = 1;
    for (const auto& q : v)
        h = std::max(h, height_of(q));
    return h;
}

/// Rationals of height <= H in [lo, hi], sorted. The interval is widened by a
/// few ulps, so a rational on the boundary is never missed.
inline std::vector<Rational> rationals_in(double lo, double hi, long H)
{
    std::vector<Rational> out;
    if (!(lo <= hi) || H < 1)
        return out;
    double eps = 8 * std::numeric_limits<double>::epsilon();
    lo = std::max(lo - eps * std::fabs(lo) - 1e-300, -static_cast<double>(H));
    hi = std::min(hi + eps * std::fabs(hi) + 1e-300, static_cast<double>(H));
    if (lo > hi)
        return out;
    for (long b = 1; b <= H; ++b) {
        double bl = static_cast<double>(b);
        long amin = static_cast<long>(std::ceil(bl * lo - eps * bl * std::fabs(lo)));
        long amax = static_cast<long>(std::floor(bl * hi + eps * bl * std::fabs(hi)));
        amin = std::max(amin, -H);
        amax = std::min(amax, H);
        for (long a = amin; a <= amax; ++a)
            if (std::gcd(std::labs(a), b) == 1)
                out.push_back(make_rational(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Fraction with the smallest denominator in the closed interval [lo, hi].
inline Rational simplest_between(Rational lo, Rational hi)
{
    if (lo > hi)
        std::swap(lo, hi);
    if (sgn(lo) <= 0 && sgn(hi) >= 0)
        return Rational(0);
    if (sgn(hi) < 0)
        return -simplest_between(-hi, -lo);
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    if (Rational(fl) == lo)
        return lo;
    if (Rational(fl + 1) <= hi)
        return Rational(fl + 1);
    Rational r = Rational(fl) + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl));
    r.canonicalize();
    return r;
}

namespace detail {

/// Real interval [lo, hi] containing the real parts of a ball.
inline std::pair<double, double> real_interval(const ComplexBall& b)
{
    double lo = mpfr_get_d(b.re().get(), MPFR_RNDD) - b.rad();
    double hi = mpfr_get_d(b.re().get(), MPFR_RNDU) + b.rad();
    return {std::nextafter(std::nextafter(lo, -INFINITY), -INFINITY), std::nextafter(std::nextafter(hi, INFINITY), INFINITY)};
}

inline bool meets_real_axis(const ComplexBall& b)
{
    return std::fabs(mpfr_get_d(b.im().get(), MPFR_RNDZ)) <= b.rad();
}

/// Whether z lies in the ball with a relative margin, so that a positive
/// answer is never due to rounding.
inline bool strictly_inside(const ComplexBall& b, const GaussianRational& z)
{
    mpfr_prec_t p = 2 * b.prec() + 64;
    BigFloat dr(p), di(p), t(p);
    mpfr_set_q(t.get(), z.re().get_mpq_t(), MPFR_RNDN);
    mpfr_sub(dr.get(), t.get(), b.re().get(), MPFR_RNDN);
    mpfr_set_q(t.get(), z.im().get_mpq_t(), MPFR_RNDN);
    mpfr_sub(di.get(), t.get(), b.im().get(), MPFR_RNDN);
    return std::hypot(dr.to_double(), di.to_double()) < 0.5 * b.rad();
}

inline Rational to_rational(const BigFloat& x)
{
    Rational q;
    mpfr_get_q(q.get_mpq_t(), x.get());
    return q;
}

/// Simplest Gaussian rational in the square circumscribing the ball.
inline GaussianRational simplest_in(const ComplexBall& b)
{
    Rational r(b.rad());
    Rational re = to_rational(b.re()), im = to_rational(b.im());
    return {simplest_between(re - r, re + r), simplest_between(im - r, im + r)};
}

/// P(S(z)) and its ingredients in double precision; used only to start
/// Newton iterations, never to decide anything.
class FastComposite {
public:
    FastComposite(const TrajectoryGerm& g, const Polynomial& P)
    {
        for (const auto& s : g.coords) {
            std::vector<std::complex<double>> c;
            for (const auto& a : s.coeffs())
                c.push_back(a.to_complex());
            coords_.push_back(std::move(c));
        }
        for (const auto& [m, c] : P.terms())
            terms_.push_back({c.to_complex(), std::vector<unsigned>(m.exponents().begin(), m.exponents().end())});
    }

    std::complex<double> operator()(std::complex<double> z) const
    {
        std::vector<std::complex<double>> x;
        x.reserve(coords_.size());
        for (const auto& c : coords_) {
            std::complex<double> acc = 0;
            for (std::size_t k = c.size(); k-- > 0;)
                acc = acc * z + c[k];
            x.push_back(acc);
        }
        std::complex<double> s = 0;
        for (const auto& [c, e] : terms_) {
            std::complex<double> t = c;
            for (std::size_t j = 0; j < e.size(); ++j)
                for (unsigned k = 0; k < e[j]; ++k)
                    t *= x[j];
            s += t;
        }
        return s;
    }

private:
    std::vector<std::vector<std::complex<double>>> coords_;
    std::vector<std::pair<std::complex<double>, std::vector<unsigned>>> terms_;
};

/// P(S) for univariate polynomial substitutes S.
inline UPoly compose_upoly(const Polynomial& P, const std::vector<UPoly>& S)
{
    UPoly r;
    for (const auto& [m, c] : P.terms()) {
        UPoly t = UPoly::constant(c);
        for (std::size_t j = 0; j < S.size(); ++j)
            if (m[j])
                t = t * S[j].pow(m[j]);
        r = r + t;
    }
    return r;
}

} // namespace detail

/// The truncated germ as exact polynomials when it solves x' = xi(x) exactly
/// (the trajectory is then polynomial in z), otherwise nullopt.
inline std::optional<std::vector<UPoly>> exact_polynomial_trajectory(const TrajectoryGerm& g)
{
    std::vector<UPoly> S;
    for (const auto& s : g.coords)
        S.emplace_back(s.coeffs());
    for (std::size_t i = 0; i < S.size(); ++i)
        if (!(detail::compose_upoly(g.field[i], S) == S[i].derivative()))
            return std::nullopt;
    return S;
}

/// Phi = (P1 o phi, P2 o phi) on the closed unit disc.
class PlanarMap {
public:
    PlanarMap(const ParametrizedTrajectory& traj, Polynomial P1, Polynomial P2)
        : f1_(traj, std::move(P1)), f2_(traj, std::move(P2))
    {}

    const DiscFunction& first() const { return f1_; }
    const DiscFunction& second() const { return f2_; }
    const ParametrizedTrajectory& trajectory() const { return f1_.trajectory(); }

private:
    DiscFunction f1_;
    DiscFunction f2_;
};

struct CensusMember {
    ComplexBall z;            // enclosure of one preimage in the closed unit disc
    Rational x;
    Rational y;
    Integer height;
};

/// A candidate whose rationality could not be decided.
struct UndecidedPoint {
    ComplexBall z;
    int coordinate = -1;              // coordinate solved for; -1 for an unresolved cell
    Rational value;                   // its rational value
    std::vector<Rational> candidates; // possible rational values of the other coordinate (empty: unknown)
    std::string reason;
};

struct PointCensus {
    long H = 1;
    std::vector<CensusMember> members;
    std::vector<UndecidedPoint> undecided;
    std::size_t cells = 0;       // leaf cells of the subdivision
    std::size_t candidates = 0;  // (cell, x) pairs examined
    std::size_t excluded = 0;    // roots certified not to give a point of height <= H
    mpfr_prec_t precision = 128;

    std::vector<std::pair<Rational, Rational>> points() const
    {
        std::vector<std::pair<Rational, Rational>> out;
        for (const auto& m : members)
            out.emplace_back(m.x, m.y);
        return out;
    }

    /// The census at a smaller height bound: certified members and exclusions
    /// at H remain valid for every H' <= H.
    PointCensus restricted(long h) const
    {
        if (h > H)
            throw DomainError("cannot restrict a census to a larger height");
        PointCensus r = *this;
        r.H = h;
        r.members.clear();
        r.undecided.clear();
        for (const auto& m : members)
            if (m.height <= h)
                r.members.push_back(m);
        for (const auto& u : undecided) {
            if (u.candidates.empty()) {
                r.undecided.push_back(u);
                continue;
            }
            if (height_of(u.value) > h)
                continue;
            UndecidedPoint v = u;
            v.candidates.clear();
            for (const auto& c : u.candidates)
                if (height_of(c) <= h)
                    v.candidates.push_back(c);
            if (!v.candidates.empty())
                r.undecided.push_back(std::move(v));
        }
        return r;
    }
};

struct CensusOptions {
    mpfr_prec_t precision = 128;
    mpfr_prec_t max_precision = 512;
    unsigned threads = 1;
    unsigned grid = 15;          // initial cells per side of [-1, 1]^2; odd keeps the real axis off cell edges
    double min_cell = 1.0 / 4096;
};

namespace detail {

struct CensusCell {
    double x0, y0, side;
    std::complex<double> center() const { return {x0 + side / 2, y0 + side / 2}; }
    double half_diagonal() const { return side / std::numbers::sqrt2; }
};

/// Leaf cell on which the primary coordinate of Phi is injective, with the
/// enclosures reused for every candidate value.
struct LeafData {
    CensusCell cell;
    int primary;          // coordinate solved for; the other one is tested
    std::complex<double> center;
    double radius;        // working ball, strictly containing the square
    ComplexBall dp;       // primary derivative over the working ball
    ComplexBall ds;       // secondary derivative over the working ball
    ComplexBall Y;        // approximate inverse of the primary derivative
    double contraction;   // sup |1 - Y dp| over the working ball
    double lo, hi;        // real range of the primary coordinate over the square
};

enum class Verdict { Member, Out, Undecided };

struct RootRecord {
    int primary = 0;
    Rational v;                    // value of the primary coordinate
    ComplexBall z;
    Verdict verdict = Verdict::Out;
    Rational x, y;                 // members only
    std::vector<Rational> candidates;
    std::string reason;
    std::size_t leaf = 0;
};

struct LeafResult {
    std::vector<RootRecord> records;
    std::size_t candidates = 0;
    std::size_t excluded = 0;
};

class CensusRunner {
public:
    CensusRunner(const PlanarMap& phi, long H, const CensusOptions& opt)
        : phi_(phi), H_(H), opt_(opt), prec_(opt.precision), exact_(exact_polynomial_trajectory(phi.trajectory().germ()))
    {
        const auto& traj = phi.trajectory();
        const auto& base = traj.germ().base;
        for (int i = 0; i < 2; ++i) {
            const Polynomial& P = coord(i).poly();
            deriv_.emplace_back(traj, lie_derivative(traj.germ().field, P));
            fast_.emplace_back(traj.germ(), P);
            fast_deriv_.emplace_back(traj.germ(), deriv_.back().poly());
            at_base_[i] = P.evaluate(base);
            if (exact_)
                exact_coord_[i] = compose_upoly(P, *exact_);
        }
    }

    PointCensus run()
    {
        PointCensus out;
        out.H = H_;
        out.precision = prec_;
        std::vector<LeafData> leaves;
        std::vector<UndecidedPoint> unresolved;
        double side = 2.0 / opt_.grid;
        for (unsigned i = 0; i < opt_.grid; ++i)
            for (unsigned j = 0; j < opt_.grid; ++j)
                subdivide({-1 + side * i, -1 + side * j, side}, leaves, unresolved);
        out.cells = leaves.size();
        auto results = parallel_map(leaves.size(), opt_.threads, [&](std::size_t k) {
            LeafResult r = process(leaves[k]);
            for (auto& rec : r.records)
                rec.leaf = k;
            return r;
        });
        std::vector<RootRecord> records;
        for (auto& r : results) {
            out.candidates += r.candidates;
            out.excluded += r.excluded;
            for (auto& rec : r.records)
                records.push_back(std::move(rec));
        }
        merge(records, leaves, out);
        for (auto& u : unresolved)
            out.undecided.push_back(std::move(u));
        return out;
    }

private:
    const DiscFunction& coord(int i) const { return i == 0 ? phi_.first() : phi_.second(); }

    ComplexBall ball(std::complex<double> c, double r) const
    {
        return ComplexBall::from_double(c.real(), c.imag(), prec_, r);
    }

    static double up(double x) { return ztraj::detail::up(x); }

    /// Whether any rational of height <= H lies in the real trace of the ball.
    bool admits_rational(const ComplexBall& b) const
    {
        if (!meets_real_axis(b))
            return false;
        auto [lo, hi] = real_interval(b);
        if (hi - lo >= 1)
            return std::max(lo, -static_cast<double>(H_)) <= std::min(hi, static_cast<double>(H_));
        return !rationals_in(lo, hi, H_).empty();
    }

    void subdivide(const CensusCell& c, std::vector<LeafData>& leaves, std::vector<UndecidedPoint>& unresolved)
    {
        auto ctr = c.center();
        double dx = std::max(0.0, std::fabs(ctr.real()) - c.side / 2);
        double dy = std::max(0.0, std::fabs(ctr.imag()) - c.side / 2);
        if (std::hypot(dx, dy) > 1 + 1e-12)
            return;
        double radius = 1.25 * c.half_diagonal();
        auto split = [&](const char* why) {
            if (c.side / 2 < opt_.min_cell) {
                unresolved.push_back({ball(ctr, radius), -1, Rational(0), {}, why});
                return;
            }
            double h = c.side / 2;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    subdivide({c.x0 + a * h, c.y0 + b * h, h}, leaves, unresolved);
        };
        if (std::abs(ctr) + radius > phi_.trajectory().radius()) {
            split("cell leaves the certified disc");
            return;
        }
        ComplexBall B = ball(ctr, radius);
        std::array<ComplexBall, 2> e{coord(0)(B), coord(1)(B)};
        if (!admits_rational(e[0]) || !admits_rational(e[1]))
            return;
        std::array<ComplexBall, 2> d{deriv_[0](B), deriv_[1](B)};
        ComplexBall one = ComplexBall::exact(GaussianRational(1), prec_);
        for (int p = 0; p < 2; ++p) {
            if (d[p].contains_zero())
                continue;
            auto m = d[p].mid();
            std::complex<double> inv = 1.0 / m;
            ComplexBall Y = ComplexBall::from_double(inv.real(), inv.imag(), prec_);
            double q = (one - Y * d[p]).abs_upper();
            if (!(q <= 0.5))
                continue;
            // primary coordinate over the square: value at the centre plus
            // the derivative times the offsets, whose real parts span
            // (|Re m| + |Im m|) side / 2
            ComplexBall center = ball(ctr, 0);
            ComplexBall fp = coord(p)(center);
            ComplexBall fs = coord(1 - p)(center);
            double hd = c.half_diagonal();
            double spread = up(up((std::fabs(m.real()) + std::fabs(m.imag())) * c.side / 2 * (1 + 1e-12)) +
                               up(d[p].rad() * hd));
            if (!meets_real_axis(fp.inflated(up(spread * std::numbers::sqrt2))) ||
                !admits_rational(fs.inflated(up(d[1 - p].abs_upper() * hd))))
                return;
            double lo = mpfr_get_d(fp.re().get(), MPFR_RNDD) - fp.rad() - spread;
            double hi = mpfr_get_d(fp.re().get(), MPFR_RNDU) + fp.rad() + spread;
            leaves.push_back({c, p, ctr, radius, d[p], d[1 - p], Y, q, lo, hi});
            return;
        }
        split("both coordinates critical in the cell");
    }

    struct Step {
        ComplexBall K;
        bool inside;
        bool disjoint;
        ComplexBall z0;
        ComplexBall fs; // secondary coordinate at z0
    };

    /// Krawczyk test of (primary coordinate - v) on the ball D(z0, rho).
    Step krawczyk(const LeafData& L, const ComplexBall& z0, double rho, const ComplexBall& v,
                  const ParametrizedTrajectory& traj) const
    {
        auto pt = traj.evaluate(z0);
        mpfr_prec_t p = traj.precision();
        std::span<const ComplexBall> at(pt);
        ComplexBall g = evaluate(coord(L.primary).poly(), at, p) - v;
        ComplexBall fs = evaluate(coord(1 - L.primary).poly(), at, p);
        ComplexBall diff = -(L.Y * g);
        double spread = up(L.contraction * rho);
        bool inside = up(diff.abs_upper() + spread) < rho;
        bool disjoint = diff.abs_lower() > up(spread + rho);
        return {(z0 + diff).inflated(spread), inside, disjoint, z0, fs};
    }

    bool within_leaf(const LeafData& L, std::complex<double> z, double rho) const
    {
        return std::abs(z - L.center) * (1 + 1e-12) + rho < L.radius;
    }

    /// Unique root of (primary coordinate = v) in the leaf's working ball, or
    /// nullopt when there is none. Throws CertificationError when isolation fails.
    std::optional<Step> isolate(const LeafData& L, const Rational& v) const
    {
        const auto& traj = phi_.trajectory();
        const auto& f = fast_[L.primary];
        const auto& df = fast_deriv_[L.primary];
        ComplexBall vb = ComplexBall::exact(GaussianRational(v), prec_);
        double vd = v.get_d();
        std::complex<double> z = L.center;
        double last = INFINITY;
        bool converged = false;
        for (int it = 0; it < 40; ++it) {
            std::complex<double> dz = df(z);
            if (dz == 0.0)
                break;
            std::complex<double> s = (f(z) - vd) / dz;
            z -= s;
            last = std::abs(s);
            if (!(std::abs(z - L.center) < 2 * L.radius))
                break;
            if (last <= 4e-16 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (converged) {
            double rho = std::max(64 * last, 1e-14 * std::max(1.0, std::abs(z)));
            for (int attempt = 0; attempt < 3 && within_leaf(L, z, rho); ++attempt, rho *= 16) {
                Step s = krawczyk(L, ball(z, 0), rho, vb, traj);
                if (s.inside)
                    return s;
            }
        }
        std::optional<Step> found;
        search(L, vb, L.cell, 0, found);
        return found;
    }

    /// Tightens an isolating Krawczyk step by iterating from its centre.
    Step tighten(const LeafData& L, Step s, const ComplexBall& v) const
    {
        for (int it = 0; it < 100 && s.K.rad() > 1e-13 * std::max(1.0, std::abs(s.K.mid())); ++it) {
            std::complex<double> c = s.K.mid();
            double rho = s.K.rad() * (1 + 1e-9) + 4 * std::numeric_limits<double>::epsilon() * std::abs(c);
            if (!within_leaf(L, c, rho))
                break;
            Step t = krawczyk(L, ball(c, 0), rho, v, phi_.trajectory());
            if (!t.inside || !(t.K.rad() < 0.95 * s.K.rad()))
                break;
            s = std::move(t);
        }
        return s;
    }

    /// Bisection of the leaf square: every sub-square either excludes the
    /// root or isolates it. At most one root exists in the leaf.
    void search(const LeafData& L, const ComplexBall& v, const CensusCell& sq, int depth,
                std::optional<Step>& found) const
    {
        std::complex<double> c = sq.center();
        double rho = sq.half_diagonal() * (1 + 1e-9);
        Step s = krawczyk(L, ball(c, 0), rho, v, phi_.trajectory());
        if (s.disjoint)
            return;
        if (s.inside) {
            if (!found)
                found = tighten(L, std::move(s), v);
            return;
        }
        if (depth >= 12)
            throw CertificationError("root isolation failed");
        double h = sq.side / 2;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                search(L, v, {sq.x0 + a * h, sq.y0 + b * h, h}, depth + 1, found);
    }

    /// Enclosure of the secondary coordinate over the root enclosure of a step.
    ComplexBall secondary_value(const LeafData& L, const Step& s) const
    {
        double rho = (s.K - s.z0).abs_upper();
        return s.fs.inflated(up(L.ds.abs_upper() * rho));
    }

    std::vector<Rational> candidates_in(const ComplexBall& e) const
    {
        if (!meets_real_axis(e))
            return {};
        auto [lo, hi] = real_interval(e);
        return rationals_in(lo, hi, H_);
    }

    /// Exact root and secondary value when the root is provably an exact
    /// point: the trajectory base point, or a Gaussian rational point of a
    /// polynomial trajectory.
    std::optional<std::pair<GaussianRational, GaussianRational>> exact_point(const LeafData& L, const ComplexBall& Z,
                                                                             const Rational& v) const
    {
        int p = L.primary;
        GaussianRational gv(v);
        if (at_base_[p] == gv && strictly_inside(Z, GaussianRational()))
            return std::make_pair(GaussianRational(), at_base_[1 - p]);
        if (exact_) {
            GaussianRational z = simplest_in(Z);
            if (strictly_inside(Z, z) && exact_coord_[p].evaluate(z) == gv)
                return std::make_pair(z, exact_coord_[1 - p].evaluate(z));
        }
        return std::nullopt;
    }

    /// Newton refinement of a root enclosure at a higher precision; returns
    /// the new enclosure and the secondary value over it.
    std::optional<std::pair<ComplexBall, ComplexBall>> refine(const LeafData& L, const ComplexBall& Z,
                                                              const Rational& v, mpfr_prec_t prec) const
    {
        auto traj = phi_.trajectory().with_precision(prec);
        DiscFunction f(traj, coord(L.primary).poly());
        DiscFunction df(traj, deriv_[L.primary].poly());
        ComplexBall vb = ComplexBall::exact(GaussianRational(v), prec);
        auto point = [prec](const ComplexBall& b) {
            BigFloat re(prec), im(prec);
            mpfr_set(re.get(), b.re().get(), MPFR_RNDN);
            mpfr_set(im.get(), b.im().get(), MPFR_RNDN);
            return ComplexBall::from_parts(std::move(re), std::move(im), 0);
        };
        ComplexBall z = point(Z);
        for (int it = 0; it < 8; ++it)
            z = point(z - (f(z) - vb) / df(z));
        double rho = std::max(std::ldexp(1.0, -static_cast<int>(prec) / 2), 4 * traj.tail_bound());
        for (int attempt = 0; attempt < 4 && within_leaf(L, z.mid(), rho); ++attempt, rho *= 64) {
            Step s = krawczyk(L, z, rho, vb, traj);
            if (s.inside)
                return std::make_pair(s.K, secondary_value(L, s));
        }
        return std::nullopt;
    }

    RootRecord decide(const LeafData& L, const Rational& v, const ComplexBall& Z, std::vector<Rational> cands) const
    {
        RootRecord rec;
        rec.primary = L.primary;
        rec.v = v;
        rec.z = Z;
        if (auto ex = exact_point(L, Z, v)) {
            const auto& [z, w] = *ex;
            if (z.norm() > 1 || !w.is_real() || height_of(w.re()) > H_)
                return rec;
            rec.verdict = Verdict::Member;
            rec.x = L.primary == 0 ? v : w.re();
            rec.y = L.primary == 0 ? w.re() : v;
            return rec;
        }
        ComplexBall cur = Z;
        for (mpfr_prec_t p = 2 * prec_; p <= opt_.max_precision; p *= 2) {
            auto r = refine(L, cur, v, p);
            if (!r)
                break;
            cur = r->first;
            cands = candidates_in(r->second);
            if (cands.empty())
                return rec;
        }
        rec.verdict = Verdict::Undecided;
        rec.candidates = std::move(cands);
        rec.reason = Z.abs_upper() > 1 ? "root on the unit circle; value not decided"
                                       : "value not decided at the available precision";
        return rec;
    }

    LeafResult process(const LeafData& L) const
    {
        LeafResult out;
        const CensusCell& c = L.cell;
        for (const Rational& v : rationals_in(L.lo, L.hi, H_)) {
            ++out.candidates;
            std::optional<Step> s;
            try {
                s = isolate(L, v);
            } catch (const CertificationError&) {
                RootRecord rec;
                rec.primary = L.primary;
                rec.v = v;
                rec.z = ball(L.center, L.radius);
                rec.verdict = Verdict::Undecided;
                rec.reason = "root isolation failed";
                out.records.push_back(std::move(rec));
                continue;
            }
            if (!s)
                continue;
            const ComplexBall& Z = s->K;
            // the root belongs to the leaves whose closed square meets Z
            auto m = Z.mid();
            double slack = Z.rad() * (1 + 1e-9) + 1e-15;
            if (m.real() < c.x0 - slack || m.real() > c.x0 + c.side + slack || m.imag() < c.y0 - slack ||
                m.imag() > c.y0 + c.side + slack)
                continue;
            if (Z.abs_lower() > 1)
                continue;
            auto cands = candidates_in(secondary_value(L, *s));
            if (cands.empty()) {
                ++out.excluded;
                continue;
            }
            RootRecord rec = decide(L, v, Z, std::move(cands));
            if (rec.verdict == Verdict::Out)
                ++out.excluded;
            else
                out.records.push_back(std::move(rec));
        }
        return out;
    }

    /// Merges records of one root seen from adjacent leaves: same primary
    /// value, overlapping enclosures, both inside a leaf ball where that
    /// coordinate is injective.
    void merge(std::vector<RootRecord>& recs, const std::vector<LeafData>& leaves, PointCensus& out) const
    {
        auto same_root = [&](const RootRecord& a, const RootRecord& b) {
            if (a.primary != b.primary || a.v != b.v)
                return false;
            if (std::abs(a.z.mid() - b.z.mid()) > a.z.rad() + b.z.rad())
                return false;
            for (std::size_t k : {a.leaf, b.leaf}) {
                const auto& L = leaves[k];
                if (L.primary == a.primary && within_leaf(L, a.z.mid(), a.z.rad()) &&
                    within_leaf(L, b.z.mid(), b.z.rad()))
                    return true;
            }
            return false;
        };
        std::stable_sort(recs.begin(), recs.end(), [](const RootRecord& a, const RootRecord& b) {
            if (a.primary != b.primary)
                return a.primary < b.primary;
            if (a.v != b.v)
                return a.v < b.v;
            auto ma = a.z.mid(), mb = b.z.mid();
            if (ma.real() != mb.real())
                return ma.real() < mb.real();
            return ma.imag() < mb.imag();
        });
        std::vector<RootRecord> roots;
        for (auto& r : recs) {
            auto it = std::find_if(roots.begin(), roots.end(), [&](const RootRecord& q) { return same_root(q, r); });
            if (it == roots.end())
                roots.push_back(std::move(r));
            else if (it->verdict != Verdict::Member && r.verdict == Verdict::Member)
                *it = std::move(r);
        }
        for (auto& r : roots) {
            if (r.verdict == Verdict::Undecided) {
                out.undecided.push_back({r.z, r.primary, r.v, std::move(r.candidates), r.reason});
                continue;
            }
            bool seen = std::any_of(out.members.begin(), out.members.end(),
                                    [&](const CensusMember& m) { return m.x == r.x && m.y == r.y; });
            if (seen)
                continue;
            std::array<Rational, 2> v{r.x, r.y};
            out.members.push_back({r.z, r.x, r.y, height_of(std::span<const Rational>(v))});
        }
        std::sort(out.members.begin(), out.members.end(), [](const CensusMember& a, const CensusMember& b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
    }

    const PlanarMap& phi_;
    long H_;
    CensusOptions opt_;
    mpfr_prec_t prec_;
    std::optional<std::vector<UPoly>> exact_;
    std::vector<DiscFunction> deriv_;
    std::vector<FastComposite> fast_;
    std::vector<FastComposite> fast_deriv_;
    std::array<GaussianRational, 2> at_base_;
    std::array<UPoly, 2> exact_coord_;
};

} // namespace detail

/// Rational points of height <= H on Phi(closed unit disc). Members are
/// certified; candidates whose value cannot be decided are listed separately.
inline PointCensus census(const PlanarMap& phi, long H, const CensusOptions& opt = {})
{
    if (H < 1)
        throw DomainError("height bound must be at least 1");
    Series s = phi.first().series();
    bool constant = true;
    for (std::size_t k = 1; k < s.order(); ++k)
        constant = constant && s[k].is_zero();
    if (constant)
        throw DomainError("first coordinate of the planar map is constant");
    if (phi.trajectory().radius() <= 1)
        throw DomainError("trajectory must be certified beyond the closed unit disc");
    return detail::CensusRunner(phi, H, opt).run();
}

struct CurveDegree {
    unsigned degree = 0;
    Polynomial curve; // in (x, y), vanishing on every point
};

/// Evaluation matrix of the monomials of degree <= d in (x, y) at the points.
inline Matrix curve_evaluation_matrix(std::span<const std::pair<Rational, Rational>> S, unsigned d)
{
    auto mons = monomials_up_to(2, d);
    Matrix m(S.size(), mons.size());
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = 0; j < mons.size(); ++j) {
            Rational v(1);
            for (unsigned k = 0; k < mons[j][0]; ++k)
                v *= S[i].first;
            for (unsigned k = 0; k < mons[j][1]; ++k)
                v *= S[i].second;
            m(i, j) = GaussianRational(v);
        }
    return m;
}

/// w(S): the smallest degree of a plane curve through every point of S,
/// with one such curve.
inline CurveDegree minimal_curve_degree(std::span<const std::pair<Rational, Rational>> S)
{
    if (S.empty())
        throw DomainError("minimal curve degree of an empty set");
    for (unsigned d = 1;; ++d) {
        auto ker = kernel(curve_evaluation_matrix(S, d));
        if (ker.empty())
            continue;
        auto mons = monomials_up_to(2, d);
        Polynomial f(2);
        for (std::size_t j = 0; j < mons.size(); ++j)
            f.add_term(mons[j], ker.front()[j]);
        return {d, f};
    }
}

inline CurveDegree minimal_curve_degree(const std::vector<std::pair<Rational, Rational>>& S)
{
    return minimal_curve_degree(std::span<const std::pair<Rational, Rational>>(S));
}

struct MasserRow {
    long H = 0;
    std::size_t members = 0;
    std::size_t undecided = 0;
    unsigned w = 0;       // 0 for an empty member set
    double ratio = 0;     // w / log H
};

struct MasserTable {
    std::vector<MasserRow> rows;
    double fitted_c = 0;  // max w / log H over H >= 2
};

/// w(Phi(Z)) against log H over the sweep. One census at the largest H is
/// restricted to each smaller bound.
inline MasserTable masser_check(const PlanarMap& phi, std::vector<long> sweep, const CensusOptions& opt = {})
{
    MasserTable t;
    if (sweep.empty())
        return t;
    std::sort(sweep.begin(), sweep.end());
    PointCensus full = census(phi, sweep.back(), opt);
    for (long H : sweep) {
        PointCensus c = full.restricted(H);
        MasserRow row{H, c.members.size(), c.undecided.size(), 0, 0};
        if (!c.members.empty())
            row.w = minimal_curve_degree(c.points()).degree;
        if (H >= 2) {
            row.ratio = row.w / std::log(static_cast<double>(H));
            t.fitted_c = std::max(t.fitted_c, row.ratio);
        }
        t.rows.push_back(row);
    }
    return t;
}

struct CurveContainment {
    bool contained = false;           // an algebraic relation was found on the Taylor data
    std::optional<unsigned> degree;
    Polynomial relation{2};
    unsigned cutoff = 0;
    std::size_t taylor_order = 0;
};

/// Looks for Q of degree <= cutoff with Q(Phi_1, Phi_2) = 0 on the known
/// Taylor coefficients. Absence of such Q proves that the image lies on no
/// curve of degree <= cutoff; a relation found on truncated data is only
/// evidence of containment.
inline CurveContainment curve_containment_check(const PlanarMap& phi, unsigned cutoff = 8)
{
    Series a = phi.first().series(), b = phi.second().series();
    std::size_t N = std::min(a.order(), b.order());
    CurveContainment out;
    out.cutoff = cutoff;
    out.taylor_order = N;
    for (unsigned d = 1; d <= cutoff; ++d) {
        auto mons = monomials_up_to(2, d);
        if (mons.size() >= N)
            throw DomainError("trajectory truncation too short for the requested degree cutoff");
        Matrix m(N, mons.size());
        for (std::size_t j = 0; j < mons.size(); ++j) {
            Series s = a.truncated(N).pow(mons[j][0]) * b.truncated(N).pow(mons[j][1]);
            for (std::size_t k = 0; k < N && k < s.order(); ++k)
                m(k, j) = s[k];
        }
        auto ker = kernel(m);
        if (!ker.empty()) {
            out.contained = true;
            out.degree = d;
            Polynomial f(2);
            for (std::size_t j = 0; j < mons.size(); ++j)
                f.add_term(mons[j], ker.front()[j]);
            out.relation = f;
            return out;
        }
    }
    return out;
}

/// Number of discs of radius s in the hexagonal covering of the closed unit
/// disc (centres on the triangular lattice of spacing sqrt(3) s that lie
/// within 1 + s of the origin).
inline std::size_t hexagonal_cover_count(double s)
{
    if (!(s > 0))
        throw DomainError("covering radius must be positive");
    double a = std::sqrt(3.0) * s;
    long K = static_cast<long>(std::ceil((1 + s) / a * 2)) + 2;
    std::size_t n = 0;
    for (long i = -K; i <= K; ++i)
        for (long j = -K; j <= K; ++j) {
            double x = a * (i + 0.5 * j), y = a * (std::sqrt(3.0) / 2) * j;
            if (std::hypot(x, y) <= 1 + s)
                ++n;
        }
    return n;
}

struct DensityRow {
    long H = 0;
    std::size_t count = 0;      // certified members of height <= H
    std::size_t undecided = 0;
    double envelope = 0;        // log^(2 kappa (m+1)) H * log log H
    double ratio = 0;           // count / envelope
    bool holds = false;         // count <= c * envelope
};

struct DensityTable {
    CurveContainment precondition;
    bool precondition_ok = false;
    std::size_t kappa = 0;
    std::size_t m = 0;
    double c = 1;
    double fitted_c = 0;
    std::size_t cover_discs = 0; // hexagonal covering of the unit disc by discs of radius (r - 1) / 2
    std::vector<DensityRow> rows;
};

/// N(Im Phi, H) against the polylogarithmic envelope with constant c.
/// The precondition (image not inside a curve) is verified up to the degree
/// cutoff only; when it fails no rows are produced.
inline DensityTable density_check(const PlanarMap& phi, std::vector<long> sweep, std::size_t kappa, std::size_t m,
                                  double c = 1, unsigned cutoff = 8, const CensusOptions& opt = {})
{
    DensityTable t;
    t.kappa = kappa;
    t.m = m;
    t.c = c;
    t.precondition = curve_containment_check(phi, cutoff);
    t.precondition_ok = !t.precondition.contained;
    t.cover_discs = hexagonal_cover_count((phi.trajectory().radius() - 1) / 2);
    if (!t.precondition_ok || sweep.empty())
        return t;
    std::sort(sweep.begin(), sweep.end());
    PointCensus full = census(phi, sweep.back(), opt);
    double expo = 2.0 * static_cast<double>(kappa) * (static_cast<double>(m) + 1);
    for (long H : sweep) {
        PointCensus cz = full.restricted(H);
        DensityRow row{H, cz.members.size(), cz.undecided.size(), 0, 0, false};
        double L = std::log(static_cast<double>(H));
        row.envelope = H >= 3 ? std::pow(L, expo) * std::log(L) : 0.0;
        row.holds = static_cast<double>(row.count) <= c * row.envelope;
        if (row.envelope > 0) {
            row.ratio = static_cast<double>(row.count) / row.envelope;
            t.fitted_c = std::max(t.fitted_c, row.ratio);
        }
        t.rows.push_back(row);
    }
    return t;
}

} // namespace ztraj
