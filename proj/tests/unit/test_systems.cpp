#include <gtest/gtest.h>

#include "support/random.hpp"
#include "ztraj/systems/darboux.hpp"
#include "ztraj/systems/linear.hpp"
#include "ztraj/systems/schwarzian.hpp"

using namespace ztraj;
using namespace ztraj::testing;

namespace {

const VariableNames xy{"x", "y"};
Polynomial XY(const char* s) { return parse_polynomial(s, xy); }
GaussianRational Q(long a, long b = 1) { return GaussianRational(make_rational(a, b)); }
RationalFunction RF(const char* s) { return parse_rational_function(s); }

/// Pole order of a reduced rational function at a, by repeated exact division.
unsigned pole_order(const RationalFunction& r, const GaussianRational& a)
{
    UPoly d = r.den(), lin({-a, GaussianRational(1)});
    unsigned k = 0;
    for (;;) {
        auto [q, rem] = d.divmod(lin);
        if (!rem.is_zero())
            return k;
        d = q;
        ++k;
    }
}

Series random_series(Rng& rng, std::size_t n, bool vanish_at_zero)
{
    std::vector<GaussianRational> c;
    for (std::size_t k = 0; k < n; ++k)
        c.push_back(random_gaussian(rng, 5, 4));
    if (vanish_at_zero)
        c[0] = GaussianRational();
    while (c[1].is_zero())
        c[1] = random_gaussian(rng, 5, 4);
    return Series(c);
}

void expect_zero_prefix(const Series& s, std::size_t n)
{
    ASSERT_GE(s.order(), n);
    for (std::size_t k = 0; k < n; ++k)
        EXPECT_TRUE(s[k].is_zero()) << "coefficient " << k << " = " << s[k];
}

/// Expansion of r(t0 + tau) - r(t0) in tau.
Series increment(const RationalFunction& r, const GaussianRational& t0, std::size_t n)
{
    Series s = Series::from_upoly(r.num().shifted(t0), n) / Series::from_upoly(r.den().shifted(t0), n);
    return s - Series::constant(s[0], n);
}

} // namespace

TEST(LinearSystem, SimplePole)
{
    auto out = linear_system_field(RationalMatrixODE::parse({{"1/t"}}));
    EXPECT_EQ(out.q, parse_upoly("t^2"));
    ASSERT_EQ(out.poles.size(), 1u);
    EXPECT_EQ(out.poles[0].exponent, 2u);
    EXPECT_EQ(out.xi, VectorField::parse({"t", "y"}, {"t^2", "t*y"}));
}

TEST(LinearSystem, PolynomialMatrixNeedsNoClearing)
{
    auto out = linear_system_field(RationalMatrixODE::parse({{"t", "1"}, {"0", "t^2"}}));
    EXPECT_EQ(out.q, parse_upoly("1"));
    EXPECT_TRUE(out.poles.empty());
    EXPECT_EQ(out.xi, VectorField::parse({"t", "y1", "y2"}, {"1", "t*y1 + y2", "t^2*y2"}));
}

TEST(LinearSystem, DoublePoleGivesExponentThree)
{
    auto ode = RationalMatrixODE::parse({{"0", "1"}, {"-1/t^2", "0"}});
    auto out = linear_system_field(ode);
    unsigned oracle = 0;
    for (const auto& row : ode.A)
        for (const auto& e : row)
            oracle = std::max(oracle, pole_order(e, GaussianRational()));
    EXPECT_EQ(oracle + 1, 3u);
    EXPECT_EQ(out.q, parse_upoly("t^3"));
    EXPECT_EQ(out.xi, VectorField::parse({"t", "y1", "y2"}, {"t^3", "t^3*y2", "-t*y1"}));
}

TEST(LinearSystem, GaussianPolesAcceptedOthersRejected)
{
    auto out = linear_system_field(RationalMatrixODE::parse({{"1/(t^2 + 1)"}}));
    EXPECT_EQ(out.q, parse_upoly("(t^2 + 1)^2"));
    EXPECT_THROW(linear_system_field(RationalMatrixODE::parse({{"1/(t^2 - 2)"}})), UnsupportedInput);
    EXPECT_THROW(RationalMatrixODE::parse({{"1", "t"}}), DimensionError);
}

TEST(LinearSystem, SolutionGraphIsATrajectory)
{
    // y' = y / t has solutions y = c t
    auto out = linear_system_field(RationalMatrixODE::parse({{"1/t"}}));
    auto coords = time_parametrized(trajectory_series(out.xi, {Q(1), Q(3)}, 12));
    auto expected = Series::from_upoly(parse_upoly("3 + 3*t"), coords[1].order());
    EXPECT_EQ(coords[1], expected);
}

TEST(LinearSystem, RandomMatricesHaveMinimalQAndPolarSingularLocus)
{
    Rng rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        std::vector<GaussianRational> pts;
        for (int k = 0; k < 2; ++k)
            pts.push_back(random_gaussian(rng, 3, 2));
        RationalMatrixODE ode;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<RationalFunction> row;
            for (std::size_t j = 0; j < n; ++j) {
                UPoly num = UPoly({random_gaussian(rng, 4, 1), random_gaussian(rng, 4, 1)});
                UPoly den = UPoly::constant(GaussianRational(1));
                for (const auto& a : pts)
                    den = den * UPoly({-a, GaussianRational(1)}).pow(static_cast<unsigned>(rng.uniform(0, 2)));
                row.push_back(num.is_zero() ? RationalFunction() : RationalFunction(num, den));
            }
            ode.A.push_back(row);
        }
        auto out = linear_system_field(ode);
        // oracle: exponent 1 + max pole order at every point that is a pole of some entry
        UPoly expected = UPoly::constant(GaussianRational(1));
        for (const auto& a : pts) {
            unsigned k = 0;
            for (const auto& row : ode.A)
                for (const auto& e : row)
                    k = std::max(k, pole_order(e, a));
            if (k > 0 && std::none_of(pts.begin(), pts.begin() + (&a - pts.data()), [&](const GaussianRational& b) { return b == a; }))
                expected = expected * UPoly({-a, GaussianRational(1)}).pow(k + 1);
        }
        EXPECT_EQ(out.q, expected);
        for (const auto& pole : out.poles) {
            std::vector<GaussianRational> p{pole.point};
            for (std::size_t j = 0; j < n; ++j)
                p.push_back(random_gaussian(rng, 5, 3));
            EXPECT_TRUE(out.xi.is_singular(p));
            // one factor fewer breaks the vanishing or the polynomiality
            UPoly smaller = out.q.divmod(UPoly({-pole.point, GaussianRational(1)})).first;
            bool still_ok = true;
            for (const auto& row : ode.A)
                for (const auto& e : row) {
                    auto [quo, rem] = (smaller * e.num()).divmod(e.den());
                    still_ok = still_ok && rem.is_zero() && quo.evaluate(pole.point).is_zero();
                }
            EXPECT_FALSE(still_ok);
        }
        std::vector<GaussianRational> off{Q(101, 7)};
        for (std::size_t j = 0; j < n; ++j)
            off.push_back(GaussianRational(0));
        EXPECT_FALSE(out.xi[0].evaluate(off).is_zero());
    }
}

TEST(Darboux, ScalingField)
{
    auto xi = VectorField::parse(xy, {"x", "y"});
    auto res = darboux_curves(xi, 1);
    EXPECT_FALSE(res.partial);
    ASSERT_EQ(res.curves.size(), 2u);
    EXPECT_EQ(res.curves[0].f, XY("x"));
    EXPECT_EQ(res.curves[1].f, XY("y"));
    for (const auto& c : res.curves)
        EXPECT_EQ(c.K, XY("1"));
    auto R = first_integral_from_curves(xi, res.curves);
    ASSERT_TRUE(R);
    EXPECT_EQ(R->exponents, (std::vector<long>{1, -1}));
    EXPECT_EQ(R->num, XY("x"));
    EXPECT_EQ(R->den, XY("y"));
    // xi(x/y) = (xi x * y - x * xi y) / y^2
    EXPECT_TRUE((lie_derivative(xi, XY("x")) * XY("y") - XY("x") * lie_derivative(xi, XY("y"))).is_zero());
}

TEST(Darboux, RotationField)
{
    auto xi = VectorField::parse(xy, {"-y", "x"});
    auto res = darboux_curves(xi, 2);
    EXPECT_FALSE(res.partial);
    bool circle = false;
    for (const auto& c : res.curves) {
        EXPECT_EQ(lie_derivative(xi, c.f), c.K * c.f);
        circle = circle || (c.f == XY("x^2 + y^2") && c.K.is_zero());
    }
    EXPECT_TRUE(circle);
    // the complex invariant lines x +- i y
    std::size_t lines = 0;
    for (const auto& c : res.curves)
        lines += c.f.degree() == 1;
    EXPECT_EQ(lines, 2u);
    auto R = first_integral_from_curves(xi, res.curves);
    ASSERT_TRUE(R);
    EXPECT_EQ(R->num, XY("x^2 + y^2"));
}

TEST(Darboux, LotkaVolterraAxes)
{
    auto xi = VectorField::parse(xy, {"x - x*y", "x*y - y"});
    auto res = darboux_curves(xi, 2);
    bool x = false, y = false;
    for (const auto& c : res.curves) {
        EXPECT_EQ(lie_derivative(xi, c.f), c.K * c.f);
        x = x || c.f == XY("x");
        y = y || c.f == XY("y");
    }
    EXPECT_TRUE(x);
    EXPECT_TRUE(y);
}

TEST(Darboux, PlantedLineIsFound)
{
    Rng rng(67);
    int found = 0;
    for (int trial = 0; trial < 15; ++trial) {
        // x is invariant with cofactor L
        Polynomial L = random_nonzero_polynomial(rng, 2, 1, 4);
        Polynomial P = XY("x") * L;
        Polynomial Qc = random_nonzero_polynomial(rng, 2, 2, 4);
        VectorField xi(xy, {P, Qc});
        auto res = darboux_curves(xi, 2);
        for (const auto& c : res.curves)
            EXPECT_EQ(lie_derivative(xi, c.f), c.K * c.f);
        bool hit = false;
        for (const auto& c : res.curves)
            hit = hit || (c.f == XY("x") && c.K == L);
        if (!res.partial)
            EXPECT_TRUE(hit) << to_string(P, xy) << " , " << to_string(Qc, xy);
        found += hit;
    }
    EXPECT_GT(found, 10);
}

TEST(Darboux, RandomQuadraticFieldsSatisfyTheIdentity)
{
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        VectorField xi(xy, {random_nonzero_polynomial(rng, 2, 2, 5), random_nonzero_polynomial(rng, 2, 2, 5)});
        auto res = darboux_curves(xi, 2, {.threads = 2});
        for (const auto& c : res.curves) {
            EXPECT_FALSE(c.f.is_constant());
            EXPECT_LE(c.K.degree(), xi.delta() - 1);
            EXPECT_EQ(lie_derivative(xi, c.f) - c.K * c.f, Polynomial(2));
        }
    }
}

TEST(Darboux, CapsAndThreshold)
{
    EXPECT_EQ(jouanolou_threshold(1), 3u);
    EXPECT_EQ(jouanolou_threshold(2), 5u);
    EXPECT_EQ(jouanolou_threshold(3), 8u);
    auto res = darboux_curves(VectorField::parse(xy, {"x", "y"}), 5);
    EXPECT_TRUE(res.partial);
    auto cubic = darboux_curves(VectorField::parse(xy, {"x^4", "y"}), 1);
    EXPECT_TRUE(cubic.partial);
    EXPECT_THROW(darboux_curves(VectorField::parse({"x", "y", "z"}, {"x", "y", "z"}), 1), DimensionError);
}

TEST(Darboux, NoFirstIntegralWithoutRelation)
{
    // x' = x, y' = 2 y + ... has cofactors 1 and 2 on x and y: x^2 / y
    auto xi = VectorField::parse(xy, {"x", "2*y"});
    auto res = darboux_curves(xi, 1);
    auto R = first_integral_from_curves(xi, res.curves);
    ASSERT_TRUE(R);
    EXPECT_EQ(R->num, XY("x^2"));
    EXPECT_EQ(R->den, XY("y"));
    // a single curve with nonzero cofactor gives nothing
    EXPECT_FALSE(first_integral_from_curves(xi, {res.curves[0]}));
}

TEST(Schwarzian, IdentityAndExponential)
{
    expect_zero_prefix(schwarzian(Series::variable(12)), 9);
    // f = e^z: f''/f' = 1, so S = -1/2
    std::vector<GaussianRational> e;
    Integer fact = 1;
    for (int k = 0; k < 12; ++k) {
        if (k)
            fact *= k;
        e.push_back(GaussianRational(Rational(Integer(1), fact)));
    }
    Series S = schwarzian(Series(e));
    EXPECT_EQ(S, Series::constant(Q(-1, 2), 9));
    EXPECT_THROW(schwarzian(Series::constant(Q(1), 10)), DomainError);
}

TEST(Schwarzian, MobiusMapsVanish)
{
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        GaussianRational a = random_gaussian(rng, 5, 3), b = random_gaussian(rng, 5, 3), c = random_gaussian(rng, 5, 3),
                         d = random_gaussian(rng, 5, 3);
        if (d.is_zero() || (a * d - b * c).is_zero())
            continue;
        Series f = Series::from_upoly(UPoly({b, a}), 18) / Series::from_upoly(UPoly({d, c}), 18);
        expect_zero_prefix(schwarzian(f), 15);
    }
}

TEST(Schwarzian, ChainRule)
{
    Rng rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        Series f = random_series(rng, 20, false), g = random_series(rng, 20, true);
        Series lhs = schwarzian(f.compose(g));
        Series dg = g.derivative();
        Series rhs = dg * dg * schwarzian(f).compose(g) + schwarzian(g);
        for (std::size_t k = 0; k < 15; ++k)
            EXPECT_EQ(lhs[k], rhs[k]) << "trial " << trial << " coefficient " << k;
    }
}

TEST(Chi, Preconditions)
{
    EXPECT_THROW(chi(Series::from_upoly(parse_upoly("t"), 8)), DomainError);
    EXPECT_THROW(chi(Series::from_upoly(parse_upoly("1728 + t"), 8)), DomainError);
    EXPECT_NO_THROW(chi(Series::from_upoly(parse_upoly("2 + t"), 8)));
}

TEST(JFunction, SingularLocusIsQ)
{
    auto xi = jfunction_field();
    VariableNames v{"t", "y", "yp", "ypp"};
    for (const char* factor : {"y", "y - 1728", "yp"})
        for (const auto& c : xi.components())
            EXPECT_NO_THROW(c.divide_exact(parse_polynomial(factor, v))) << factor;
    EXPECT_EQ(xi[0], parse_polynomial("y^3*(y - 1728)^3*yp^2", v));
}

TEST(JFunction, TrajectorySolvesChi)
{
    auto germ = trajectory_series(jfunction_field(), {Q(0), Q(2), Q(1), Q(0)}, 15);
    // the germ solves the cleared system to its truncation order
    for (std::size_t i = 0; i < 4; ++i) {
        Series lhs = germ.coords[i].derivative();
        Series rhs = compose(germ.field[i], germ).truncated(lhs.order());
        EXPECT_EQ(lhs, rhs);
    }
    expect_zero_prefix(jfunction_chi_residual({Q(0), Q(2), Q(1), Q(0)}, 15), 12);
}

TEST(JFunction, RandomNonsingularInitialData)
{
    Rng rng(83);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<GaussianRational> p{random_gaussian(rng, 3, 2), random_gaussian(rng, 9, 2), random_gaussian(rng, 4, 3),
                                        random_gaussian(rng, 4, 3)};
        if (jfunction_field().is_singular(p) || jfunction_field()[0].evaluate(p).is_zero())
            continue;
        expect_zero_prefix(jfunction_chi_residual(p, 15), 12);
    }
}

TEST(JFunction, OppositeSignOfTheRationalTermFails)
{
    // f''' = R(f) f'^3 + 3 f''^2 / (2 f') is not equivalent to chi(f) = 0
    auto xi = jfunction_field();
    VariableNames v{"t", "y", "yp", "ypp"};
    Polynomial flipped = detail::j_qA(4, 1, 2, 3) +
                         parse_polynomial("(y^2 - 1968*y + 2654208)*y*(y - 1728)*yp^5", v);
    VectorField wrong(v, {xi[0], xi[1], xi[2], flipped});
    auto coords = time_parametrized(trajectory_series(wrong, {Q(0), Q(2), Q(1), Q(0)}, 10));
    Series c = chi(coords[1]);
    bool nonzero = false;
    for (std::size_t k = 0; k < 5; ++k)
        nonzero = nonzero || !c[k].is_zero();
    EXPECT_TRUE(nonzero);
}

TEST(Translates, UnitShiftIsTheJFunctionField)
{
    auto xi = translates_field({RF("t + 1")});
    EXPECT_EQ(xi.components(), jfunction_field().components());
    EXPECT_THROW(translates_field({RF("3")}), DomainError);
    EXPECT_THROW(translates_field({}), DomainError);
}

TEST(Translates, EachCopySolvesChiInItsOwnArgument)
{
    std::vector<RationalFunction> r{RF("2*t"), RF("t^2 + 1"), RF("1/t")};
    auto xi = translates_field(r);
    ASSERT_EQ(xi.dim(), 10u);
    std::vector<GaussianRational> p{Q(1), Q(2), Q(1), Q(0), Q(3), Q(-1), Q(1, 2), Q(5), Q(2), Q(1)};
    ASSERT_FALSE(xi.is_singular(p));
    auto coords = time_parametrized(trajectory_series(xi, p, 14));
    for (std::size_t k = 0; k < r.size(); ++k) {
        Series s = increment(r[k], p[0], coords[0].order());
        Series back = s.reversion(); // tau as a series in s = r_k(t) - r_k(t0)
        Series F = coords[1 + 3 * k].compose(back);
        Series Fp = coords[2 + 3 * k].compose(back);
        Series Fpp = coords[3 + 3 * k].compose(back);
        EXPECT_EQ(F.derivative(), Fp.truncated(F.order() - 1)) << k;
        EXPECT_EQ(Fp.derivative(), Fpp.truncated(Fp.order() - 1)) << k;
        expect_zero_prefix(chi(F), 10);
    }
}

TEST(LinearSystem, ParameterExampleFieldIsTheCorrectedOne)
{
    // y' = (3/t) y: the constructed field is t (t d/dt + 3 y d/dy), and the
    // graph y = t^3 through (1, 1) is invariant
    auto out = linear_system_field(RationalMatrixODE::parse({{"3/t"}}));
    EXPECT_EQ(out.xi, VectorField::parse({"t", "y"}, {"t^2", "3*t*y"}));
    Polynomial F = parse_polynomial("y - t^3", {"t", "y"});
    EXPECT_TRUE(lie_derivative(out.xi, F).divide_exact(F).degree() >= 0);
    auto coords = time_parametrized(trajectory_series(out.xi, {Q(1), Q(1)}, 10));
    EXPECT_EQ(coords[1], Series::from_upoly(parse_upoly("(1 + t)^3"), coords[1].order()));
}
