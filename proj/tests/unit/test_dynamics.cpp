#include <gtest/gtest.h>

#include <cmath>

#include "support/constants.hpp"
#include "support/envelopes.hpp"
#include "support/random.hpp"
#include "ztraj/dynamics/trajectory.hpp"

using namespace ztraj;
using ztraj::testing::random_field;
using ztraj::testing::random_nonzero_polynomial;
using ztraj::testing::random_point;

namespace {

const VariableNames ty{"t", "y"};

VectorField exp_field() { return VectorField::parse(ty, {"1", "y"}); }
std::vector<GaussianRational> exp_base() { return {GaussianRational(0), GaussianRational(1)}; }
Polynomial P(const char* s) { return parse_polynomial(s, ty); }

GaussianRational factorial(unsigned k)
{
    Integer f = 1;
    for (unsigned j = 2; j <= k; ++j)
        f *= j;
    return GaussianRational(Rational(f));
}

} // namespace

TEST(Lie, Examples)
{
    VectorField scale = VectorField::parse({"x"}, {"x"});
    EXPECT_EQ(lie_derivative(scale, parse_polynomial("x^2", {"x"})), parse_polynomial("2*x^2", {"x"}));
    VectorField rot = VectorField::parse({"x", "y"}, {"-y", "x"});
    EXPECT_TRUE(lie_derivative(rot, parse_polynomial("x^2 + y^2", {"x", "y"})).is_zero());
    auto ys = iterated_lie(exp_field(), P("y"), 6);
    for (const auto& q : ys)
        EXPECT_EQ(q, P("y"));
    auto ts = iterated_lie(exp_field(), P("t"), 3);
    EXPECT_EQ(ts[0], P("t"));
    EXPECT_EQ(ts[1], P("1"));
    EXPECT_TRUE(ts[2].is_zero());
    EXPECT_TRUE(ts[3].is_zero());
    EXPECT_EQ(iterated_lie(exp_field(), P("t*y"), 0).size(), 1u);
    EXPECT_THROW(lie_derivative(exp_field(), parse_polynomial("x", {"x"})), DimensionError);
}

TEST(Lie, DegreeBound)
{
    Rng rng(8);
    for (int it = 0; it < 100; ++it) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        VectorField xi = random_field(rng, n, static_cast<unsigned>(rng.uniform(0, 2)), 5);
        Polynomial Q = random_nonzero_polynomial(rng, n, 3, 5);
        Polynomial L = lie_derivative(xi, Q);
        if (!L.is_zero())
            EXPECT_LE(L.degree(), Q.degree() + xi.delta() - 1);
    }
}

TEST(Lie, HeightEnvelopeWithShippedConstant)
{
    double c = ztraj::testing::fit_xi_height(4242, 500);
    EXPECT_LE(c, ztraj::testing::constants::kXiHeight);
}

TEST(Trajectory, ClosedFormExamples)
{
    auto g = trajectory_series(exp_field(), exp_base(), 10);
    for (std::size_t k = 0; k <= 10; ++k) {
        EXPECT_EQ(g.coords[0][k], GaussianRational(k == 1 ? 1 : 0));
        EXPECT_EQ(g.coords[1][k], factorial(static_cast<unsigned>(k)).inverse());
    }
    VectorField sq = VectorField::parse({"x"}, {"x^2"});
    auto h = trajectory_series(sq, {GaussianRational(1)}, 12);
    for (std::size_t k = 0; k <= 12; ++k)
        EXPECT_EQ(h.coords[0][k], GaussianRational(1));
}

TEST(Trajectory, DerivativeIdentityAgainstIteratedLie)
{
    Rng rng(1234);
    for (int it = 0; it < 60; ++it) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        VectorField xi = random_field(rng, n, static_cast<unsigned>(rng.uniform(1, 2)), 4, 0.5);
        Polynomial Q = random_nonzero_polynomial(rng, n, static_cast<unsigned>(rng.uniform(1, 3)), 4, 0.5, 3);
        auto p = random_point(rng, n, 3, 2);
        unsigned K = 8;
        auto germ = trajectory_series(xi, p, K);
        Series f = compose(Q, germ);
        auto lie = iterated_lie(xi, Q, K);
        for (unsigned k = 0; k <= K; ++k)
            EXPECT_EQ(factorial(k) * f[k], lie[k].evaluate(p)) << "k=" << k;
    }
}

TEST(Trajectory, TruncationConsistency)
{
    Rng rng(99);
    for (int it = 0; it < 20; ++it) {
        VectorField xi = random_field(rng, 2, 2, 3);
        auto p = random_point(rng, 2, 3, 2);
        auto a = trajectory_series(xi, p, 7);
        auto b = trajectory_series(xi, p, 12);
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_EQ(b.coords[i].truncated(8), a.coords[i]);
    }
}

TEST(Trajectory, SingularPointGivesConstantGerm)
{
    VectorField xi = VectorField::parse(ty, {"t", "2*y"});
    auto g = trajectory_series(xi, {GaussianRational(0), GaussianRational(0)}, 6);
    EXPECT_TRUE(g.is_constant());
    EXPECT_TRUE(xi.is_singular(g.base));
    EXPECT_THROW(certify_radius(g, 1.0), CertificationError);
}

TEST(Multiplicity, Examples)
{
    auto m1 = multiplicity(exp_field(), exp_base(), P("y - 1"));
    ASSERT_TRUE(m1.value);
    EXPECT_EQ(*m1.value, 1u);
    auto m2 = multiplicity(exp_field(), exp_base(), P("(y - 1)^2"));
    ASSERT_TRUE(m2.value);
    EXPECT_EQ(*m2.value, 2u);
    EXPECT_EQ(m2.cap, 72u);
    EXPECT_EQ(mult_morse_bound(2, 2, 1), 72u);
    auto m3 = multiplicity(exp_field(), exp_base(), P("y - 1 - t - t^2/2"));
    ASSERT_TRUE(m3.value);
    EXPECT_EQ(*m3.value, 3u);
    VectorField quad = VectorField::parse(ty, {"t", "2*y"});
    auto m4 = multiplicity(quad, {GaussianRational(1), GaussianRational(1)}, P("y - t^2"));
    EXPECT_FALSE(m4.value);
}

TEST(Multiplicity, AdditiveAndBounded)
{
    Rng rng(555);
    for (int it = 0; it < 40; ++it) {
        VectorField xi = random_field(rng, 2, static_cast<unsigned>(rng.uniform(1, 2)), 3);
        auto p = random_point(rng, 2, 3, 2, false);
        if (xi.is_singular(p))
            continue;
        Polynomial A = random_nonzero_polynomial(rng, 2, 2, 3);
        Polynomial B = random_nonzero_polynomial(rng, 2, 2, 3);
        // force vanishing at p to get interesting multiplicities
        A -= Polynomial::constant(2, A.evaluate(p));
        if (A.is_zero())
            continue;
        auto ma = multiplicity(xi, p, A), mb = multiplicity(xi, p, B), mab = multiplicity(xi, p, A * B);
        if (ma.value)
            EXPECT_LE(*ma.value, ma.cap);
        if (ma.value && mb.value) {
            ASSERT_TRUE(mab.value);
            EXPECT_EQ(*mab.value, *ma.value + *mb.value);
        }
    }
}

TEST(Certify, EntireAndPolar)
{
    auto g = trajectory_series(exp_field(), exp_base(), 60);
    auto T = certify_radius(g, 2.0);
    EXPECT_DOUBLE_EQ(T.radius(), 2.0);
    EXPECT_LT(T.tail_bound(), 1e-20);

    // enclosure of e^(1/2) at z = 1/2 against a 300-bit reference
    auto vals = T.evaluate(ComplexBall::exact(GaussianRational(make_rational(1, 2)), 128));
    BigFloat ref(300);
    mpfr_set_d(ref.get(), 0.5, MPFR_RNDN);
    mpfr_exp(ref.get(), ref.get(), MPFR_RNDN);
    BigFloat diff(300);
    mpfr_sub(diff.get(), ref.get(), vals[1].re().get(), MPFR_RNDN);
    EXPECT_LE(std::fabs(diff.to_double()), vals[1].rad());
    EXPECT_LE(std::fabs(vals[1].im().to_double()), vals[1].rad());

    VectorField sq = VectorField::parse({"x"}, {"x^2"});
    auto h = trajectory_series(sq, {GaussianRational(1)}, 40);
    auto Th = certify_radius(h, 1.0);
    EXPECT_LT(Th.radius(), 1.0);
    EXPECT_GT(Th.radius(), 0.3);
    auto v = Th.evaluate(ComplexBall::exact(GaussianRational(make_rational(1, 4)), 128));
    EXPECT_TRUE(v[0].contains(std::complex<double>(4.0 / 3.0, 0)));
}

TEST(Certify, RescalingPushesRadiusAboveOne)
{
    VectorField sq = VectorField::parse({"x"}, {"x^2"});
    auto h = trajectory_series(sq, {GaussianRational(1)}, 40);
    auto small = rescaled(h, GaussianRational(make_rational(1, 4)));
    auto T = certify_radius(small, 2.0);
    EXPECT_GT(T.radius(), 1.0);
    EXPECT_EQ(small.field[0], parse_polynomial("1/4*x1^2", default_names(1)));
}
