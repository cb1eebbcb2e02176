#include <gtest/gtest.h>

#include "support/random.hpp"
#include "ztraj/zerocount/zerocount.hpp"

using namespace ztraj;

namespace {

const VariableNames ty{"t", "y"};
Polynomial P(const char* s) { return parse_polynomial(s, ty); }
GaussianRational Q(long a, long b = 1) { return GaussianRational(make_rational(a, b)); }

/// phi(z) = (z, e^z), certified on |z| <= 4.5.
const ParametrizedTrajectory& exp_trajectory()
{
    static const ParametrizedTrajectory traj = [] {
        auto xi = VectorField::parse(ty, {"1", "y"});
        return certify_radius(trajectory_series(xi, {Q(0), Q(1)}, 90), 4.5, 128);
    }();
    return traj;
}

/// phi(z) = (z, 1/(4 - z)) from t' = 1, y' = y^2, y(0) = 1/4; certified on |z| <= 2.5.
const ParametrizedTrajectory& pole_trajectory()
{
    static const ParametrizedTrajectory traj = [] {
        auto xi = VectorField::parse(ty, {"1", "y^2"});
        return certify_radius(trajectory_series(xi, {Q(0), Q(1, 4)}, 160), 2.5, 128);
    }();
    return traj;
}

DiscFunction on_exp(const char* s) { return DiscFunction(exp_trajectory(), P(s)); }

} // namespace

TEST(CountZeros, Examples)
{
    struct Case {
        const char* poly;
        long count;
    };
    for (auto c : {Case{"y - 1", 1}, Case{"y + 1", 0}, Case{"y - 1 - t", 2}}) {
        auto f = on_exp(c.poly);
        auto lo = count_zeros(f, 128);
        auto hi = count_zeros(f, 256);
        EXPECT_TRUE(lo.certified);
        EXPECT_EQ(lo.count, c.count) << c.poly;
        EXPECT_EQ(hi.count, c.count) << c.poly;
        EXPECT_DOUBLE_EQ(lo.radius, 1.0);
        EXPECT_LE(static_cast<double>(lo.count), jensen_bound(f, 2.0).bound) << c.poly;
    }
}

TEST(CountZeros, DoubleZeroMatchesSeriesValuation)
{
    auto f = on_exp("y - 1 - t");
    EXPECT_EQ(f.series().valuation(), 2u);
    auto roots = localize_zeros(f, 1.0);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_EQ(roots[0].multiplicity, 2);
    EXPECT_LT(std::abs(roots[0].center), roots[0].radius);
}

TEST(CountZeros, IdenticallyZeroIsRejected)
{
    EXPECT_THROW(count_zeros(on_exp("0"), 128), DomainError);
    auto xi = VectorField::parse(ty, {"1", "2*t"});
    auto traj = certify_radius(trajectory_series(xi, {Q(0), Q(0)}, 30), 3.0);
    EXPECT_THROW(count_zeros(DiscFunction(traj, P("y - t^2")), 128), DomainError);
}

TEST(CountZeros, ZeroOnTheCircleDilatesTheRadius)
{
    auto c = count_zeros(on_exp("t - 1"), 128);
    EXPECT_TRUE(c.certified);
    EXPECT_GT(c.radius, 1.0);
    EXPECT_LT(c.radius, exp_trajectory().radius());
    EXPECT_EQ(c.count, 1);
}

TEST(CountZeros, InvariantUnderAnalyticUnit)
{
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        Polynomial F = harness_polynomial(rng, 2, static_cast<int>(rng.uniform(1, 3)), 5);
        auto a = count_zeros(DiscFunction(exp_trajectory(), F), 128);
        auto b = count_zeros(DiscFunction(exp_trajectory(), F * P("y")), 128);
        EXPECT_EQ(a.radius, b.radius);
        EXPECT_EQ(a.count, b.count);
    }
}

TEST(CountZeros, StableUnderPrecisionAndLocalized)
{
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial F = harness_polynomial(rng, 2, static_cast<int>(rng.uniform(1, 4)), 9);
        DiscFunction f(exp_trajectory(), F);
        auto a = count_zeros(f, 128);
        auto b = count_zeros(f, 256);
        ASSERT_TRUE(a.certified);
        EXPECT_EQ(a.count, b.count);
        // every counted zero is located in a certified disjoint enclosure
        auto roots = localize_zeros(f, a.radius);
        long inside = 0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                EXPECT_GT(std::abs(roots[i].center - roots[j].center), roots[i].radius + roots[j].radius);
            if (std::abs(roots[i].center) + roots[i].radius < a.radius)
                inside += roots[i].multiplicity;
            else
                EXPECT_GT(std::abs(roots[i].center) + roots[i].radius, a.radius) << "straddles the contour";
        }
        long straddling = 0;
        for (const auto& r : roots)
            if (std::abs(r.center) - r.radius < a.radius && std::abs(r.center) + r.radius >= a.radius)
                straddling += r.multiplicity;
        EXPECT_LE(inside, a.count);
        EXPECT_GE(inside + straddling, a.count);
    }
}

TEST(CountZeros, NeverExceedsJensenBound)
{
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        Polynomial F = harness_polynomial(rng, 2, static_cast<int>(rng.uniform(1, 3)), 9);
        DiscFunction f(exp_trajectory(), F);
        auto c = count_zeros(f, 128);
        if (c.radius != 1.0)
            continue;
        EXPECT_LE(static_cast<double>(c.count), jensen_bound(f, 2.0).bound);
    }
}

TEST(Jensen, Monomial)
{
    for (int k : {1, 3, 5}) {
        Polynomial F = Polynomial::monomial(Monomial({static_cast<unsigned>(k), 0}));
        DiscFunction f(exp_trajectory(), F);
        auto rep = jensen_bound(f, 4.0);
        EXPECT_NEAR(rep.bound, k * std::log(4.0) / std::log(17.0 / 8.0), 3e-2 * k);
        EXPECT_GE(rep.bound, static_cast<double>(count_zeros(f, 128).count));
        EXPECT_LE(rep.M_upper / std::pow(4.0, k), 1 + 1e-2 * k);
        EXPECT_GE(rep.m_lower, 1 - 1e-9);
    }
}

TEST(Jensen, ConstantGivesZero)
{
    auto rep = jensen_bound(on_exp("3 + 2*I"), 2.0);
    EXPECT_EQ(rep.bound, 0.0);
    EXPECT_EQ(count_zeros(on_exp("3 + 2*I"), 128).count, 0);
}

TEST(Jensen, ExpMinusOne)
{
    auto rep = jensen_bound(on_exp("y - 1"), 2.0);
    EXPECT_GE(rep.bound, 1.0);
    // M = e^2 - 1, m = e - 1
    EXPECT_NEAR(rep.M_upper, std::exp(2.0) - 1, 1e-2 * std::exp(2.0));
    EXPECT_NEAR(rep.m_lower, std::exp(1.0) - 1, 1e-2 * std::exp(1.0));
}

TEST(Jensen, HalfRadiusConstantFailsOnBlaschkePower)
{
    // f = (2 (z - 1) / (4 - z))^k has |f| = 1 on |z| = 2 and a k-fold zero at 1.
    // The constant 1 / log((1 + r) / 2) would give 0.55 k < k; the
    // Blaschke constant 1 / log((r^2 + 1) / (2 r)) gives exactly k.
    for (int k : {1, 2, 4}) {
        Polynomial base = P("2*t*y - 2*y");
        DiscFunction f(pole_trajectory(), base.pow(static_cast<unsigned>(k)));
        auto c = count_zeros(f, 128);
        ASSERT_EQ(c.count, k);
        auto rep = jensen_bound(f, 2.0);
        double half_radius = std::log(rep.M_upper / rep.m_lower) / std::log(1.5);
        EXPECT_LT(half_radius, 0.6 * k);
        EXPECT_GE(rep.bound, static_cast<double>(k) * (1 - 1e-3));
        EXPECT_LE(rep.bound, 1.1 * k); // nearly tight: only the enclosure overestimate of M remains
    }
}

TEST(Harness, SingleExamples)
{
    EXPECT_EQ(count_zeros(on_exp("y - 2"), 128).count, 1);
    EXPECT_EQ(count_zeros(on_exp("7"), 128).count, 0);
}

TEST(Harness, SmallSweep)
{
    auto xi = VectorField::parse(ty, {"1", "y"});
    auto table = main_theorem_harness(xi, exp_trajectory(), {1, 2, 3}, 4, 99);
    ASSERT_EQ(table.rows.size(), 3u);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.kappa, 2u);
        EXPECT_EQ(row.counts.size(), 4u);
        EXPECT_LE(static_cast<unsigned long>(row.max_count), row.morse_envelope);
    }
    EXPECT_GT(table.fitted_c, 0.0);
    EXPECT_LE(table.fitted_c, 1.0);
    auto again = main_theorem_harness(xi, exp_trajectory(), {1, 2, 3}, 4, 99, 128, 3);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_EQ(table.rows[i].counts, again.rows[i].counts);
}
