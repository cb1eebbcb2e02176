#include <gtest/gtest.h>

#include "support/envelopes.hpp"
#include "support/random.hpp"
#include "ztraj/orbit/orbit_ideal.hpp"

using namespace ztraj;
using ztraj::testing::random_field;
using ztraj::testing::random_monomial;
using ztraj::testing::random_nonzero_polynomial;
using ztraj::testing::random_point;

namespace {

const VariableNames ty{"t", "y"};
Polynomial P(const char* s) { return parse_polynomial(s, ty); }
GaussianRational Q(long a, long b = 1) { return GaussianRational(make_rational(a, b)); }

VectorField exp_field() { return VectorField::parse(ty, {"1", "y"}); }
VectorField quad_field() { return VectorField::parse(ty, {"t", "2*y"}); }

/// Kernel oracle: evaluates xi^k m at p symbolically for every monomial m and
/// every k <= nu, then takes the exact kernel of the full matrix.
std::vector<Polynomial> kernel_oracle(const VectorField& xi, const std::vector<GaussianRational>& p, int d,
                                      unsigned long nu)
{
    auto monos = monomials_up_to(xi.dim(), static_cast<unsigned>(d));
    std::reverse(monos.begin(), monos.end());
    Matrix m(nu + 1, monos.size());
    for (std::size_t j = 0; j < monos.size(); ++j) {
        auto lie = iterated_lie(xi, Polynomial::monomial(monos[j]), static_cast<unsigned>(nu));
        for (unsigned long k = 0; k <= nu; ++k)
            m(k, j) = lie[k].evaluate(p);
    }
    Matrix km(0, monos.size());
    for (auto& v : kernel(m))
        km.append_row(v);
    std::vector<Polynomial> out;
    if (km.rows() == 0)
        return out;
    auto r = rref(km);
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
        Polynomial q(xi.dim());
        for (std::size_t j = 0; j < monos.size(); ++j)
            q.add_term(monos[j], r.reduced(i, j));
        out.push_back(q);
    }
    return out;
}

long binom(long n, long k)
{
    if (k < 0 || n < k)
        return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// Inclusion-exclusion count of staircase monomials of degree <= d.
long rho_inclusion_exclusion(const MonomialDiagram& D, int d)
{
    const auto& g = D.generators();
    long n = static_cast<long>(D.nvars());
    long total = 0;
    for (unsigned long mask = 0; mask < (1ul << g.size()); ++mask) {
        Monomial l(D.nvars());
        for (std::size_t i = 0; i < g.size(); ++i)
            if (mask & (1ul << i))
                l = l.lcm(g[i]);
        long sign = (__builtin_popcountl(mask) % 2) ? -1 : 1;
        total += sign * binom(d - static_cast<long>(l.degree()) + n, n);
    }
    return total;
}

} // namespace

TEST(Membership, Examples)
{
    std::vector<GaussianRational> p{Q(1), Q(1)};
    EXPECT_TRUE(orbit_membership(quad_field(), p, P("y - t^2")));
    EXPECT_FALSE(orbit_membership(quad_field(), p, P("y - t")));
    EXPECT_TRUE(orbit_membership(quad_field(), p, Polynomial(2)));
    // y - t vanishes at p and xi(y - t) = 2y - t does not
    auto lie = iterated_lie(quad_field(), P("y - t"), 2);
    EXPECT_TRUE(lie[0].evaluate(p).is_zero());
    EXPECT_FALSE(lie[1].evaluate(p).is_zero());
}

TEST(Membership, AgreesWithIteratedLieOracle)
{
    Rng rng(77);
    for (int it = 0; it < 30; ++it) {
        VectorField xi = random_field(rng, 2, 1, 3);
        auto p = random_point(rng, 2, 3, 2, false);
        Polynomial A = random_nonzero_polynomial(rng, 2, 2, 3);
        A -= Polynomial::constant(2, A.evaluate(p));
        unsigned long nu = orbit_nu(xi, std::max(A.degree(), 0));
        bool oracle = true;
        for (const auto& L : iterated_lie(xi, A, static_cast<unsigned>(nu)))
            if (!L.evaluate(p).is_zero())
                oracle = false;
        EXPECT_EQ(orbit_membership(xi, p, A), oracle);
    }
}

TEST(Membership, BallsCertifyOnlyNonMembership)
{
    std::vector<ComplexBall> pb{ComplexBall::exact(Q(1), 128).inflated(1e-20),
                                ComplexBall::exact(Q(1), 128).inflated(1e-20)};
    EXPECT_TRUE(certify_non_membership(quad_field(), pb, P("y - t"), 3, 128));
    EXPECT_FALSE(certify_non_membership(quad_field(), pb, P("y - t^2"), 10, 128));
}

TEST(Slice, ExpOrbitIsDense)
{
    for (int d = 1; d <= 3; ++d) {
        auto s = ideal_slice(exp_field(), {Q(0), Q(1)}, d);
        EXPECT_TRUE(s.is_zero()) << "d=" << d;
        EXPECT_EQ(s.nu, mult_morse_bound(2, d, 1));
    }
}

TEST(Slice, QuadraticOrbit)
{
    auto s = ideal_slice(quad_field(), {Q(1), Q(1)}, 2);
    ASSERT_EQ(s.basis.size(), 1u);
    EXPECT_EQ(s.basis[0], P("t^2 - y"));
    auto D = leading_diagram(s);
    ASSERT_EQ(D.generators().size(), 1u);
    EXPECT_EQ(D.generators()[0], (Monomial{2, 0}));
    EXPECT_EQ(D.kappa(), 1u);
    auto sc = D.staircase(2);
    std::vector<Monomial> expect{Monomial{0, 0}, Monomial{1, 0}, Monomial{0, 1}, Monomial{1, 1}, Monomial{0, 2}};
    EXPECT_EQ(sc, expect);
}

TEST(Slice, MatchesKernelOracle)
{
    Rng rng(3);
    std::vector<std::pair<VectorField, std::vector<GaussianRational>>> cases{
        {quad_field(), {Q(1), Q(1)}},
        {quad_field(), {Q(2), Q(-3)}},
        {VectorField::parse(ty, {"t", "3*y"}), {Q(1), Q(2)}},
        {VectorField::parse(ty, {"-y", "t"}), {Q(1), Q(0)}},
        {exp_field(), {Q(0), Q(1)}},
    };
    for (int i = 0; i < 4; ++i)
        cases.push_back({random_field(rng, 2, 1, 2), random_point(rng, 2, 2, 2, false)});
    for (const auto& [xi, p] : cases)
        for (int d = 1; d <= 3; ++d) {
            auto s = ideal_slice(xi, p, d);
            EXPECT_EQ(s.basis, kernel_oracle(xi, p, d, s.nu)) << to_string(xi[0]) << "," << to_string(xi[1]) << " d=" << d;
        }
}

TEST(Slice, ParametricExampleOnInvariantSlice)
{
    // corrected field t d/dt + a y d/dy; on a = 1/2 the orbit of (1,1) is y^2 = t
    VectorField induced = VectorField::parse(ty, {"t", "1/2*y"});
    auto s = ideal_slice(induced, {Q(1), Q(1)}, 2);
    EXPECT_TRUE(orbit_membership(induced, {Q(1), Q(1)}, P("y^2 - t")));
    ASSERT_EQ(s.basis.size(), 1u);
    EXPECT_EQ(s.basis[0], P("y^2 - t"));
    // the same with a kept as a coordinate of C^3; nu = 3456 there, so this is a
    // truncated check of the series P(phi(z)) only
    VariableNames tya{"t", "y", "a"};
    VectorField param = VectorField::parse(tya, {"t", "a*y", "0"});
    std::vector<GaussianRational> p3{Q(1), Q(1), Q(1, 2)};
    EXPECT_FALSE(multiplicity(param, p3, parse_polynomial("y^2 - t", tya), 60).value);
    EXPECT_FALSE(multiplicity(param, p3, parse_polynomial("a - 1/2", tya), 60).value);
    EXPECT_TRUE(multiplicity(param, p3, parse_polynomial("y - t", tya), 60).value);
    // m/n = 2/3: y^3 = t^2
    VectorField f23 = VectorField::parse(ty, {"t", "2/3*y"});
    EXPECT_TRUE(orbit_membership(f23, {Q(1), Q(1)}, P("y^3 - t^2")));
}

TEST(Slice, DegreeRaisingKeepsMembership)
{
    std::vector<GaussianRational> p{Q(2), Q(4)};
    auto s2 = ideal_slice(quad_field(), p, 2);
    auto s3 = ideal_slice(quad_field(), p, 3);
    for (const auto& q : s2.basis) {
        EXPECT_TRUE(staircase_division(q, s3).remainder.is_zero());
        for (std::size_t j = 0; j < 2; ++j)
            EXPECT_TRUE(staircase_division(q * Polynomial::variable(2, j), s3).remainder.is_zero());
    }
}

TEST(Slice, EveryElementKillsAllDerivatives)
{
    std::vector<GaussianRational> p{Q(1), Q(1)};
    auto s = ideal_slice(quad_field(), p, 3);
    for (const auto& q : s.basis)
        for (const auto& L : iterated_lie(quad_field(), q, static_cast<unsigned>(s.nu)))
            EXPECT_TRUE(L.evaluate(p).is_zero());
}

TEST(Diagram, EdgeCases)
{
    IdealSlice zero{exp_field(), {Q(0), Q(1)}, 2, 0, {}};
    auto D = leading_diagram(zero);
    EXPECT_TRUE(D.is_empty());
    EXPECT_EQ(D.kappa(), 2u);
    auto s = ideal_slice(quad_field(), {Q(0), Q(0)}, 1);
    auto Ds = leading_diagram(s);
    ASSERT_EQ(Ds.generators().size(), 2u);
    EXPECT_EQ(Ds.kappa(), 0u);
    EXPECT_EQ(Ds.rho(5), 1u);
}

TEST(Diagram, RhoEnumerationMatchesInclusionExclusion)
{
    Rng rng(19);
    for (int it = 0; it < 40; ++it) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 3));
        std::vector<Monomial> gens;
        long k = rng.uniform(0, 3);
        for (long i = 0; i < k; ++i) {
            Monomial m = random_monomial(rng, n, 2);
            if (!m.is_one())
                gens.push_back(m);
        }
        MonomialDiagram D(n, gens);
        for (int d = 0; d <= 10; ++d)
            EXPECT_EQ(static_cast<long>(D.rho(d)), rho_inclusion_exclusion(D, d));
        // kappa matches the growth: rho(2d)/rho(d) ~ 2^kappa for large d
        double ratio = static_cast<double>(D.rho(40)) / static_cast<double>(D.rho(20));
        EXPECT_NEAR(std::log2(ratio), static_cast<double>(D.kappa()), 0.35);
    }
}

TEST(Division, Examples)
{
    std::vector<GaussianRational> p{Q(1), Q(1)};
    auto s3 = ideal_slice(quad_field(), p, 3);
    auto r = staircase_division(P("t^3"), s3);
    EXPECT_EQ(r.remainder, P("t*y"));
    Polynomial recon = r.remainder;
    for (const auto& st : r.witness)
        recon += s3.basis[st.basis_index] * st.coefficient;
    EXPECT_EQ(recon, P("t^3"));
    EXPECT_EQ(staircase_division(P("t*y + 3"), s3).remainder, P("t*y + 3"));
    EXPECT_TRUE(staircase_division(P("t^3 - t*y"), s3).remainder.is_zero());
}

TEST(Division, RemainderOnStaircaseAndIdempotent)
{
    Rng rng(29);
    std::vector<GaussianRational> p{Q(1), Q(2)};
    VectorField xi = VectorField::parse(ty, {"t", "3*y"});
    auto s = ideal_slice(xi, p, 3);
    auto D = leading_diagram(s);
    for (int it = 0; it < 30; ++it) {
        Polynomial A = random_nonzero_polynomial(rng, 2, 3, 5, 0.6, 3);
        auto r = staircase_division(A, s);
        for (const auto& m : r.remainder.support())
            EXPECT_FALSE(D.in_ideal(m));
        EXPECT_TRUE(orbit_membership(xi, p, A - r.remainder));
        EXPECT_EQ(staircase_division(r.remainder, s).remainder, r.remainder);
    }
}

TEST(Stability, ScanReportsGenericAndExceptional)
{
    Rng rng(61);
    std::vector<std::vector<GaussianRational>> pts;
    for (int i = 0; i < 20; ++i)
        pts.push_back(random_point(rng, 2, 5, 3));
    auto rep = diagram_stability_scan(exp_field(), pts, 2, 4);
    EXPECT_TRUE(rep.generic.is_empty());
    EXPECT_TRUE(rep.exceptional.empty());

    // t d/dt + 2y d/dy: every non-singular point has its own relation y t0^2 = y0 t^2,
    // all with the same leading term t^2; the origin is singular
    std::vector<std::vector<GaussianRational>> q{{Q(1), Q(1)}, {Q(2), Q(1)}, {Q(1), Q(3)}, {Q(0), Q(0)}, {Q(-1), Q(5)}};
    auto rq = diagram_stability_scan(quad_field(), q, 2, 2);
    ASSERT_EQ(rq.generic.generators().size(), 1u);
    EXPECT_EQ(rq.generic.generators()[0], (Monomial{2, 0}));
    EXPECT_EQ(rq.exceptional, std::vector<std::size_t>{3});
    EXPECT_TRUE(rq.singular[3]);
    auto one = diagram_stability_scan(quad_field(), q, 2, 1);
    EXPECT_EQ(one.diagrams, rq.diagrams);
}
