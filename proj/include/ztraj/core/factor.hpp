#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "ztraj/core/univariate.hpp"

namespace ztraj {

namespace detail {

/// Multiple of p with Gaussian-integer coefficients.
inline UPoly integral_multiple(const UPoly& p)
{
    Integer l = 1;
    for (const auto& c : p.coeffs())
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.denominator_lcm().get_mpz_t());
    return GaussianRational(Rational(l)) * p;
}

inline UPoly squarefree_part(const UPoly& p)
{
    UPoly g = gcd(p, p.derivative());
    return p.divmod(g).first.monic();
}

inline std::vector<std::complex<double>> numeric_roots(const UPoly& p)
{
    std::vector<std::complex<double>> out;
    if (p.degree() < 1)
        return out;
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1> c(p.degree() + 1);
    for (int k = 0; k <= p.degree(); ++k)
        c(k) = p[static_cast<std::size_t>(k)].to_complex();
    if (p.degree() == 1) {
        out.push_back(-c(0) / c(1));
        return out;
    }
    Eigen::PolynomialSolver<std::complex<double>, Eigen::Dynamic> solver(c);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        std::complex<double> z = solver.roots()(i);
        // Newton polish on the (squarefree) input
        for (int it = 0; it < 4; ++it) {
            std::complex<double> v = 0, d = 0;
            for (int k = p.degree(); k >= 0; --k) {
                d = d * z + v;
                v = v * z + c(k);
            }
            if (std::abs(d) == 0)
                break;
            z -= v / d;
        }
        out.push_back(z);
    }
    return out;
}

inline GaussianRational nearest_gaussian_integer(std::complex<double> z)
{
    return {Rational(Integer(static_cast<long>(std::llround(z.real())))), Rational(Integer(static_cast<long>(std::llround(z.imag()))))};
}

} // namespace detail

struct GaussianRoot {
    GaussianRational root;
    unsigned multiplicity = 0;
};

/// The roots of p lying in Q(i), with multiplicities. A root r = a/b of an
/// integral polynomial with leading coefficient c has c r in Z[i], so each
/// numerical root of the squarefree part is rounded there and verified exactly.
inline std::vector<GaussianRoot> gaussian_roots(const UPoly& p)
{
    if (p.is_zero())
        throw DomainError("roots of the zero polynomial");
    std::vector<GaussianRoot> out;
    if (p.degree() < 1)
        return out;
    UPoly s = detail::integral_multiple(detail::squarefree_part(p));
    const GaussianRational& lead = s.leading();
    for (auto z : detail::numeric_roots(s)) {
        std::complex<double> w = z * lead.to_complex();
        if (std::abs(w.real()) > 9e15 || std::abs(w.imag()) > 9e15)
            continue;
        GaussianRational r = detail::nearest_gaussian_integer(w) / lead;
        if (!s.evaluate(r).is_zero())
            continue;
        bool seen = false;
        for (const auto& g : out)
            seen = seen || g.root == r;
        if (seen)
            continue;
        GaussianRoot g{r, 0};
        UPoly lin({-r, GaussianRational(1)}), q = p;
        for (;;) {
            auto [quo, rem] = q.divmod(lin);
            if (!rem.is_zero())
                break;
            q = quo;
            ++g.multiplicity;
        }
        out.push_back(g);
    }
    return out;
}

struct IrreducibleFactors {
    std::vector<UPoly> factors; // distinct, monic
    bool complete = true;       // false when a leftover factor could not be decided
};

/// Distinct monic irreducible factors over Q(i) of a polynomial of small
/// degree: linear factors from gaussian_roots, then quadratic splittings of
/// the remainder, read off pairs of numerical roots. A remainder without
/// linear or quadratic factors is irreducible when its degree is at most 5.
inline IrreducibleFactors irreducible_factors(const UPoly& p)
{
    IrreducibleFactors out;
    if (p.degree() < 1)
        return out;
    UPoly rest = detail::squarefree_part(p);
    for (const auto& g : gaussian_roots(rest)) {
        UPoly lin({-g.root, GaussianRational(1)});
        out.factors.push_back(lin);
        rest = rest.divmod(lin).first;
    }
    rest = rest.monic();
    for (bool split = true; split && rest.degree() >= 4;) {
        split = false;
        // monic with Gaussian-integer coefficients after x -> x / c, so that
        // monic factors have Gaussian-integer coefficients
        UPoly ip = detail::integral_multiple(rest);
        GaussianRational c = ip.leading();
        std::vector<GaussianRational> mc(ip.coeffs().size());
        int n = ip.degree();
        GaussianRational cp(1);
        for (int k = n; k >= 0; --k) {
            mc[static_cast<std::size_t>(k)] = ip[static_cast<std::size_t>(k)] * cp;
            if (k > 0)
                cp *= c;
        }
        UPoly monic_int = UPoly(mc).monic();
        auto z = detail::numeric_roots(monic_int);
        for (std::size_t i = 0; i < z.size() && !split; ++i)
            for (std::size_t j = i + 1; j < z.size() && !split; ++j) {
                UPoly quad({detail::nearest_gaussian_integer(z[i] * z[j]), -detail::nearest_gaussian_integer(z[i] + z[j]),
                            GaussianRational(1)});
                if (!monic_int.divmod(quad).second.is_zero())
                    continue;
                // undo the substitution: quad(c x) / c^2
                UPoly back({quad[0], quad[1] * c, quad[2] * c * c});
                back = back.monic();
                out.factors.push_back(back);
                rest = rest.divmod(back).first.monic();
                split = true;
            }
    }
    if (rest.degree() >= 1)
        out.factors.push_back(rest);
    out.complete = rest.degree() <= 5;
    return out;
}

} // namespace ztraj
