#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ztraj/core/factor.hpp"
#include "ztraj/dynamics/vector_field.hpp"

namespace ztraj {

/// y' = A(t) y with A an n x n matrix over Q(i)(t).
struct RationalMatrixODE {
    std::vector<std::vector<RationalFunction>> A;

    std::size_t n() const { return A.size(); }

    static RationalMatrixODE parse(const std::vector<std::vector<std::string>>& rows, const std::string& var = "t")
    {
        RationalMatrixODE m;
        for (const auto& row : rows) {
            if (row.size() != rows.size())
                throw DimensionError("linear system matrix must be square");
            std::vector<RationalFunction> r;
            for (const auto& s : row)
                r.push_back(parse_rational_function(s, var));
            m.A.push_back(std::move(r));
        }
        if (m.A.empty())
            throw DimensionError("linear system matrix is empty");
        return m;
    }
};

struct Pole {
    GaussianRational point;
    unsigned order = 0;    // max pole order over the entries of A
    unsigned exponent = 0; // multiplicity of the point as a root of q
};

struct LinearSystemField {
    VectorField xi;                   // variables t, y1..yn
    UPoly q;                          // monic
    std::vector<Pole> poles;          // sorted by first appearance in the entries
    std::vector<std::vector<UPoly>> A_tilde; // q A
};

inline VariableNames linear_system_names(std::size_t n)
{
    VariableNames names{"t"};
    if (n == 1)
        names.push_back("y");
    else
        for (std::size_t i = 1; i <= n; ++i)
            names.push_back("y" + std::to_string(i));
    return names;
}

/// xi = q(t) d/dt + (q A y) d/dy with q of minimal degree such that q A is
/// polynomial and vanishes at every pole of A. At a pole a of maximal order k
/// the entry of order k forces ord_a q >= k + 1, and k + 1 suffices for every
/// entry, so q = prod (t - a)^(k_a + 1).
inline LinearSystemField linear_system_field(const RationalMatrixODE& ode)
{
    std::size_t n = ode.n();
    LinearSystemField out;
    for (const auto& row : ode.A) {
        if (row.size() != n)
            throw DimensionError("linear system matrix must be square");
        for (const auto& e : row) {
            const UPoly& den = e.den();
            if (den.degree() < 1)
                continue;
            auto roots = gaussian_roots(den);
            unsigned found = 0;
            for (const auto& r : roots)
                found += r.multiplicity;
            if (found != static_cast<unsigned>(den.degree()))
                throw UnsupportedInput("pole of A(t) outside Q(i): denominator " + den.to_string());
            for (const auto& r : roots) {
                auto it = std::find_if(out.poles.begin(), out.poles.end(), [&](const Pole& p) { return p.point == r.root; });
                if (it == out.poles.end())
                    out.poles.push_back({r.root, r.multiplicity, 0});
                else
                    it->order = std::max(it->order, r.multiplicity);
            }
        }
    }
    out.q = UPoly::constant(GaussianRational(1));
    for (auto& p : out.poles) {
        p.exponent = p.order + 1;
        out.q = out.q * UPoly({-p.point, GaussianRational(1)}).pow(p.exponent);
    }

    VariableNames names = linear_system_names(n);
    std::vector<Polynomial> comps{out.q.to_polynomial(n + 1, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<UPoly> row;
        Polynomial c(n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& e = ode.A[i][j];
            auto [quo, rem] = (out.q * e.num()).divmod(e.den());
            if (!rem.is_zero())
                throw CertificationError("q A is not polynomial");
            row.push_back(quo);
            c += quo.to_polynomial(n + 1, 0) * Polynomial::variable(n + 1, j + 1);
        }
        out.A_tilde.push_back(std::move(row));
        comps.push_back(std::move(c));
    }
    out.xi = VectorField(names, std::move(comps));

    // Sing xi = {q = 0} x C^n: q A vanishes at each root of q, and off the
    // roots the t-component is nonzero
    for (const auto& p : out.poles)
        for (const auto& row : out.A_tilde)
            for (const auto& e : row)
                if (!e.evaluate(p.point).is_zero())
                    throw CertificationError("q A does not vanish at a pole of A");
    return out;
}

} // namespace ztraj
