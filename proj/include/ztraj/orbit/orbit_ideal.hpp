#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "ztraj/core/linalg.hpp"
#include "ztraj/dynamics/trajectory.hpp"
#include "ztraj/util/parallel.hpp"

namespace ztraj {

/// Derivative count used for orbit-ideal membership in degree d:
/// nu = 2^(n+1) (d + (n-1) delta)^n.
inline unsigned long orbit_nu(const VectorField& xi, int d) { return mult_morse_bound(xi.dim(), d, xi.delta()); }

/// P lies in the orbit-closure ideal of p iff xi^k P(p) = 0 for k <= nu.
/// Uses k! [z^k] P(phi(z)) = (xi^k P)(p), so only the Taylor series is needed.
inline bool orbit_membership(const VectorField& xi, const std::vector<GaussianRational>& p, const Polynomial& P)
{
    if (P.is_zero())
        return true;
    return !multiplicity(xi, p, P, orbit_nu(xi, P.degree())).value.has_value();
}

/// Ball version: can only ever prove NON-membership. Returns true if some
/// xi^k P (k <= kmax) is provably nonzero on the ball point.
inline bool certify_non_membership(const VectorField& xi, const std::vector<ComplexBall>& p, const Polynomial& P,
                                   unsigned kmax, mpfr_prec_t prec)
{
    Polynomial Q = P;
    for (unsigned k = 0; k <= kmax && !Q.is_zero(); ++k) {
        if (!evaluate(Q, std::span<const ComplexBall>(p), prec).contains_zero())
            return true;
        Q = lie_derivative(xi, Q);
    }
    return false;
}

/// Basis of I(Ob_p) cap P_{<=d} in reduced row-echelon form with respect to
/// deglex (descending), so basis[i].leading_monomial() are the pivots.
struct IdealSlice {
    VectorField field;
    std::vector<GaussianRational> point;
    int degree = 0;
    unsigned long nu = 0;
    std::vector<Polynomial> basis;

    std::size_t nvars() const { return field.dim(); }
    bool is_zero() const { return basis.empty(); }
};

/// Kernel of Q -> (Q(p), xi Q(p), ..., xi^nu Q(p)) on P_{<=d}. The constraint
/// rows are accumulated one derivative order at a time and the computation
/// stops early once the kernel is trivial.
inline IdealSlice ideal_slice(const VectorField& xi, const std::vector<GaussianRational>& p, int d,
                              std::optional<unsigned long> nu_override = std::nullopt)
{
    std::size_t n = xi.dim();
    auto monos = monomials_up_to(n, static_cast<unsigned>(d));
    std::reverse(monos.begin(), monos.end()); // deglex descending: column 0 is the largest
    unsigned long nu = nu_override ? *nu_override : orbit_nu(xi, d);
    SeriesEngine eng(xi, p);
    std::vector<std::size_t> handles;
    for (const auto& m : monos)
        handles.push_back(eng.track(Polynomial::monomial(m)));
    EchelonBasis constraints(monos.size());
    for (unsigned long k = 0; k <= nu && constraints.rank() < monos.size(); ++k) {
        std::vector<GaussianRational> row(monos.size());
        for (std::size_t j = 0; j < monos.size(); ++j)
            row[j] = eng.coefficient(handles[j], k);
        constraints.insert(std::move(row));
    }
    IdealSlice s{xi, p, d, nu, {}};
    if (constraints.rank() == monos.size())
        return s;
    Matrix cm(constraints.rank(), monos.size());
    for (std::size_t i = 0; i < constraints.rank(); ++i)
        for (std::size_t j = 0; j < monos.size(); ++j)
            cm(i, j) = constraints.rows()[i][j];
    Matrix km(0, monos.size());
    if (constraints.rank() == 0)
        km = Matrix::identity(monos.size());
    else
        for (auto& v : kernel(cm))
            km.append_row(v);
    RrefResult r = rref(km);
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
        Polynomial q(n);
        for (std::size_t j = 0; j < monos.size(); ++j)
            q.add_term(monos[j], r.reduced(i, j));
        s.basis.push_back(std::move(q));
    }
    return s;
}

/// Monomial ideal given by minimal generators; the staircase is its
/// complement.
class MonomialDiagram {
public:
    MonomialDiagram() = default;
    MonomialDiagram(std::size_t nvars, std::vector<Monomial> gens) : n_(nvars)
    {
        std::sort(gens.begin(), gens.end(), DeglexLess{});
        gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
        for (const auto& g : gens) {
            bool redundant = false;
            for (const auto& h : gens_)
                if (h.divides(g))
                    redundant = true;
            if (!redundant)
                gens_.push_back(g);
        }
        // exponent-vector order for export
        std::sort(gens_.begin(), gens_.end(), [](const Monomial& a, const Monomial& b) {
            return std::lexicographical_compare(a.exponents().begin(), a.exponents().end(), b.exponents().begin(),
                                                b.exponents().end());
        });
    }

    std::size_t nvars() const { return n_; }
    const std::vector<Monomial>& generators() const { return gens_; }
    bool is_empty() const { return gens_.empty(); }

    bool in_ideal(const Monomial& m) const
    {
        for (const auto& g : gens_)
            if (g.divides(m))
                return true;
        return false;
    }

    /// Staircase monomials of degree <= d in graded row order (1, x1, x2, ...).
    std::vector<Monomial> staircase(int d) const
    {
        std::vector<Monomial> out;
        for (const auto& m : monomials_up_to(n_, static_cast<unsigned>(std::max(d, 0))))
            if (!in_ideal(m))
                out.push_back(m);
        std::sort(out.begin(), out.end(), GradedRowOrder{});
        return out;
    }

    /// rho(d) by direct enumeration.
    std::size_t rho(int d) const { return staircase(d).size(); }

    /// Growth exponent of rho(d): the largest set S of variables such that
    /// every generator involves a variable outside S (then all monomials in S
    /// lie in the staircase).
    std::size_t kappa() const
    {
        std::size_t best = 0;
        for (unsigned long mask = 0; mask < (1ul << n_); ++mask) {
            bool ok = true;
            for (const auto& g : gens_) {
                bool outside = false;
                for (std::size_t j = 0; j < n_; ++j)
                    if (g[j] && !(mask & (1ul << j)))
                        outside = true;
                if (!outside) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcountl(mask)));
        }
        return best;
    }

    friend bool operator==(const MonomialDiagram& a, const MonomialDiagram& b)
    {
        return a.n_ == b.n_ && a.gens_ == b.gens_;
    }
    friend bool operator<(const MonomialDiagram& a, const MonomialDiagram& b)
    {
        if (a.gens_.size() != b.gens_.size())
            return a.gens_.size() < b.gens_.size();
        for (std::size_t i = 0; i < a.gens_.size(); ++i) {
            auto ea = a.gens_[i].exponents(), eb = b.gens_[i].exponents();
            if (!std::equal(ea.begin(), ea.end(), eb.begin()))
                return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
        }
        return false;
    }

private:
    std::size_t n_ = 0;
    std::vector<Monomial> gens_;
};

inline MonomialDiagram leading_diagram(const IdealSlice& s)
{
    std::vector<Monomial> lts;
    for (const auto& q : s.basis)
        lts.push_back(q.leading_monomial());
    return MonomialDiagram(s.nvars(), std::move(lts));
}

struct DivisionStep {
    std::size_t basis_index;
    GaussianRational coefficient;
};

struct DivisionResult {
    Polynomial remainder;
    std::vector<DivisionStep> witness; // P = R + sum coefficient * basis[index]
};

/// Reduces P modulo the slice span. Because the basis is fully reduced, one
/// pass clears every pivot, and since the pivots of a degree-d slice are all
/// multiples of the diagram generators up to degree d, the remainder lives on
/// the staircase.
inline DivisionResult staircase_division(const Polynomial& P, const IdealSlice& s)
{
    if (P.nvars() != s.nvars())
        throw DimensionError("polynomial and slice in different dimensions");
    if (P.degree() > s.degree)
        throw DomainError("polynomial degree exceeds the slice degree");
    DivisionResult r{P, {}};
    for (std::size_t i = 0; i < s.basis.size(); ++i) {
        GaussianRational c = r.remainder.coefficient(s.basis[i].leading_monomial());
        if (c.is_zero())
            continue;
        r.remainder -= s.basis[i] * c;
        r.witness.push_back({i, c});
    }
    return r;
}

struct StabilityReport {
    std::vector<MonomialDiagram> diagrams;   // per sample
    std::vector<bool> singular;              // per sample
    MonomialDiagram generic;                 // most frequent diagram among non-singular samples
    std::vector<std::size_t> exceptional;    // samples whose diagram differs or that are singular
};

/// Leading diagram at each sample point; the generic diagram is the most
/// frequent one (ties go to the diagram met first in sample order).
inline StabilityReport diagram_stability_scan(const VectorField& xi,
                                              const std::vector<std::vector<GaussianRational>>& samples, int d,
                                              unsigned threads = 1)
{
    StabilityReport rep;
    rep.diagrams = parallel_map(samples.size(), threads, [&](std::size_t i) {
        return leading_diagram(ideal_slice(xi, samples[i], d));
    });
    for (const auto& s : samples)
        rep.singular.push_back(xi.is_singular(s));
    std::vector<std::pair<MonomialDiagram, std::size_t>> counts;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (rep.singular[i])
            continue;
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == rep.diagrams[i]; });
        if (it == counts.end())
            counts.emplace_back(rep.diagrams[i], 1);
        else
            ++it->second;
    }
    std::size_t best = 0;
    for (const auto& [dgm, c] : counts)
        if (c > best) {
            best = c;
            rep.generic = dgm;
        }
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (rep.singular[i] || !(rep.diagrams[i] == rep.generic))
            rep.exceptional.push_back(i);
    return rep;
}

} // namespace ztraj
