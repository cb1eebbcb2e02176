#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ztraj/core/factor.hpp"
#include "ztraj/core/linalg.hpp"
#include "ztraj/dynamics/vector_field.hpp"
#include "ztraj/util/parallel.hpp"

namespace ztraj {

/// xi f = K f with deg K <= m - 1.
struct InvariantCurve {
    Polynomial f;
    Polynomial K;
};

struct DarbouxOptions {
    unsigned max_curve_degree = 4;
    unsigned max_field_degree = 3;
    unsigned threads = 1;
};

struct DarbouxResult {
    std::vector<InvariantCurve> curves;
    bool partial = false;           // some branch of the search was not resolved
    std::vector<std::string> notes; // why, when partial
};

/// Invariant algebraic curves guaranteeing a rational first integral.
inline unsigned long jouanolou_threshold(unsigned m) { return 2 + static_cast<unsigned long>(m) * (m + 1) / 2; }

namespace detail {

inline std::vector<Monomial> binary_monomials(int d)
{
    std::vector<Monomial> out;
    for (int a = d; a >= 0; --a)
        out.push_back(Monomial({static_cast<unsigned>(a), static_cast<unsigned>(d - a)}));
    return out;
}

inline Polynomial combine(const std::vector<Monomial>& mons, const std::vector<GaussianRational>& c, std::size_t offset = 0)
{
    Polynomial p(2);
    for (std::size_t i = 0; i < mons.size(); ++i)
        p.add_term(mons[i], c[offset + i]);
    return p;
}

/// P_k d/dx + Q_k d/dy applied to f.
inline Polynomial apply_part(const Polynomial& Pk, const Polynomial& Qk, const Polynomial& f)
{
    return Pk * f.derivative(0) + Qk * f.derivative(1);
}

class DarbouxSearch {
public:
    DarbouxSearch(const VectorField& xi, unsigned N) : xi_(xi), N_(N), m_(static_cast<unsigned>(xi.delta()))
    {
        for (unsigned k = 0; k <= m_; ++k) {
            P_.push_back(xi[0].homogeneous_part(k));
            Q_.push_back(xi[1].homogeneous_part(k));
        }
    }

    unsigned m() const { return m_; }

    /// {f : deg f <= N, xi f = K f} as a basis, constants included.
    std::vector<Polynomial> kernel_for(const Polynomial& K) const
    {
        auto cols = monomials_up_to(2, N_);
        auto rows = monomials_up_to(2, N_ + std::max(m_, 1u));
        std::map<Monomial, std::size_t, DeglexGreater> index;
        for (std::size_t i = 0; i < rows.size(); ++i)
            index.emplace(rows[i], i);
        Matrix L(rows.size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            Polynomial mono = Polynomial::monomial(cols[j]);
            Polynomial img = lie_derivative(xi_, mono) - K * mono;
            for (const auto& [mon, c] : img.terms())
                L(index.at(mon), j) = c;
        }
        std::vector<Polynomial> out;
        for (const auto& v : kernel(L))
            out.push_back(combine(cols, v));
        return out;
    }

    struct Branch {
        std::vector<Polynomial> cofactors;
        std::vector<std::string> notes;
    };

    /// Candidate cofactors from curves whose top-degree part has degree n.
    Branch candidates(unsigned n) const
    {
        Branch out;
        if (m_ == 0) {
            out.cofactors.push_back(Polynomial(2));
            return out;
        }
        Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
        Polynomial E = x * Q_[m_] - y * P_[m_];
        if (E.is_zero()) {
            // radial top part h (x d/dx + y d/dy): every top form of degree n
            // is invariant with cofactor n h
            Polynomial h = P_[m_].divide_exact(x);
            if (m_ == 1) {
                out.cofactors.push_back(GaussianRational(static_cast<long>(n)) * h);
                return out;
            }
            out.notes.push_back("radial top-degree part with m >= 2 at curve degree " + std::to_string(n));
            return out;
        }
        auto lines = invariant_factors(E, out.notes);
        std::vector<unsigned> deg;
        for (const auto& g : lines)
            deg.push_back(static_cast<unsigned>(g.first.degree()));
        // exponent vectors with sum e_i deg g_i = n
        std::vector<unsigned> e(lines.size(), 0);
        std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
            if (i == lines.size()) {
                if (left != 0)
                    return;
                Polynomial fn = Polynomial::constant(2, GaussianRational(1));
                Polynomial Ktop(2);
                for (std::size_t k = 0; k < lines.size(); ++k) {
                    fn *= lines[k].first.pow(e[k]);
                    Ktop += GaussianRational(static_cast<long>(e[k])) * lines[k].second;
                }
                descend(n, fn, Ktop, out);
                return;
            }
            for (unsigned k = 0; k * deg[i] <= left; ++k) {
                e[i] = k;
                rec(i + 1, left - k * deg[i]);
            }
            e[i] = 0;
        };
        rec(0, n);
        return out;
    }

private:
    /// Irreducible factors of the binary form E with their cofactors under the
    /// top-degree part of xi.
    std::vector<std::pair<Polynomial, Polynomial>> invariant_factors(const Polynomial& E, std::vector<std::string>& notes) const
    {
        int d = E.degree();
        std::vector<GaussianRational> ec(static_cast<std::size_t>(d) + 1);
        for (const auto& [mon, c] : E.terms())
            ec[mon[0]] = c;
        UPoly e(ec);
        std::vector<Polynomial> forms;
        if (e.degree() < d)
            forms.push_back(Polynomial::variable(2, 1));
        auto fac = irreducible_factors(e);
        if (!fac.complete)
            notes.push_back("incomplete factorization of the tangent-line form");
        for (const auto& g : fac.factors) {
            Polynomial G(2);
            for (int k = 0; k <= g.degree(); ++k)
                G.add_term(Monomial({static_cast<unsigned>(k), static_cast<unsigned>(g.degree() - k)}),
                           g[static_cast<std::size_t>(k)]);
            forms.push_back(G);
        }
        std::vector<std::pair<Polynomial, Polynomial>> out;
        for (const auto& G : forms) {
            try {
                out.emplace_back(G, apply_part(P_[m_], Q_[m_], G).divide_exact(G));
            } catch (const DomainError&) {
                notes.push_back("factor of the tangent-line form is not invariant");
            }
        }
        return out;
    }

    /// Solves the homogeneous levels j = 1..m-1 for the lower parts of f and
    /// K. Each level is linear once the higher parts are known.
    void descend(unsigned n, const Polynomial& fn, const Polynomial& Ktop, Branch& out) const
    {
        std::vector<Polynomial> f{fn}, K{Ktop}; // f[b] = f_{n-b}, K[a] = K_{m-1-a}
        for (unsigned j = 1; j + 1 <= m_; ++j) {
            int fd = static_cast<int>(n) - static_cast<int>(j), kd = static_cast<int>(m_) - 1 - static_cast<int>(j);
            auto fm = fd >= 0 ? binary_monomials(fd) : std::vector<Monomial>{};
            auto km = binary_monomials(kd);
            auto rows = binary_monomials(static_cast<int>(n + m_) - 1 - static_cast<int>(j));
            std::map<Monomial, std::size_t, DeglexGreater> index;
            for (std::size_t i = 0; i < rows.size(); ++i)
                index.emplace(rows[i], i);
            std::size_t nu = fm.size() + km.size();
            Matrix M(rows.size(), nu + 1);
            auto put = [&](const Polynomial& p, std::size_t col, const GaussianRational& s) {
                for (const auto& [mon, c] : p.terms())
                    M(index.at(mon), col) += s * c;
            };
            for (std::size_t i = 0; i < fm.size(); ++i) {
                Polynomial g = Polynomial::monomial(fm[i]);
                put(apply_part(P_[m_], Q_[m_], g) - Ktop * g, i, GaussianRational(1));
            }
            for (std::size_t i = 0; i < km.size(); ++i)
                put(-(Polynomial::monomial(km[i]) * fn), fm.size() + i, GaussianRational(1));
            // known terms go to the right-hand side
            Polynomial known(2);
            for (unsigned a = 0; a <= j; ++a) {
                unsigned b = j - a;
                if (b == j || b >= f.size())
                    continue;
                if (a <= m_)
                    known += apply_part(P_[m_ - a], Q_[m_ - a], f[b]);
                if (a < j && a < K.size())
                    known -= K[a] * f[b];
            }
            put(known, nu, GaussianRational(-1));
            auto r = rref(M);
            if (!r.pivots.empty() && r.pivots.back() == nu)
                return; // inconsistent: no curve on this branch
            if (r.pivots.size() < nu) {
                out.notes.push_back("underdetermined cofactor level " + std::to_string(j) + " at curve degree " +
                                    std::to_string(n));
                return;
            }
            std::vector<GaussianRational> u(nu);
            for (std::size_t i = 0; i < r.pivots.size(); ++i)
                u[r.pivots[i]] = r.reduced(i, nu);
            f.push_back(combine(fm, u));
            K.push_back(combine(km, u, fm.size()));
        }
        Polynomial total(2);
        for (const auto& k : K)
            total += k;
        out.cofactors.push_back(total);
    }

    const VectorField& xi_;
    unsigned N_;
    unsigned m_;
    std::vector<Polynomial> P_, Q_;
};

inline Polynomial normalized(const Polynomial& f) { return f.leading_coefficient().inverse() * f; }

} // namespace detail

/// Invariant algebraic curves of a planar field up to degree N, grouped by
/// cofactor: for each cofactor K that occurs, a basis of the nonconstant
/// solutions of xi f = K f, each normalized to leading coefficient 1.
inline DarbouxResult darboux_curves(const VectorField& xi, unsigned N, const DarbouxOptions& opt = {})
{
    if (xi.dim() != 2)
        throw DimensionError("darboux_curves needs a planar field");
    if (N < 1)
        throw DomainError("darboux_curves needs N >= 1");
    DarbouxResult out;
    if (static_cast<unsigned>(xi.delta()) > opt.max_field_degree) {
        out.partial = true;
        out.notes.push_back("field degree above the search cap");
        return out;
    }
    if (N > opt.max_curve_degree) {
        out.partial = true;
        out.notes.push_back("curve degree truncated to the search cap");
        N = opt.max_curve_degree;
    }
    detail::DarbouxSearch search(xi, N);
    auto branches = parallel_map(N, opt.threads, [&](std::size_t i) { return search.candidates(static_cast<unsigned>(i + 1)); });
    std::vector<Polynomial> cofactors;
    for (const auto& b : branches) {
        for (const auto& K : b.cofactors)
            if (std::find(cofactors.begin(), cofactors.end(), K) == cofactors.end())
                cofactors.push_back(K);
        for (const auto& note : b.notes)
            out.notes.push_back(note);
    }
    out.partial = out.partial || !out.notes.empty();
    for (const auto& K : cofactors)
        for (const auto& f : search.kernel_for(K)) {
            if (f.is_constant())
                continue;
            InvariantCurve c{detail::normalized(f), K};
            if (!(lie_derivative(xi, c.f) == c.K * c.f))
                throw CertificationError("invariant curve fails xi f = K f");
            out.curves.push_back(std::move(c));
        }
    std::sort(out.curves.begin(), out.curves.end(), [](const InvariantCurve& a, const InvariantCurve& b) {
        if (a.f.degree() != b.f.degree())
            return a.f.degree() < b.f.degree();
        return to_string(a.f, {"x", "y"}) < to_string(b.f, {"x", "y"});
    });
    return out;
}

struct FirstIntegral {
    Polynomial num;
    Polynomial den;
    std::vector<long> exponents; // lambda_i, one per input curve
};

/// R = prod f_i^lambda_i with sum lambda_i K_i = 0 and lambda integral,
/// verified by xi R = 0. A curve with K = 0 is its own first integral.
inline std::optional<FirstIntegral> first_integral_from_curves(const VectorField& xi, const std::vector<InvariantCurve>& curves)
{
    if (curves.empty())
        throw DomainError("first_integral_from_curves needs at least one curve");
    auto verified = [&](FirstIntegral R) -> std::optional<FirstIntegral> {
        if (R.num.is_constant() && R.den.is_constant())
            return std::nullopt;
        Polynomial w = lie_derivative(xi, R.num) * R.den - R.num * lie_derivative(xi, R.den);
        if (!w.is_zero())
            throw CertificationError("first integral fails xi R = 0");
        return R;
    };
    for (std::size_t i = 0; i < curves.size(); ++i)
        if (curves[i].K.is_zero() && !curves[i].f.is_constant()) {
            std::vector<long> lam(curves.size(), 0);
            lam[i] = 1;
            return verified({curves[i].f, Polynomial::constant(2, GaussianRational(1)), lam});
        }
    // columns: curves; rows: cofactor monomials
    std::map<Monomial, std::size_t, DeglexGreater> index;
    for (const auto& c : curves)
        for (const auto& [mon, a] : c.K.terms())
            index.emplace(mon, index.size());
    Matrix M(index.size(), curves.size());
    for (std::size_t j = 0; j < curves.size(); ++j)
        for (const auto& [mon, a] : curves[j].K.terms())
            M(index.at(mon), j) = a;
    for (const auto& v : kernel(M)) {
        // the exponents must be real rationals up to a common factor
        bool real = true;
        Integer l = 1;
        for (const auto& a : v) {
            real = real && a.is_real();
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.re().get_den_mpz_t());
        }
        if (!real)
            continue;
        // first nonzero exponent positive
        for (const auto& a : v)
            if (!a.is_zero()) {
                if (sgn(a.re()) < 0)
                    l = -l;
                break;
            }
        FirstIntegral R{Polynomial::constant(2, GaussianRational(1)), Polynomial::constant(2, GaussianRational(1)), {}};
        for (std::size_t j = 0; j < curves.size(); ++j) {
            Rational e = v[j].re() * l;
            long k = Integer(e).get_si();
            R.exponents.push_back(k);
            if (k > 0)
                R.num *= curves[j].f.pow(static_cast<unsigned>(k));
            else if (k < 0)
                R.den *= curves[j].f.pow(static_cast<unsigned>(-k));
        }
        if (auto r = verified(R))
            return r;
    }
    return std::nullopt;
}

} // namespace ztraj
