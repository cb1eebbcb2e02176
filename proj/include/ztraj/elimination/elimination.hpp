#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ztraj/core/linalg.hpp"
#include "ztraj/orbit/orbit_ideal.hpp"
#include "ztraj/util/rng.hpp"

namespace ztraj {

/// T^D_d: rows are the staircase monomials x^alpha of degree <= d, columns the
/// derivative orders 0..mu; entry (alpha, k) is xi^k x^alpha.
struct EliminationMatrix {
    VectorField field;
    MonomialDiagram diagram;
    int degree = 0;
    unsigned long mu = 0;
    std::vector<Monomial> rows;
    /// Symbolic entries; empty when the matrix was built for evaluation only.
    std::vector<std::vector<Polynomial>> entries;

    std::size_t rho() const { return rows.size(); }
    bool has_symbolic_entries() const { return !entries.empty(); }
};

inline EliminationMatrix build_elimination_matrix(const VectorField& xi, const MonomialDiagram& diagram, int d,
                                                  unsigned long mu, bool symbolic = true)
{
    if (diagram.nvars() != xi.dim())
        throw DimensionError("diagram and field in different dimensions");
    EliminationMatrix m{xi, diagram, d, mu, diagram.staircase(d), {}};
    if (mu <= m.rho())
        throw DomainError("elimination matrix needs mu > rho(d) (mu = " + std::to_string(mu) +
                          ", rho = " + std::to_string(m.rho()) + ")");
    if (symbolic)
        for (const auto& a : m.rows)
            m.entries.push_back(iterated_lie(xi, Polynomial::monomial(a), static_cast<unsigned>(mu)));
    return m;
}

/// Degree and height of one symbolic mu-elimination minor.
struct MinorProfile {
    std::vector<std::size_t> columns;
    int degree;     // -1 for the zero minor
    double height;  // NaN for the zero minor
};

inline MinorProfile symbolic_minor(const EliminationMatrix& m, const std::vector<std::size_t>& cols)
{
    if (!m.has_symbolic_entries())
        throw DomainError("matrix was built without symbolic entries");
    if (cols.size() != m.rho())
        throw DimensionError("a top minor needs rho columns");
    PolyMatrix a;
    for (std::size_t i = 0; i < m.rho(); ++i) {
        std::vector<Polynomial> row;
        for (auto c : cols)
            row.push_back(m.entries[i].at(c));
        a.push_back(std::move(row));
    }
    Polynomial M = det_poly_matrix(std::move(a));
    return {cols, M.degree(), M.is_zero() ? std::nan("") : height(M)};
}

/// k! -> (xi^k x^alpha)(p) values, rows x columns.
struct EvaluatedElimination {
    std::vector<GaussianRational> point;
    Matrix values; // rho x (mu + 1)
};

/// Exact values at p. Uses the Taylor series of the trajectory through p
/// ((xi^k Q)(p) = k! [z^k] Q(phi)), or the symbolic entries when asked to.
inline EvaluatedElimination evaluate_elimination(const EliminationMatrix& m, const std::vector<GaussianRational>& p,
                                                 bool use_symbolic = false)
{
    EvaluatedElimination ev{p, Matrix(m.rho(), m.mu + 1)};
    if (use_symbolic) {
        for (std::size_t i = 0; i < m.rho(); ++i)
            for (unsigned long k = 0; k <= m.mu; ++k)
                ev.values(i, k) = m.entries.at(i).at(k).evaluate(p);
        return ev;
    }
    SeriesEngine eng(m.field, p);
    std::vector<std::size_t> handles;
    for (const auto& a : m.rows)
        handles.push_back(eng.track(Polynomial::monomial(a)));
    GaussianRational fact(1);
    for (unsigned long k = 0; k <= m.mu; ++k) {
        if (k > 0)
            fact *= GaussianRational(static_cast<long>(k));
        for (std::size_t i = 0; i < m.rho(); ++i)
            ev.values(i, k) = fact * eng.coefficient(handles[i], k);
    }
    return ev;
}

/// Ball values at a ball point (symbolic entries required).
inline std::vector<std::vector<ComplexBall>> evaluate_elimination(const EliminationMatrix& m,
                                                                  const std::vector<ComplexBall>& p,
                                                                  mpfr_prec_t prec)
{
    if (!m.has_symbolic_entries())
        throw DomainError("ball evaluation needs symbolic entries");
    std::vector<std::vector<ComplexBall>> v(m.rho());
    for (std::size_t i = 0; i < m.rho(); ++i)
        for (unsigned long k = 0; k <= m.mu; ++k)
            v[i].push_back(evaluate(m.entries[i][k], std::span<const ComplexBall>(p), prec));
    return v;
}

enum class MinorStrategy { Automatic, Exhaustive, Greedy };

struct MinorCertificate {
    std::vector<std::size_t> columns;     // chosen derivative orders, ascending
    std::optional<GaussianRational> exact; // M(p) when p is exact
    std::optional<ComplexBall> ball;       // M(p) enclosure in ball mode
    double log_abs_value = 0;              // log |M(p)| (lower bound in ball mode)
    std::string strategy;
    std::size_t minors_examined = 0;
    std::optional<std::size_t> best_index; // k of the derivative bound, once computed
};

struct AllMinorsZero {
    /// Nonzero P supported on the staircase with xi^k P(p) = 0 for k <= mu.
    Polynomial witness;
};

struct Indeterminate {
    std::string reason;
};

using MinorResult = std::variant<MinorCertificate, AllMinorsZero, Indeterminate>;

/// Default cap on the number of top minors enumerated exhaustively.
inline constexpr double kExhaustiveMinorCap = 1e4;

inline double binomial_double(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0;
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

namespace detail {

inline bool next_combination(std::vector<std::size_t>& c, std::size_t n)
{
    std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j)
                c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline Matrix columns_of(const Matrix& v, const std::vector<std::size_t>& cols)
{
    std::vector<std::size_t> rows(v.rows());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = i;
    return v.submatrix(rows, cols);
}

/// Greedy complete-pivoting column choice, optionally forcing the first column.
inline std::vector<std::size_t> greedy_columns(const Matrix& v, std::optional<std::size_t> first)
{
    Matrix a = v;
    std::size_t rho = a.rows(), cols = a.cols();
    std::vector<bool> used(cols, false);
    std::vector<std::size_t> chosen;
    for (std::size_t step = 0; step < rho; ++step) {
        std::size_t bi = rho, bj = cols;
        Rational best = -1;
        for (std::size_t j = 0; j < cols; ++j) {
            if (used[j] || (step == 0 && first && j != *first))
                continue;
            for (std::size_t i = step; i < rho; ++i) {
                Rational nrm = a(i, j).norm();
                if (nrm > best) {
                    best = nrm;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bj == cols || sgn(best) <= 0)
            return {};
        used[bj] = true;
        chosen.push_back(bj);
        a.swap_rows(step, bi);
        GaussianRational inv = a(step, bj).inverse();
        for (std::size_t i = step + 1; i < rho; ++i) {
            if (a(i, bj).is_zero())
                continue;
            GaussianRational f = a(i, bj) * inv;
            for (std::size_t j = 0; j < cols; ++j)
                if (!a(step, j).is_zero())
                    a(i, j) -= f * a(step, j);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline double log_abs_or_neg_inf(const GaussianRational& z)
{
    return z.is_zero() ? -std::numeric_limits<double>::infinity() : z.log_abs();
}

} // namespace detail

/// Largest top minor |M(p)| of the evaluated matrix. Exhaustive enumeration
/// when C(mu+1, rho) <= cap (ties: lexicographically smallest column set),
/// otherwise greedy complete pivoting plus seeded restarts. If the rank is
/// below rho every top minor vanishes and a left-kernel witness is returned.
inline MinorResult max_minor_at_point(const EvaluatedElimination& ev, MinorStrategy strategy = MinorStrategy::Automatic,
                                      std::uint64_t seed = 1, unsigned restarts = 8, unsigned threads = 1,
                                      double cap = kExhaustiveMinorCap)
{
    const Matrix& v = ev.values;
    std::size_t rho = v.rows(), cols = v.cols();
    // rank test doubles as the exact "all zero" certificate
    Matrix vt = v.transpose();
    auto left = kernel(vt);
    if (!left.empty())
        return AllMinorsZero{Polynomial()}; // witness filled in by the overload that knows the rows
    bool exhaustive = strategy == MinorStrategy::Exhaustive ||
                      (strategy == MinorStrategy::Automatic && binomial_double(cols, rho) <= cap);
    MinorCertificate best;
    best.log_abs_value = -std::numeric_limits<double>::infinity();
    Rational best_norm = -1;
    if (exhaustive) {
        std::vector<std::vector<std::size_t>> subsets;
        std::vector<std::size_t> c(rho);
        for (std::size_t i = 0; i < rho; ++i)
            c[i] = i;
        do {
            subsets.push_back(c);
        } while (detail::next_combination(c, cols));
        auto dets = parallel_map(subsets.size(), threads,
                                 [&](std::size_t i) { return determinant(detail::columns_of(v, subsets[i])); });
        for (std::size_t i = 0; i < subsets.size(); ++i) {
            Rational nrm = dets[i].norm();
            if (nrm > best_norm) {
                best_norm = nrm;
                best.columns = subsets[i];
                best.exact = dets[i];
            }
        }
        best.strategy = "exhaustive";
        best.minors_examined = subsets.size();
    } else {
        std::vector<std::optional<std::size_t>> starts{std::nullopt};
        Rng rng(seed);
        for (unsigned r = 0; r < restarts; ++r)
            starts.push_back(static_cast<std::size_t>(rng.uniform(0, static_cast<long>(cols) - 1)));
        auto picks = parallel_map(starts.size(), threads, [&](std::size_t i) {
            auto cset = detail::greedy_columns(v, starts[i]);
            GaussianRational det = cset.empty() ? GaussianRational() : determinant(detail::columns_of(v, cset));
            return std::make_pair(cset, det);
        });
        for (const auto& [cset, det] : picks) {
            if (cset.empty())
                continue;
            Rational nrm = det.norm();
            if (nrm > best_norm || (nrm == best_norm && cset < best.columns)) {
                best_norm = nrm;
                best.columns = cset;
                best.exact = det;
            }
        }
        best.strategy = "greedy";
        best.minors_examined = starts.size();
    }
    if (!best.exact || best.exact->is_zero())
        return Indeterminate{"no nonzero minor found although the rank is full"};
    best.log_abs_value = best.exact->log_abs();
    return best;
}

/// Same, mapping the left-kernel witness to a polynomial on the staircase.
inline MinorResult max_minor_at_point(const EliminationMatrix& m, const EvaluatedElimination& ev,
                                      MinorStrategy strategy = MinorStrategy::Automatic, std::uint64_t seed = 1,
                                      unsigned restarts = 8, unsigned threads = 1,
                                      double cap = kExhaustiveMinorCap)
{
    MinorResult r = max_minor_at_point(ev, strategy, seed, restarts, threads, cap);
    if (std::holds_alternative<AllMinorsZero>(r)) {
        auto left = kernel(ev.values.transpose());
        Polynomial w(m.field.dim());
        for (std::size_t i = 0; i < m.rho(); ++i)
            w.add_term(m.rows[i], left.front()[i]);
        return AllMinorsZero{w};
    }
    return r;
}

/// Ball mode: a minor is certified only when its enclosure excludes zero.
inline MinorResult max_minor_at_point(const std::vector<std::vector<ComplexBall>>& v, std::uint64_t seed = 1,
                                      unsigned restarts = 8)
{
    std::size_t rho = v.size(), cols = rho ? v[0].size() : 0;
    auto ball_det = [&](const std::vector<std::size_t>& cs) {
        std::vector<std::vector<ComplexBall>> a(rho);
        for (std::size_t i = 0; i < rho; ++i)
            for (auto c : cs)
                a[i].push_back(v[i][c]);
        mpfr_prec_t prec = v[0][0].prec();
        ComplexBall det = ComplexBall::exact(GaussianRational(1), prec);
        for (std::size_t k = 0; k < rho; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < rho; ++i)
                if (a[i][k].abs_lower() > a[piv][k].abs_lower())
                    piv = i;
            if (a[piv][k].contains_zero())
                return std::optional<ComplexBall>();
            if (piv != k) {
                std::swap(a[piv], a[k]);
                det = -det;
            }
            det = det * a[k][k];
            ComplexBall inv = a[k][k].inverse();
            for (std::size_t i = k + 1; i < rho; ++i) {
                ComplexBall f = a[i][k] * inv;
                for (std::size_t j = k; j < rho; ++j)
                    a[i][j] = a[i][j] - f * a[k][j];
            }
        }
        return std::optional<ComplexBall>(det);
    };
    // greedy on midpoints
    std::vector<std::vector<std::size_t>> candidates;
    {
        Matrix mid(rho, cols);
        for (std::size_t i = 0; i < rho; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                auto z = v[i][j].mid();
                // rational image of the double midpoint, only used for pivot choice
                mid(i, j) = GaussianRational(Rational(z.real()), Rational(z.imag()));
            }
        candidates.push_back(detail::greedy_columns(mid, std::nullopt));
        Rng rng(seed);
        for (unsigned r = 0; r < restarts; ++r)
            candidates.push_back(
                detail::greedy_columns(mid, static_cast<std::size_t>(rng.uniform(0, static_cast<long>(cols) - 1))));
    }
    MinorCertificate best;
    best.log_abs_value = -std::numeric_limits<double>::infinity();
    for (const auto& cs : candidates) {
        if (cs.empty())
            continue;
        auto d = ball_det(cs);
        if (!d || d->contains_zero())
            continue;
        double lo = std::log(d->abs_lower());
        if (lo > best.log_abs_value) {
            best.log_abs_value = lo;
            best.columns = cs;
            best.ball = *d;
        }
    }
    best.strategy = "ball-greedy";
    best.minors_examined = candidates.size();
    if (!best.ball)
        return Indeterminate{"no minor enclosure excludes zero; ball mode cannot certify that all minors vanish"};
    return best;
}

struct DerivativeBoundReport {
    std::size_t k = 0;            // argmax_k |xi^k P(p)| (smallest on ties)
    GaussianRational value;       // xi^k P(p)
    double log_value = 0;         // log |xi^k P(p)|
    double log_norm = 0;          // log ||P|| (L2)
    double log_epsilon = 0;       // log |M(p)|
    double scale = 0;             // d^kappa mu (log mu + log+ ||p||)
    double needed_c = 0;          // smallest c making the inequality hold
    std::optional<double> c;      // constant the inequality was checked against
    bool holds = true;
};

/// Checks log|xi^k P(p)| >= log||P|| + log eps - c d^kappa mu (log mu + log+||p||)
/// at the maximizing k.
inline DerivativeBoundReport derivative_lower_bound(const EliminationMatrix& m, const EvaluatedElimination& ev,
                                                    const MinorCertificate& cert, const Polynomial& P,
                                                    std::optional<double> c = std::nullopt)
{
    if (P.is_zero())
        throw DomainError("derivative lower bound of the zero polynomial");
    std::vector<GaussianRational> coef(m.rho());
    for (const auto& [mono, a] : P.terms()) {
        auto it = std::find(m.rows.begin(), m.rows.end(), mono);
        if (it == m.rows.end())
            throw DomainError("polynomial is not supported on the staircase");
        coef[static_cast<std::size_t>(it - m.rows.begin())] = a;
    }
    DerivativeBoundReport r;
    Rational best = -1;
    for (unsigned long k = 0; k <= m.mu; ++k) {
        GaussianRational s;
        for (std::size_t i = 0; i < m.rho(); ++i)
            if (!coef[i].is_zero())
                s += coef[i] * ev.values(i, k);
        Rational nrm = s.norm();
        if (nrm > best) {
            best = nrm;
            r.k = k;
            r.value = s;
        }
    }
    r.log_value = detail::log_abs_or_neg_inf(r.value);
    r.log_norm = log_l2_norm(P);
    r.log_epsilon = cert.log_abs_value;
    double dk = std::pow(static_cast<double>(std::max(m.degree, 1)), static_cast<double>(m.diagram.kappa()));
    double mu = static_cast<double>(m.mu);
    r.scale = dk * mu * (std::log(mu) + std::max(0.0, std::log(std::max(sup_norm(ev.point), 1e-300))));
    r.needed_c = std::max(0.0, (r.log_norm + r.log_epsilon - r.log_value) / r.scale);
    r.c = c;
    r.holds = !c || r.needed_c <= *c;
    return r;
}

enum class PipelineStatus { Ok, Degenerate, AllMinorsZero, Indeterminate };

struct LowerBoundReport {
    PipelineStatus status = PipelineStatus::Ok;
    std::string diagnostics;
    IdealSlice slice;
    MonomialDiagram diagram;
    Polynomial remainder;
    unsigned long mu = 0;
    std::size_t rho = 0;
    std::optional<MinorCertificate> certificate;
    std::optional<DerivativeBoundReport> bound;
    std::optional<Polynomial> kernel_witness;
    double log_gap = 0;    // log||R|| - log|xi^k R(p)|
    double envelope = 0;   // d^(2 kappa (m+1)) log d (0 for d = 1)
    double k_over_dkappa = 0;
};

struct LowerBoundOptions {
    std::optional<unsigned long> mu;
    MinorStrategy strategy = MinorStrategy::Automatic;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::optional<double> c;
};

/// The derivative lower-bound pipeline: slice -> diagram -> division -> matrix
/// -> minor certificate -> bound for the reduced remainder R.
inline LowerBoundReport universal_lower_bound(const VectorField& xi, const std::vector<GaussianRational>& p,
                                              const Polynomial& P, int d, const LowerBoundOptions& opt = {})
{
    if (xi.is_singular(p))
        throw DomainError("base point is a singular point of the field");
    LowerBoundReport rep;
    rep.slice = ideal_slice(xi, p, d);
    rep.diagram = leading_diagram(rep.slice);
    rep.remainder = staircase_division(P, rep.slice).remainder;
    std::size_t rho = rep.diagram.rho(d);
    rep.rho = rho;
    rep.mu = std::max<unsigned long>(opt.mu ? *opt.mu : orbit_nu(xi, d), rho + 1);
    double kappa = static_cast<double>(rep.diagram.kappa());
    double m = static_cast<double>(xi.dim());
    rep.envelope = d >= 2 ? std::pow(d, 2 * kappa * (m + 1)) * std::log(d) : 0.0;
    if (rep.remainder.is_zero()) {
        rep.status = PipelineStatus::Degenerate;
        rep.diagnostics = "P vanishes on the orbit closure (remainder R = 0)";
        return rep;
    }
    EliminationMatrix mat = build_elimination_matrix(xi, rep.diagram, d, rep.mu, false);
    EvaluatedElimination ev = evaluate_elimination(mat, p);
    MinorResult mr = max_minor_at_point(mat, ev, opt.strategy, opt.seed, 8, opt.threads);
    if (auto* z = std::get_if<AllMinorsZero>(&mr)) {
        rep.status = PipelineStatus::AllMinorsZero;
        rep.kernel_witness = z->witness;
        rep.diagnostics = "all mu-elimination minors vanish at p: the point lies in an exceptional stratum";
        return rep;
    }
    if (auto* u = std::get_if<Indeterminate>(&mr)) {
        rep.status = PipelineStatus::Indeterminate;
        rep.diagnostics = u->reason;
        return rep;
    }
    rep.certificate = std::get<MinorCertificate>(mr);
    rep.bound = derivative_lower_bound(mat, ev, *rep.certificate, rep.remainder, opt.c);
    rep.certificate->best_index = rep.bound->k;
    rep.log_gap = rep.bound->log_norm - rep.bound->log_value;
    rep.k_over_dkappa = static_cast<double>(rep.bound->k) / std::pow(static_cast<double>(d), kappa);
    return rep;
}

} // namespace ztraj
