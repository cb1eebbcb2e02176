#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ztraj/core/error.hpp"

namespace ztraj {

/// Exponent vector x^alpha. Variable order for deglex is x1 > x2 > ... > xn.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
    Monomial(std::initializer_list<unsigned> e) : exps_(e) { recompute(); }
    explicit Monomial(std::vector<unsigned> e) : exps_(std::move(e)) { recompute(); }

    static Monomial variable(std::size_t nvars, std::size_t j, unsigned power = 1)
    {
        Monomial m(nvars);
        m.exps_.at(j) = power;
        m.degree_ = power;
        return m;
    }

    std::size_t nvars() const { return exps_.size(); }
    unsigned degree() const { return degree_; }
    unsigned operator[](std::size_t j) const { return exps_[j]; }
    std::span<const unsigned> exponents() const { return exps_; }
    bool is_one() const { return degree_ == 0; }

    Monomial operator*(const Monomial& o) const
    {
        check_same(o);
        Monomial r(*this);
        for (std::size_t j = 0; j < exps_.size(); ++j)
            r.exps_[j] += o.exps_[j];
        r.degree_ += o.degree_;
        return r;
    }

    bool divides(const Monomial& o) const
    {
        check_same(o);
        for (std::size_t j = 0; j < exps_.size(); ++j)
            if (exps_[j] > o.exps_[j])
                return false;
        return true;
    }

    /// o / *this, assuming divides(o).
    Monomial quotient_of(const Monomial& o) const
    {
        Monomial r(o);
        for (std::size_t j = 0; j < exps_.size(); ++j)
            r.exps_[j] -= exps_[j];
        r.degree_ -= degree_;
        return r;
    }

    Monomial lcm(const Monomial& o) const
    {
        check_same(o);
        Monomial r(*this);
        for (std::size_t j = 0; j < exps_.size(); ++j)
            r.exps_[j] = std::max(exps_[j], o.exps_[j]);
        r.recompute();
        return r;
    }

    /// Monomial with exponent of x_j lowered by one; requires exps[j] > 0.
    Monomial lowered(std::size_t j) const
    {
        Monomial r(*this);
        --r.exps_.at(j);
        --r.degree_;
        return r;
    }

    /// Index of the last variable with a positive exponent.
    std::optional<std::size_t> last_variable() const
    {
        for (std::size_t j = exps_.size(); j-- > 0;)
            if (exps_[j] > 0)
                return j;
        return std::nullopt;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

    /// Degree-lexicographic three-way comparison.
    friend int deglex_compare(const Monomial& a, const Monomial& b)
    {
        if (a.degree_ != b.degree_)
            return a.degree_ < b.degree_ ? -1 : 1;
        for (std::size_t j = 0; j < a.exps_.size(); ++j)
            if (a.exps_[j] != b.exps_[j])
                return a.exps_[j] < b.exps_[j] ? -1 : 1;
        return 0;
    }

private:
    void recompute() { degree_ = std::accumulate(exps_.begin(), exps_.end(), 0u); }
    void check_same(const Monomial& o) const
    {
        if (o.exps_.size() != exps_.size())
            throw DimensionError("monomials in different numbers of variables");
    }

    std::vector<unsigned> exps_;
    unsigned degree_ = 0;
};

/// Strict "a precedes b" in descending deglex order (largest first).
struct DeglexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return deglex_compare(a, b) > 0; }
};

struct DeglexLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return deglex_compare(a, b) < 0; }
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const
    {
        std::size_t h = 1469598103934665603ull;
        for (unsigned e : m.exponents())
            h = (h ^ e) * 1099511628211ull;
        return h;
    }
};

/// All monomials of total degree <= d in n variables, in ascending deglex order.
inline std::vector<Monomial> monomials_up_to(std::size_t n, unsigned d)
{
    std::vector<Monomial> out;
    std::vector<unsigned> e(n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t j, unsigned left) {
        if (j + 1 == n) {
            for (unsigned k = 0; k <= left; ++k) {
                e[j] = k;
                out.emplace_back(e);
            }
            e[j] = 0;
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            e[j] = k;
            rec(j + 1, left - k);
        }
        e[j] = 0;
    };
    if (n == 0) {
        out.emplace_back(std::vector<unsigned>{});
        return out;
    }
    rec(0, d);
    std::sort(out.begin(), out.end(), DeglexLess{});
    return out;
}

/// Graded order used for staircase rows: degree ascending, and within a degree
/// the deglex-larger monomial first (1, x1, x2, x1^2, x1 x2, ...).
struct GradedRowOrder {
    bool operator()(const Monomial& a, const Monomial& b) const
    {
        if (a.degree() != b.degree())
            return a.degree() < b.degree();
        return deglex_compare(a, b) > 0;
    }
};

} // namespace ztraj
