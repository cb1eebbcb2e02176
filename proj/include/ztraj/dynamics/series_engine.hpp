#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "ztraj/core/series.hpp"
#include "ztraj/dynamics/vector_field.hpp"

namespace ztraj {

/// Incremental Taylor expansion of the solution of x' = xi(x), x(0) = p, and of
/// P(x(z)) for registered polynomials P.
///
/// Every monomial m != 1 is attached to the parent m / x_j (j the last
/// variable of m), so [z^k] m(x) = sum_l [z^l] parent(x) [z^(k-l)] x_j. The
/// coordinate recursion is x_i[k+1] = [z^k] xi_i(x) / (k + 1).
class SeriesEngine {
public:
    SeriesEngine(const VectorField& xi, std::vector<GaussianRational> p) : n_(xi.dim()), xi_(xi)
    {
        if (p.size() != n_)
            throw DimensionError("base point has wrong dimension");
        coords_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            coords_[i].push_back(std::move(p[i]));
        level_ = 1;
        node_of(Monomial(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            std::vector<std::size_t> idx;
            std::vector<GaussianRational> cs;
            for (const auto& [m, c] : xi[i].terms()) {
                idx.push_back(node_of(m));
                cs.push_back(c);
            }
            field_nodes_.push_back(std::move(idx));
            field_coefs_.push_back(std::move(cs));
        }
    }

    /// Engine over fixed coordinate series (no extension beyond their order).
    explicit SeriesEngine(const std::vector<Series>& coords) : n_(coords.size())
    {
        coords_.resize(n_);
        level_ = coords.empty() ? 0 : coords[0].order();
        for (std::size_t i = 0; i < n_; ++i) {
            if (coords[i].order() != level_)
                throw DimensionError("coordinate series with different orders");
            coords_[i] = coords[i].coeffs();
        }
        node_of(Monomial(n_));
    }

    std::size_t dim() const { return n_; }
    /// Number of known coordinate coefficients.
    std::size_t order() const { return level_; }

    /// Registers P; the handle is used with coefficient()/series().
    std::size_t track(const Polynomial& P)
    {
        if (P.nvars() != n_)
            throw DimensionError("tracked polynomial in the wrong dimension");
        Tracked t;
        for (const auto& [m, c] : P.terms()) {
            t.nodes.push_back(node_of(m));
            t.coefs.push_back(c);
        }
        tracked_.push_back(std::move(t));
        return tracked_.size() - 1;
    }

    /// Makes coordinate coefficients 0..order-1 available.
    void extend_to(std::size_t order)
    {
        while (level_ < order) {
            if (!xi_)
                throw DomainError("series engine over fixed coordinates cannot be extended");
            std::size_t k = level_ - 1;
            GaussianRational inv(make_rational(1, static_cast<long>(level_)));
            for (std::size_t i = 0; i < n_; ++i) {
                GaussianRational s;
                for (std::size_t t = 0; t < field_nodes_[i].size(); ++t) {
                    const auto& v = coefficient_of_node(field_nodes_[i][t], k);
                    if (!v.is_zero())
                        s += field_coefs_[i][t] * v;
                }
                coords_[i].push_back(s * inv);
            }
            ++level_;
        }
    }

    /// [z^k] P(x(z)) for a tracked P.
    GaussianRational coefficient(std::size_t handle, std::size_t k)
    {
        extend_to(k + 1);
        const Tracked& t = tracked_.at(handle);
        GaussianRational s;
        for (std::size_t j = 0; j < t.nodes.size(); ++j) {
            const auto& v = coefficient_of_node(t.nodes[j], k);
            if (!v.is_zero())
                s += t.coefs[j] * v;
        }
        return s;
    }

    Series series(std::size_t handle, std::size_t order)
    {
        std::vector<GaussianRational> c;
        c.reserve(order);
        for (std::size_t k = 0; k < order; ++k)
            c.push_back(coefficient(handle, k));
        return Series(std::move(c));
    }

    Series coordinate(std::size_t i, std::size_t order)
    {
        extend_to(order);
        return Series({coords_.at(i).begin(), coords_.at(i).begin() + static_cast<long>(order)});
    }

private:
    struct Node {
        int parent; // -1 for the monomial 1
        std::size_t var;
        std::vector<GaussianRational> coeffs;
    };
    struct Tracked {
        std::vector<std::size_t> nodes;
        std::vector<GaussianRational> coefs;
    };

    std::size_t node_of(const Monomial& m)
    {
        auto it = index_.find(m);
        if (it != index_.end())
            return it->second;
        Node node{-1, 0, {}};
        if (!m.is_one()) {
            std::size_t j = *m.last_variable();
            node.parent = static_cast<int>(node_of(m.lowered(j)));
            node.var = j;
        }
        nodes_.push_back(std::move(node));
        index_.emplace(m, nodes_.size() - 1);
        return nodes_.size() - 1;
    }

    const GaussianRational& coefficient_of_node(std::size_t idx, std::size_t k)
    {
        if (k >= level_)
            throw DomainError("monomial coefficient requested beyond the known order");
        while (nodes_[idx].coeffs.size() <= k) {
            std::size_t kk = nodes_[idx].coeffs.size();
            GaussianRational v;
            if (nodes_[idx].parent < 0) {
                v = kk == 0 ? GaussianRational(1) : GaussianRational();
            } else {
                auto par = static_cast<std::size_t>(nodes_[idx].parent);
                std::size_t var = nodes_[idx].var;
                for (std::size_t l = 0; l <= kk; ++l) {
                    const auto& x = coords_[var][kk - l];
                    if (x.is_zero())
                        continue;
                    const auto& a = coefficient_of_node(par, l);
                    if (!a.is_zero())
                        v += a * x;
                }
            }
            nodes_[idx].coeffs.push_back(std::move(v));
        }
        return nodes_[idx].coeffs[k];
    }

    std::size_t n_;
    std::optional<VectorField> xi_;
    std::vector<std::vector<GaussianRational>> coords_;
    std::size_t level_ = 0;
    std::vector<Node> nodes_;
    std::unordered_map<Monomial, std::size_t, MonomialHash> index_;
    std::vector<std::vector<std::size_t>> field_nodes_;
    std::vector<std::vector<GaussianRational>> field_coefs_;
    std::vector<Tracked> tracked_;
};

} // namespace ztraj
