#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "ztraj/core/heights.hpp"
#include "ztraj/core/text.hpp"

namespace ztraj {

/// Polynomial vector field xi = sum_i xi_i(x) d/dx_i on C^n.
class VectorField {
public:
    VectorField() = default;
    VectorField(VariableNames names, std::vector<Polynomial> components)
        : names_(std::move(names)), comps_(std::move(components))
    {
        if (names_.size() != comps_.size())
            throw DimensionError("vector field needs one component per variable");
        for (const auto& c : comps_)
            if (c.nvars() != names_.size())
                throw DimensionError("vector field component in the wrong number of variables");
        delta_ = 0;
        for (const auto& c : comps_)
            delta_ = std::max(delta_, c.degree());
    }
    explicit VectorField(const std::vector<Polynomial>& components)
        : VectorField(default_names(components.size()), components)
    {}

    /// Builds a field from component strings in the given variables.
    static VectorField parse(const VariableNames& names, const std::vector<std::string>& components)
    {
        std::vector<Polynomial> comps;
        for (const auto& s : components)
            comps.push_back(parse_polynomial(s, names));
        return VectorField(names, std::move(comps));
    }

    std::size_t dim() const { return comps_.size(); }
    /// delta = max deg xi_i (0 for the zero field).
    int delta() const { return std::max(delta_, 0); }
    const std::vector<Polynomial>& components() const { return comps_; }
    const Polynomial& operator[](std::size_t i) const { return comps_.at(i); }
    const VariableNames& names() const { return names_; }

    /// Whether p is a common zero of all components.
    bool is_singular(std::span<const GaussianRational> p) const
    {
        for (const auto& c : comps_)
            if (!c.evaluate(p).is_zero())
                return false;
        return true;
    }

    /// Field multiplied by a constant (time rescaling z -> s z).
    VectorField scaled(const GaussianRational& s) const
    {
        std::vector<Polynomial> c;
        for (const auto& q : comps_)
            c.push_back(q * s);
        return VectorField(names_, std::move(c));
    }

    std::vector<std::string> component_strings() const
    {
        std::vector<std::string> out;
        for (const auto& c : comps_)
            out.push_back(to_string(c, names_));
        return out;
    }

    friend bool operator==(const VectorField& a, const VectorField& b)
    {
        return a.names_ == b.names_ && a.comps_ == b.comps_;
    }

private:
    VariableNames names_;
    std::vector<Polynomial> comps_;
    int delta_ = -1;
};

/// xi P = sum_i xi_i dP/dx_i.
inline Polynomial lie_derivative(const VectorField& xi, const Polynomial& P)
{
    if (P.nvars() != xi.dim())
        throw DimensionError("polynomial and vector field live in different dimensions");
    Polynomial r(P.nvars());
    for (std::size_t i = 0; i < xi.dim(); ++i) {
        if (xi[i].is_zero())
            continue;
        Polynomial d = P.derivative(i);
        if (!d.is_zero())
            r += xi[i] * d;
    }
    return r;
}

/// [P, xi P, ..., xi^k P].
inline std::vector<Polynomial> iterated_lie(const VectorField& xi, const Polynomial& P, unsigned k)
{
    std::vector<Polynomial> out{P};
    out.reserve(k + 1);
    for (unsigned j = 0; j < k; ++j)
        out.push_back(lie_derivative(xi, out.back()));
    return out;
}

struct LieHeightRecord {
    unsigned k;
    int degree;
    double height; // NaN when xi^k P = 0
};

/// Heights and degrees of the iterated Lie derivatives, for the height envelope
/// h(xi^k P) <= h(P) + c (deg P + k log(deg P + k)).
inline std::vector<LieHeightRecord> iterated_lie_heights(const VectorField& xi, const Polynomial& P, unsigned k)
{
    std::vector<LieHeightRecord> out;
    auto list = iterated_lie(xi, P, k);
    for (unsigned j = 0; j <= k; ++j)
        out.push_back({j, list[j].degree(), list[j].is_zero() ? std::nan("") : height(list[j])});
    return out;
}

/// The envelope term deg P + k log(deg P + k) of the Lie-height lemma.
inline double lie_height_envelope(int degP, unsigned k)
{
    double d = std::max(degP, 0), kk = k;
    return d + (d + kk > 1 ? kk * std::log(d + kk) : 0.0);
}

} // namespace ztraj
