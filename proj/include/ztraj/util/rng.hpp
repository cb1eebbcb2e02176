#pragma once

#include <cstdint>
#include <random>

#include "ztraj/core/polynomial.hpp"

namespace ztraj {

/// Seeded generator with platform-independent integer mapping (the standard
/// distributions are implementation-defined, which would break golden files).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform integer in [lo, hi].
    long uniform(long lo, long hi)
    {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0)
            return static_cast<long>(next());
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return lo + static_cast<long>(x % span);
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin() { return (next() >> 63) != 0; }

    Rng split(std::uint64_t stream) { return Rng(next() ^ (0x9e3779b97f4a7c15ull * (stream + 1))); }

private:
    std::mt19937_64 eng_;
};

/// Random Gaussian-integer polynomial of total degree exactly d with
/// coefficients in [-bound, bound] + i[-bound, bound] on every monomial of
/// degree <= d (leading degree forced nonzero).
inline Polynomial random_gaussian_polynomial(Rng& rng, std::size_t n, unsigned d, long bound)
{
    for (;;) {
        Polynomial p(n);
        for (const auto& m : monomials_up_to(n, d))
            p.add_term(m, GaussianRational(Rational(rng.uniform(-bound, bound)), Rational(rng.uniform(-bound, bound))));
        if (p.degree() == static_cast<int>(d))
            return p;
    }
}

} // namespace ztraj
