#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "ztraj/core/error.hpp"

namespace ztraj {

/// Exact rational, always stored reduced with positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1)
{
    if (den == 0)
        throw DomainError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational parse_rational(const std::string& s)
{
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw ParseError("not a rational: " + s);
    if (q.get_den() == 0)
        throw ParseError("zero denominator: " + s);
    q.canonicalize();
    return q;
}

/// log|q| as a double; q must be nonzero. Works far outside the double range.
inline double log_abs(const Integer& z)
{
    if (z == 0)
        throw DomainError("log of zero");
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_abs(const Rational& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

/// Element of Q(i).
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {}
    GaussianRational(Rational re) : re_(std::move(re)) {}
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational inverse() const
    {
        if (is_zero())
            throw DomainError("division by zero in Q(i)");
        Rational n = norm();
        return {re_ / n, -im_ / n};
    }

    GaussianRational operator-() const { return {-re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o)
    {
        if (sgn(im_) == 0 && sgn(o.im_) == 0) {
            re_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o)
    {
        if (sgn(o.im_) == 0) {
            if (sgn(o.re_) == 0)
                throw DomainError("division by zero in Q(i)");
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        return *this *= o.inverse();
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    /// Least common multiple of the two denominators.
    Integer denominator_lcm() const
    {
        Integer l;
        mpz_lcm(l.get_mpz_t(), re_.get_den_mpz_t(), im_.get_den_mpz_t());
        return l;
    }

    double log_abs() const
    {
        // log|z| = 0.5 * log(re^2 + im^2)
        Rational n = norm();
        return 0.5 * ztraj::log_abs(n);
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

private:
    Rational re_{0};
    Rational im_{0};
};

inline GaussianRational pow(GaussianRational base, unsigned e)
{
    GaussianRational r(1);
    while (e) {
        if (e & 1u)
            r *= base;
        e >>= 1;
        if (e)
            base *= base;
    }
    return r;
}

/// Exact comparison of moduli: sign of |a| - |b|.
inline int compare_abs(const GaussianRational& a, const GaussianRational& b)
{
    return cmp(a.norm(), b.norm());
}

/// Prints a Q(i) constant in the polynomial text syntax ("3/2", "-I", "1/2 + 3*I").
inline std::string to_string(const GaussianRational& z)
{
    auto rat = [](const Rational& q) { return q.get_str(10); };
    auto imag = [&](const Rational& q) {
        Rational a = abs(q);
        return a == 1 ? std::string("I") : rat(a) + "*I";
    };
    if (z.is_real())
        return rat(z.re());
    if (sgn(z.re()) == 0)
        return (sgn(z.im()) < 0 ? "-" : "") + imag(z.im());
    return rat(z.re()) + (sgn(z.im()) < 0 ? " - " : " + ") + imag(z.im());
}

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << to_string(z); }

} // namespace ztraj
