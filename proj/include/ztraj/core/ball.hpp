#pragma once

#include <mpfr.h>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include "ztraj/core/gaussian.hpp"

namespace ztraj {

/// RAII wrapper around an MPFR float with fixed precision.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec = 128)
    {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(const BigFloat& o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    /// Upper bound for |x| as a double (rounded toward +inf).
    double abs_up() const { return std::fabs(mpfr_get_d(v_, mpfr_sgn(v_) >= 0 ? MPFR_RNDU : MPFR_RNDD)); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    std::string to_string(int digits = 20) const
    {
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rg", digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

private:
    mpfr_t v_;
};

namespace detail {

/// Outward rounding helpers for the double-valued radius.
inline double up(double x)
{
    if (std::isnan(x))
        return std::numeric_limits<double>::infinity();
    return std::nextafter(x * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()),
                          std::numeric_limits<double>::infinity());
}
inline double down(double x)
{
    if (x <= 0)
        return 0;
    return std::nextafter(x * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()), 0.0);
}
inline double pow2(long e) { return std::ldexp(1.0, static_cast<int>(std::max(e, -1070L))); }

} // namespace detail

/// Complex midpoint-radius ball {z : |z - mid| <= rad}. Every operation
/// returns a ball containing all results of the operation applied to members
/// of its inputs, including MPFR rounding of the midpoint.
class ComplexBall {
public:
    explicit ComplexBall(mpfr_prec_t prec = 128) : re_(prec), im_(prec) {}

    static ComplexBall exact(const GaussianRational& z, mpfr_prec_t prec)
    {
        ComplexBall b(prec);
        int ir = mpfr_set_q(b.re_.get(), z.re().get_mpq_t(), MPFR_RNDN);
        int ii = mpfr_set_q(b.im_.get(), z.im().get_mpq_t(), MPFR_RNDN);
        if (ir || ii)
            b.rad_ = detail::up(b.ulp_error());
        return b;
    }
    static ComplexBall from_double(double re, double im, mpfr_prec_t prec, double rad = 0)
    {
        ComplexBall b(prec);
        mpfr_set_d(b.re_.get(), re, MPFR_RNDN);
        mpfr_set_d(b.im_.get(), im, MPFR_RNDN);
        b.rad_ = rad;
        return b;
    }
    static ComplexBall from_parts(BigFloat re, BigFloat im, double rad)
    {
        ComplexBall b(re.prec());
        b.re_ = std::move(re);
        b.im_ = std::move(im);
        b.rad_ = rad;
        return b;
    }

    mpfr_prec_t prec() const { return re_.prec(); }
    const BigFloat& re() const { return re_; }
    const BigFloat& im() const { return im_; }
    double rad() const { return rad_; }
    std::complex<double> mid() const { return {re_.to_double(), im_.to_double()}; }

    /// Upper bound on |mid|.
    double mid_abs_up() const
    {
        double a = re_.abs_up(), b = im_.abs_up();
        return detail::up(std::hypot(a, b));
    }
    /// Upper bound on sup |z| over the ball.
    double abs_upper() const { return detail::up(mid_abs_up() + rad_); }
    /// Lower bound on inf |z| over the ball (0 if the ball touches 0).
    double abs_lower() const
    {
        double a = std::fabs(re_.to_double()), b = std::fabs(im_.to_double());
        double m = detail::down(std::hypot(a, b) * (1 - 1e-15));
        double l = m - detail::up(rad_);
        return l > 0 ? detail::down(l) : 0.0;
    }
    bool contains_zero() const { return abs_lower() <= 0; }
    bool is_finite() const { return std::isfinite(rad_) && std::isfinite(mid_abs_up()); }

    /// Whether the exact number z lies in the ball (decided at double level
    /// with a safety margin, so only used by tests and diagnostics).
    bool contains(const std::complex<double>& z, double slack = 0) const
    {
        return std::abs(z - mid()) <= rad_ + slack + 1e-15 * (1 + std::abs(z));
    }

    /// Exact containment of a Gaussian rational (midpoint difference computed
    /// at doubled precision).
    bool contains(const GaussianRational& z) const
    {
        mpfr_prec_t p = 2 * prec() + 64;
        BigFloat dr(p), di(p), t(p);
        mpfr_set_q(t.get(), z.re().get_mpq_t(), MPFR_RNDN);
        mpfr_sub(dr.get(), t.get(), re_.get(), MPFR_RNDN);
        mpfr_set_q(t.get(), z.im().get_mpq_t(), MPFR_RNDN);
        mpfr_sub(di.get(), t.get(), im_.get(), MPFR_RNDN);
        double d = std::hypot(dr.to_double(), di.to_double());
        return d <= rad_ * (1 + 1e-12);
    }

    ComplexBall operator-() const
    {
        ComplexBall r(*this);
        mpfr_neg(r.re_.get(), r.re_.get(), MPFR_RNDN);
        mpfr_neg(r.im_.get(), r.im_.get(), MPFR_RNDN);
        return r;
    }

    friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b)
    {
        ComplexBall r(std::max(a.prec(), b.prec()));
        mpfr_add(r.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
        mpfr_add(r.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
        r.rad_ = detail::up(a.rad_ + b.rad_ + r.ulp_error());
        return r;
    }
    friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return a + (-b); }

    friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b)
    {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        ComplexBall r(p);
        BigFloat t1(p), t2(p);
        mpfr_mul(t1.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
        mpfr_mul(t2.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
        mpfr_sub(r.re_.get(), t1.get(), t2.get(), MPFR_RNDN);
        mpfr_mul(t1.get(), a.re_.get(), b.im_.get(), MPFR_RNDN);
        mpfr_mul(t2.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
        mpfr_add(r.im_.get(), t1.get(), t2.get(), MPFR_RNDN);
        double l1a = detail::up(a.re_.abs_up() + a.im_.abs_up());
        double l1b = detail::up(b.re_.abs_up() + b.im_.abs_up());
        // two roundings per product, one for the sum, per component
        double round = detail::up(detail::pow2(3 - static_cast<long>(p)) * detail::up(l1a * l1b));
        double ma = a.mid_abs_up(), mb = b.mid_abs_up();
        double prop = detail::up(detail::up(ma * b.rad_) + detail::up(mb * a.rad_) + detail::up(a.rad_ * b.rad_));
        r.rad_ = detail::up(prop + round);
        return r;
    }

    /// Reciprocal; throws if the ball contains zero.
    ComplexBall inverse() const
    {
        double lo = abs_lower();
        if (!(lo > 0))
            throw CertificationError("reciprocal of a ball containing zero");
        mpfr_prec_t p = prec();
        ComplexBall r(p);
        BigFloat n(p), t(p);
        mpfr_sqr(n.get(), re_.get(), MPFR_RNDN);
        mpfr_sqr(t.get(), im_.get(), MPFR_RNDN);
        mpfr_add(n.get(), n.get(), t.get(), MPFR_RNDN);
        mpfr_div(r.re_.get(), re_.get(), n.get(), MPFR_RNDN);
        mpfr_div(r.im_.get(), im_.get(), n.get(), MPFR_RNDN);
        mpfr_neg(r.im_.get(), r.im_.get(), MPFR_RNDN);
        // |1/(m+e) - 1/m| <= rad / (|m| (|m| - rad)); midpoint computed with
        // a handful of roundings relative to 1/|m|
        double m_lo = detail::down(lo + rad_);
        double prop = rad_ > 0 ? detail::up(rad_ / detail::down(m_lo * lo)) : 0.0;
        double round = detail::up(detail::pow2(4 - static_cast<long>(p)) / detail::down(m_lo));
        r.rad_ = detail::up(prop + round);
        return r;
    }

    friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) { return a * b.inverse(); }

    /// Ball enlarged by e.
    ComplexBall inflated(double e) const
    {
        ComplexBall r(*this);
        r.rad_ = detail::up(rad_ + e);
        return r;
    }

    /// Principal argument of the midpoint (double precision).
    double arg_mid() const { return std::atan2(im_.to_double(), re_.to_double()); }

    std::string to_string() const
    {
        return "[" + re_.to_string(12) + " + " + im_.to_string(12) + "*I +/- " + std::to_string(rad_) + "]";
    }

private:
    /// Bound for one rounding of each midpoint component.
    double ulp_error() const
    {
        return detail::up(detail::pow2(1 - static_cast<long>(prec())) * detail::up(re_.abs_up() + im_.abs_up()));
    }

    BigFloat re_;
    BigFloat im_;
    double rad_ = 0;
};

inline ComplexBall pow(const ComplexBall& b, unsigned e)
{
    ComplexBall r = ComplexBall::exact(GaussianRational(1), b.prec());
    ComplexBall base = b;
    while (e) {
        if (e & 1u)
            r = r * base;
        e >>= 1;
        if (e)
            base = base * base;
    }
    return r;
}

/// Ball of radius rad around the exact point z.
inline ComplexBall ball_around(const GaussianRational& z, double rad, mpfr_prec_t prec)
{
    return ComplexBall::exact(z, prec).inflated(rad);
}

/// Ball containing r * e^{i theta} (theta given as double, exact up to
/// the stated slack which the caller must include in rad).
inline ComplexBall polar_ball(double r, double theta, double rad, mpfr_prec_t prec)
{
    BigFloat th(prec), c(prec), s(prec);
    mpfr_set_d(th.get(), theta, MPFR_RNDN);
    mpfr_sin_cos(s.get(), c.get(), th.get(), MPFR_RNDN);
    BigFloat rr(prec);
    mpfr_set_d(rr.get(), r, MPFR_RNDN);
    mpfr_mul(c.get(), c.get(), rr.get(), MPFR_RNDN);
    mpfr_mul(s.get(), s.get(), rr.get(), MPFR_RNDN);
    double round = detail::up(detail::pow2(3 - static_cast<long>(prec)) * detail::up(2 * r));
    return ComplexBall::from_parts(std::move(c), std::move(s), detail::up(rad + round));
}

} // namespace ztraj
