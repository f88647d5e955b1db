#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "sosci/errors.hpp"

namespace sosci {

inline double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF.  erfc keeps full relative accuracy in the lower tail.
inline double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Standard normal quantile; throws DomainError unless 0 < p < 1.
inline double normal_quantile(double p) {
    detail::require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0,1)");
    // Upper tail through the complement so that 1 - 1e-12 keeps its digits.
    if (p > 0.5) return -boost::math::quantile(boost::math::normal(), 1.0 - p);
    return boost::math::quantile(boost::math::normal(), p);
}

/// z_{1-q}: normal quantile at 1 - q, evaluated without forming 1 - q.
inline double normal_upper_quantile(double q) {
    detail::require(q > 0.0 && q < 1.0, "normal_upper_quantile: q must lie in (0,1)");
    return -boost::math::quantile(boost::math::normal(), q);
}

inline double student_t_cdf(double x, int df) {
    detail::require(df >= 1, "student_t_cdf: df must be >= 1");
    return boost::math::cdf(boost::math::students_t(static_cast<double>(df)), x);
}

inline double student_t_quantile(double p, int df) {
    detail::require(df >= 1, "student_t_quantile: df must be >= 1");
    detail::require(p > 0.0 && p < 1.0, "student_t_quantile: p must lie in (0,1)");
    const boost::math::students_t t(static_cast<double>(df));
    if (p > 0.5) return -boost::math::quantile(t, 1.0 - p);
    return boost::math::quantile(t, p);
}

/// Location family F0(y - theta) with F0 a (possibly scaled) standard normal
/// or Student-t.  Both members are symmetric about zero.
class ShiftFamily {
public:
    enum class Kind { normal, student_t };

    static ShiftFamily normal(double scale = 1.0) { return ShiftFamily(Kind::normal, 0, scale); }
    static ShiftFamily student_t(int df, double scale = 1.0) {
        detail::require(df >= 1, "ShiftFamily::student_t: df must be >= 1");
        return ShiftFamily(Kind::student_t, df, scale);
    }

    Kind kind() const noexcept { return kind_; }
    int df() const noexcept { return df_; }
    double scale() const noexcept { return scale_; }

    double cdf(double x) const {
        const double z = x / scale_;
        return kind_ == Kind::normal ? normal_cdf(z) : student_t_cdf(z, df_);
    }

    double quantile(double p) const {
        return scale_ * (kind_ == Kind::normal ? normal_quantile(p) : student_t_quantile(p, df_));
    }

    /// F0^{-1}(1 - q) computed from the tail probability q.
    double upper_quantile(double q) const {
        detail::require(q > 0.0 && q < 1.0, "ShiftFamily::upper_quantile: q must lie in (0,1)");
        return -quantile(q);
    }

    /// One draw of the centred error Y - theta.
    template <class URBG>
    double sample(URBG& rng) const {
        boost::random::normal_distribution<double> z;
        if (kind_ == Kind::normal) return scale_ * z(rng);
        boost::random::chi_squared_distribution<double> w(static_cast<double>(df_));
        const double num = z(rng);
        return scale_ * num / std::sqrt(w(rng) / df_);
    }

    std::string name() const {
        if (kind_ == Kind::normal) return "normal";
        return "t" + std::to_string(df_);
    }

    bool operator==(const ShiftFamily&) const = default;

private:
    ShiftFamily(Kind kind, int df, double scale) : kind_(kind), df_(df), scale_(scale) {
        detail::require(std::isfinite(scale) && scale > 0.0, "ShiftFamily: scale must be positive");
    }

    Kind kind_;
    int df_;
    double scale_;
};

} // namespace sosci
