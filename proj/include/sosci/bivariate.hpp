#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "sosci/dist.hpp"
#include "sosci/errors.hpp"
#include "sosci/interval.hpp"
#include "sosci/numerics.hpp"
#include "sosci/select.hpp"

namespace sosci {

/// Interval for the parameter whose estimate is the larger of two.  For
/// exchangeable estimators with a symmetric marginal the unadjusted two-sided
/// interval already has SoS coverage 1 - alpha.
inline ConfidenceInterval larger_of_two_interval(std::span<const double> y, double alpha,
                                                 const ShiftFamily& family = ShiftFamily::normal()) {
    detail::require(y.size() == 2, "larger_of_two_interval: y must have two coordinates");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    const std::size_t s = y[1] > y[0] ? 1 : 0;
    const double c = family.upper_quantile(alpha / 2.0);
    return {s, y[s], y[s] - c, y[s] + c, MethodLabel::larger_of_two};
}

/// Halfwidth of the m = 2 Sidak square: (2 Phi(c) - 1)^2 = 1 - alpha.
inline double sidak2_constant(double alpha) {
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    return normal_upper_quantile((1.0 - std::sqrt(1.0 - alpha)) / 2.0);
}

/// Pr_mu{Y in B_{mu,c}} for Y ~ N(mu, I_2), where B is the acceptance region
/// of the abs-max rule: the selected coordinate lies within c of its mean.
///
/// Each piece is  int_{-c}^{c} phi(t) Pr{|Y_j| < |mu_i + t|} dt,  whose
/// integrand changes sign convention at t = -mu_i; the integral is split there.
inline double b_region_probability(double mu1, double mu2, double c) {
    detail::require(std::isfinite(mu1) && std::isfinite(mu2), "b_region_probability: mu must be finite");
    detail::require(c >= 0.0, "b_region_probability: c must be nonnegative");
    if (c == 0.0) return 0.0;
    const double mu[2] = {mu1, mu2};
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double own = mu[i], other = mu[1 - i];
        auto integrand = [own, other](double t) {
            const double r = t + own;
            const double inner = normal_cdf(r - other) - normal_cdf(-r - other);
            return normal_pdf(t) * (r < 0 ? -inner : inner);
        };
        const double kink = -own;
        if (kink > -c && kink < c)
            total += numerics::integrate(integrand, -c, kink) + numerics::integrate(integrand, kink, c);
        else
            total += numerics::integrate(integrand, -c, c);
    }
    return std::clamp(total, 0.0, 1.0);
}

/// Smallest c with Pr_{(a,0)}{Y in B_{(a,0),c}} >= 1 - alpha, to |dc| <= tol.
/// Negative a is reflected: acceptance regions are negation-symmetric.
inline double c_plus(double a, double alpha, double tol = 1e-9) {
    detail::require(std::isfinite(a), "c_plus: a must be finite");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    a = std::abs(a);
    const double target = 1.0 - alpha;
    auto gap = [a, target](double c) { return b_region_probability(a, 0.0, c) - target; };
    double lo = 0.5 * normal_upper_quantile(alpha / 2.0);
    double hi = sidak2_constant(alpha) + 0.5;
    while (gap(lo) >= 0.0) lo *= 0.5;
    while (gap(hi) < 0.0) hi *= 2.0;
    return numerics::bisect(gap, lo, hi, tol).second;
}

/// a |-> c+_(a,0) tabulated on [0, a_max] with piecewise-linear interpolation.
/// Immutable after construction.  Beyond a_max the last knot is returned;
/// c+ is nonincreasing, so this is conservative (and c+(8) = z_{1-alpha/2}
/// to far below interpolation accuracy).
class CPlusCurve {
public:
    explicit CPlusCurve(double alpha, double a_max = 8.0, double step = 0.01) : alpha_(alpha), step_(step) {
        detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
        detail::require(step > 0.0 && a_max > 0.0, "CPlusCurve: need positive step and a_max");
        const auto n = static_cast<std::size_t>(std::llround(a_max / step));
        a_max_ = static_cast<double>(n) * step;
        knots_.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            double c = c_plus(static_cast<double>(i) * step, alpha);
            if (!knots_.empty()) {
                // Bisection noise is ~1e-9; anything larger is a real increase.
                if (c > knots_.back() + 1e-7) throw NumericalError("CPlusCurve: c+ is not nonincreasing in a");
                c = std::min(c, knots_.back());
            }
            knots_.push_back(c);
        }
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (std::abs(knots_[i] - knots_[i - 1]) >= step) maps_monotone_ = false;
    }

    /// Cached curve for `alpha` on the default grid; thread-safe.
    static const CPlusCurve& shared(double alpha) {
        static std::mutex mutex;
        static std::map<double, std::unique_ptr<CPlusCurve>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto& slot = cache[alpha];
        if (!slot) slot = std::make_unique<CPlusCurve>(alpha);
        return *slot;
    }

    double alpha() const noexcept { return alpha_; }
    double step() const noexcept { return step_; }
    double a_max() const noexcept { return a_max_; }
    std::span<const double> knots() const noexcept { return knots_; }

    /// True when |dc/da| < 1 on every cell, i.e. a +- c(a) are strictly increasing.
    bool maps_monotone() const noexcept { return maps_monotone_; }

    double operator()(double a) const {
        a = std::abs(a);
        if (a >= a_max_) return knots_.back();
        const double pos = a / step_;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return knots_[i] + frac * (knots_[i + 1] - knots_[i]);
    }

    /// Direct evaluation, bypassing the table.
    double exact(double a) const { return c_plus(a, alpha_); }

private:
    double alpha_;
    double step_;
    double a_max_ = 0.0;
    std::vector<double> knots_;
    bool maps_monotone_ = true;
};

namespace detail {

// Boundary of {a : pred(a)} met when scanning from `from` towards `to`
// (pred false at `from`, true somewhere before `to`).  The scan runs on the
// interpolated curve; the crossing cell is then bisected on `refine`, which
// is the interpolant again or the exact curve.
template <class Coarse, class Fine>
double scan_crossing(double from, double to, double step, Coarse&& coarse, Fine&& refine) {
    const double dir = to > from ? 1.0 : -1.0;
    if (coarse(from)) return from;
    double prev = from;
    for (double a = from;;) {
        a = dir > 0 ? std::min(a + step, to) : std::max(a - step, to);
        if (coarse(a)) {
            double inside = a, outside = prev;
            // Widen by one cell if the refining curve disagrees at the ends.
            if (!refine(inside)) inside += dir * step;
            if (refine(outside)) outside -= dir * step;
            auto f = [&](double x) { return refine(x) ? 1.0 : -1.0; };
            const auto br = numerics::bisect(f, std::min(inside, outside), std::max(inside, outside), 1e-9);
            return dir > 0 ? br.second : br.first;
        }
        prev = a;
        if (a == to) return to;
    }
}

} // namespace detail

/// Interval for the parameter whose estimate is larger in absolute value,
/// Y ~ N(theta, I_2).  Inverts the c+ acceptance regions:
///   [inf{a : a + c(a) >= w}, sup{a : a - c(a) <= w}]  for w = selected value >= 0,
/// mirrored for w < 0.
/// `polish` refines each endpoint on the exact c+ (slow); without it the
/// interpolant alone is inverted, which is what Monte-Carlo loops use.
inline ConfidenceInterval abs_max_interval(std::span<const double> y, const CPlusCurve& curve,
                                           bool polish = true) {
    const SelectionResult sel = select_abs_max(y);
    const std::size_t s = sel.selected.front();
    const double w = std::abs(y[s]);
    const double sidak = curve(0.0);
    const double step = curve.step();

    auto lower_interp = [&](double a) { return a + curve(a) >= w; };
    auto lower_exact = [&](double a) { return a + curve.exact(a) >= w; };
    auto upper_interp = [&](double a) { return a - curve(a) <= w; };
    auto upper_exact = [&](double a) { return a - curve.exact(a) <= w; };

    double mu_minus, mu_plus;
    if (polish) {
        mu_minus = detail::scan_crossing(w - sidak, w, step, lower_interp, lower_exact);
        mu_plus = detail::scan_crossing(w + sidak, w, step, upper_interp, upper_exact);
    } else {
        mu_minus = detail::scan_crossing(w - sidak, w, step, lower_interp, lower_interp);
        mu_plus = detail::scan_crossing(w + sidak, w, step, upper_interp, upper_interp);
    }

    ConfidenceInterval ci{s, y[s], mu_minus, mu_plus, MethodLabel::abs_max};
    if (y[s] < 0.0) {
        ci.lo = -mu_plus;
        ci.hi = -mu_minus;
    }
    return ci;
}

inline ConfidenceInterval abs_max_interval(std::span<const double> y, double alpha) {
    return abs_max_interval(y, CPlusCurve::shared(alpha));
}

} // namespace sosci
