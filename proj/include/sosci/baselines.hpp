#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sosci/dist.hpp"
#include "sosci/errors.hpp"
#include "sosci/interval.hpp"
#include "sosci/numerics.hpp"
#include "sosci/select.hpp"
#include "sosci/sos.hpp"

namespace sosci {

inline double unadjusted_halfwidth(double alpha, const ShiftFamily& family = ShiftFamily::normal()) {
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    return family.upper_quantile(alpha / 2.0);
}

inline double bonferroni_halfwidth(std::size_t m, double alpha, const ShiftFamily& family = ShiftFamily::normal()) {
    detail::require(m >= 1, "bonferroni_halfwidth: m must be >= 1");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    return family.upper_quantile(alpha / (2.0 * static_cast<double>(m)));
}

/// Per-tail level of the Sidak interval, (1 - (1-alpha)^{1/m}) / 2.
inline double sidak_tail(std::size_t m, double alpha) {
    return -std::expm1(std::log1p(-alpha) / static_cast<double>(m)) / 2.0;
}

inline double sidak_halfwidth(std::size_t m, double alpha, const ShiftFamily& family = ShiftFamily::normal()) {
    detail::require(m >= 1, "sidak_halfwidth: m must be >= 1");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    return family.upper_quantile(sidak_tail(m, alpha));
}

// ---------------------------------------------------------------------------
// FCW intervals [y - c, y + d] for the k largest of m i.i.d. N(theta_i, 1).

struct FcwConstants {
    double c; // extension below the estimate
    double d; // extension above the estimate
    double length() const noexcept { return c + d; }
};

enum class FcwMode { symmetric, shortest };

/// [Phi(c) - Phi(-d)]^{k-1} [Phi^{m-k+1}(c) - Phi^{m-k+1}(-d)].
inline double fcw_product_constraint(double c, double d, std::size_t m, std::size_t k) {
    const double up = normal_cdf(c), down = normal_cdf(-d);
    const double n = static_cast<double>(m - k + 1);
    return std::pow(up - down, static_cast<double>(k - 1)) * (std::pow(up, n) - std::pow(down, n));
}

namespace detail {

// Pr{at least r of n i.i.d. draws land in [-d, c] and none exceeds c}
//   = sum_{i >= r} C(n,i) p^i q^{n-i},  p = Phi(c) - Phi(-d), q = Phi(-d).
inline double ranked_block_coverage(std::size_t n, std::size_t r, double p, double q) {
    if (r == 0) return 1.0;
    if (p <= 0.0) return 0.0;
    if (r > n) return 0.0;
    const double lp = std::log(p);
    if (q <= 0.0) return std::exp(static_cast<double>(n) * lp); // only i = n survives
    const double lq = std::log(q), lratio = lp - lq;
    const double nd = static_cast<double>(n), rd = static_cast<double>(r);
    // log of the i = r term, then term_{i+1} / term_i = (n-i)/(i+1) * p/q.
    double lterm = std::lgamma(nd + 1.0) - std::lgamma(rd + 1.0) - std::lgamma(nd - rd + 1.0) + rd * lp +
                   (nd - rd) * lq;
    double total = std::exp(lterm);
    for (std::size_t i = r; i < n; ++i) {
        lterm += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1)) + lratio;
        total += std::exp(lterm);
    }
    return total;
}

} // namespace detail

/// Smallest SoS coverage of [y - c, y + d] over the configurations in which j
/// of the means sit at +infinity (always selected, covering independently)
/// and the remaining m - j are tied and compete for the other k - j slots,
/// j = 0..k.  j = k - 1 is the product constraint above.
inline double fcw_coverage(double c, double d, std::size_t m, std::size_t k) {
    const double p = normal_cdf(c) - normal_cdf(-d);
    const double q = normal_cdf(-d);
    if (p <= 0.0) return 0.0;
    double worst = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
        const double v = std::pow(p, static_cast<double>(j)) * detail::ranked_block_coverage(m - j, k - j, p, q);
        worst = std::min(worst, v);
    }
    return worst;
}

namespace detail {

// Smallest c with fcw_coverage(c, d) >= 1 - alpha, or +inf when infeasible.
inline double fcw_c_for_d(double d, std::size_t m, std::size_t k, double alpha) {
    constexpr double kCMax = 40.0;
    auto gap = [&](double c) { return fcw_coverage(c, d, m, k) - (1.0 - alpha); };
    if (gap(kCMax) < 0.0) return INFINITY;
    const double lo = std::max(-d, -kCMax) + 1e-12;
    if (gap(lo) >= 0.0) return lo;
    return numerics::bisect(gap, lo, kCMax, 1e-12).second;
}

} // namespace detail

inline FcwConstants fcw_constants(std::size_t m, std::size_t k, double alpha, FcwMode mode) {
    detail::check_kma(m, k, alpha);
    if (mode == FcwMode::symmetric) {
        auto gap = [&](double c) { return fcw_coverage(c, c, m, k) - (1.0 - alpha); };
        double hi = 10.0;
        if (gap(1e-6) >= 0.0 || gap(hi) < 0.0) throw NumericalError("fcw_constants: root not bracketed");
        const double c = numerics::bisect(gap, 1e-6, hi, 1e-13).second;
        return {c, c};
    }
    // Outer search over the upper extension d, inner root for c.  d below
    // d_lo is infeasible for any c.
    auto feasible = [&](double d) { return std::isfinite(detail::fcw_c_for_d(d, m, k, alpha)) ? 1.0 : -1.0; };
    double d_lo = -10.0;
    const double d_hi = 2.0 * fcw_constants(m, k, alpha, FcwMode::symmetric).c;
    if (feasible(d_lo) < 0.0) d_lo = numerics::bisect(feasible, d_lo, d_hi, 1e-10).second;
    auto length = [&](double d) {
        const double c = detail::fcw_c_for_d(d, m, k, alpha);
        return std::isfinite(c) ? c + d : 1e6;
    };
    const auto best = numerics::minimize(length, d_lo, d_hi);
    return {detail::fcw_c_for_d(best.x, m, k, alpha), best.x};
}

// ---------------------------------------------------------------------------
// Method dispatch: every method here is an (lambda_lower, lambda_upper) pair.

struct TailLevels {
    double lower;
    double upper;
};

/// Tail levels of `method` for the k largest of m at level alpha.  Offsets
/// that are only defined for normal errors (FCW, the optimized delta) are
/// computed for N(0,1) and carried to other families through their tail
/// probabilities.
inline TailLevels method_tail_levels(MethodLabel method, std::size_t m, std::size_t k, double alpha,
                                     double fixed_delta = 0.5) {
    detail::check_kma(m, k, alpha);
    const double md = static_cast<double>(m), kd = static_cast<double>(k);
    switch (method) {
        case MethodLabel::unadjusted:
        case MethodLabel::larger_of_two: return {alpha / 2.0, alpha / 2.0};
        case MethodLabel::bonferroni: return {alpha / (2.0 * md), alpha / (2.0 * md)};
        case MethodLabel::sidak: {
            const double t = sidak_tail(m, alpha);
            return {t, t};
        }
        case MethodLabel::sos_symmetric: return {alpha / (md + kd), alpha / (md + kd)};
        case MethodLabel::sos_shortest: {
            const double d = optimize_delta(m, k, alpha, ShiftFamily::normal()).delta;
            return {d * alpha / md, (1.0 - d) * alpha / kd};
        }
        case MethodLabel::sos_fixed:
            detail::require(fixed_delta > 0.0 && fixed_delta < 1.0, "fixed delta must lie in (0,1)");
            return {fixed_delta * alpha / md, (1.0 - fixed_delta) * alpha / kd};
        case MethodLabel::fcr_selection_aware: return {alpha / 2.0 * kd / md, alpha / 2.0};
        case MethodLabel::fcw_symmetric:
        case MethodLabel::fcw_shortest: {
            const auto fc = fcw_constants(m, k, alpha,
                                          method == MethodLabel::fcw_symmetric ? FcwMode::symmetric
                                                                               : FcwMode::shortest);
            return {normal_cdf(-fc.c), normal_cdf(-fc.d)};
        }
        case MethodLabel::abs_max: break;
    }
    throw DomainError("method_tail_levels: abs_max has no fixed tail levels");
}

inline IntervalSpec method_spec(MethodLabel method, std::size_t m, std::size_t k, double alpha,
                                const ShiftFamily& family = ShiftFamily::normal(), double fixed_delta = 0.5) {
    const TailLevels t = method_tail_levels(method, m, k, alpha, fixed_delta);
    return IntervalSpec::from_levels(t.lower, t.upper, family);
}

/// Interval length of `method` under N(0,1) errors.
inline double method_length(MethodLabel method, std::size_t m, std::size_t k, double alpha) {
    switch (method) {
        case MethodLabel::fcw_symmetric: return fcw_constants(m, k, alpha, FcwMode::symmetric).length();
        case MethodLabel::fcw_shortest: return fcw_constants(m, k, alpha, FcwMode::shortest).length();
        case MethodLabel::sos_shortest: return optimize_delta(m, k, alpha, ShiftFamily::normal()).length;
        default: return method_spec(method, m, k, alpha).length();
    }
}

/// Top-k intervals of any fixed-offset method.
inline std::vector<ConfidenceInterval> top_k_intervals(std::span<const double> y, std::size_t k, double alpha,
                                                       MethodLabel method,
                                                       const ShiftFamily& family = ShiftFamily::normal(),
                                                       double fixed_delta = 0.5) {
    const IntervalSpec spec = method_spec(method, y.size(), k, alpha, family, fixed_delta);
    const SelectionResult sel = select_top_k(y, k);
    std::vector<ConfidenceInterval> out;
    out.reserve(k);
    for (std::size_t idx : sel.selected) out.push_back(spec.apply(idx, y[idx], method));
    return out;
}

/// Selection-aware FCR intervals for the k largest of m:
/// [y - F0^{-1}(1 - (alpha/2) k/m), y + F0^{-1}(1 - alpha/2)].
inline std::vector<ConfidenceInterval> fcr_selection_aware_interval(std::span<const double> y, std::size_t k,
                                                                    double alpha,
                                                                    const ShiftFamily& family = ShiftFamily::normal()) {
    return top_k_intervals(y, k, alpha, MethodLabel::fcr_selection_aware, family);
}

} // namespace sosci
