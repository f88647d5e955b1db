#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sosci/dist.hpp"
#include "sosci/errors.hpp"
#include "sosci/interval.hpp"
#include "sosci/numerics.hpp"
#include "sosci/select.hpp"

namespace sosci {

/// Tail levels and the additive offsets they induce.  An estimate y yields
/// the interval [y - c_lower, y + c_upper].
struct IntervalSpec {
    double lambda_lower = 0.0; // Pr{Y - theta > c_lower}
    double lambda_upper = 0.0; // Pr{Y - theta < -c_upper}
    double c_lower = 0.0;
    double c_upper = 0.0;
    ShiftFamily family = ShiftFamily::normal();

    static IntervalSpec from_levels(double lambda_lower, double lambda_upper, const ShiftFamily& family) {
        detail::require(lambda_lower > 0.0 && lambda_upper > 0.0 && lambda_lower + lambda_upper < 1.0,
                        "IntervalSpec: need lambda_lower, lambda_upper > 0 and lambda_lower + lambda_upper < 1");
        IntervalSpec s;
        s.lambda_lower = lambda_lower;
        s.lambda_upper = lambda_upper;
        s.c_lower = family.upper_quantile(lambda_lower);
        s.c_upper = -family.quantile(lambda_upper);
        s.family = family;
        if (!std::isfinite(s.c_lower) || !std::isfinite(s.c_upper))
            throw NumericalError("IntervalSpec: non-finite offset");
        return s;
    }

    double length() const noexcept { return c_lower + c_upper; }

    ConfidenceInterval apply(std::size_t index, double estimate, MethodLabel method) const noexcept {
        return {index, estimate, estimate - c_lower, estimate + c_upper, method};
    }
};

/// How the SoS budget is split between the two tails.
struct DeltaPolicy {
    enum class Kind { symmetric, shortest, fixed };
    Kind kind = Kind::symmetric;
    double delta = 0.5; // used by Kind::fixed

    static DeltaPolicy symmetric() { return {Kind::symmetric}; }
    static DeltaPolicy shortest() { return {Kind::shortest}; }
    static DeltaPolicy fixed(double delta) { return {Kind::fixed, delta}; }

    MethodLabel label() const noexcept {
        switch (kind) {
            case Kind::symmetric: return MethodLabel::sos_symmetric;
            case Kind::shortest: return MethodLabel::sos_shortest;
            case Kind::fixed: return MethodLabel::sos_fixed;
        }
        return MethodLabel::sos_fixed;
    }
};

namespace detail {

inline void check_kma(std::size_t m, std::size_t k, double alpha) {
    require(k >= 1 && k <= m, "need 1 <= k <= m");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
}

} // namespace detail

/// Lower tail at delta*alpha/m (Bonferroni over all m), upper tail at
/// (1-delta)*alpha/k (Bonferroni over the k selected).
inline IntervalSpec spec_from_delta(std::size_t m, std::size_t k, double alpha, double delta,
                                    const ShiftFamily& family) {
    detail::check_kma(m, k, alpha);
    detail::require(delta > 0.0 && delta < 1.0, "spec_from_delta: delta must lie in (0,1)");
    return IntervalSpec::from_levels(delta * alpha / static_cast<double>(m),
                                     (1.0 - delta) * alpha / static_cast<double>(k), family);
}

/// The delta giving equal tail levels, alpha/(m+k) on each side.
inline double symmetric_delta(std::size_t m, std::size_t k) noexcept {
    return static_cast<double>(m) / static_cast<double>(m + k);
}

inline double sos_length(std::size_t m, std::size_t k, double alpha, double delta, const ShiftFamily& family) {
    return spec_from_delta(m, k, alpha, delta, family).length();
}

struct DeltaOptimum {
    double delta;
    double length;
};

inline constexpr double kDeltaClip = 1e-6;

/// Shortest interval over delta in (eps, 1 - eps) for a common family.
inline DeltaOptimum optimize_delta(std::size_t m, std::size_t k, double alpha, const ShiftFamily& family) {
    detail::check_kma(m, k, alpha);
    auto length = [&](double d) { return sos_length(m, k, alpha, d, family); };
    if (!std::isfinite(length(kDeltaClip)) || !std::isfinite(length(1.0 - kDeltaClip)))
        throw NumericalError("optimize_delta: length is not finite at the search boundary");
    // Unimodality is not assumed: a coarse scan picks the bracket, Brent refines it.
    constexpr int n = 64;
    const double h = (1.0 - 2 * kDeltaClip) / n;
    int arg = 0;
    double best_val = INFINITY;
    for (int i = 0; i <= n; ++i) {
        const double v = length(kDeltaClip + i * h);
        if (v < best_val) best_val = v, arg = i;
    }
    const double lo = kDeltaClip + std::max(arg - 1, 0) * h, hi = kDeltaClip + std::min(arg + 1, n) * h;
    const auto best = numerics::minimize(length, lo, hi);
    if (best.value > best_val) return {kDeltaClip + arg * h, best_val};
    return {best.x, best.value};
}

inline double resolve_delta(const DeltaPolicy& policy, std::size_t m, std::size_t k, double alpha,
                            const ShiftFamily& family) {
    switch (policy.kind) {
        case DeltaPolicy::Kind::symmetric: return symmetric_delta(m, k);
        case DeltaPolicy::Kind::shortest: return optimize_delta(m, k, alpha, family).delta;
        case DeltaPolicy::Kind::fixed:
            detail::require(policy.delta > 0.0 && policy.delta < 1.0, "fixed delta must lie in (0,1)");
            return policy.delta;
    }
    return 0.5;
}

/// SoS intervals for the k largest of m estimates sharing one error family.
/// Returned in rank order.
inline std::vector<ConfidenceInterval> k_of_m_intervals(std::span<const double> y, std::size_t k, double alpha,
                                                        const DeltaPolicy& policy, const ShiftFamily& family) {
    const std::size_t m = y.size();
    detail::check_kma(m, k, alpha);
    const IntervalSpec spec = spec_from_delta(m, k, alpha, resolve_delta(policy, m, k, alpha, family), family);
    const SelectionResult sel = select_top_k(y, k);
    std::vector<ConfidenceInterval> out;
    out.reserve(k);
    for (std::size_t idx : sel.selected) out.push_back(spec.apply(idx, y[idx], policy.label()));
    return out;
}

/// Per-coordinate families (F0^i may differ).  Offsets for the coordinate at
/// rank i come from its own family.  The shortest policy needs one family.
inline std::vector<ConfidenceInterval> k_of_m_intervals(std::span<const double> y, std::size_t k, double alpha,
                                                        const DeltaPolicy& policy,
                                                        std::span<const ShiftFamily> families) {
    const std::size_t m = y.size();
    detail::check_kma(m, k, alpha);
    detail::require(families.size() == m, "k_of_m_intervals: need one family per coordinate");
    if (policy.kind == DeltaPolicy::Kind::shortest) {
        for (const auto& f : families)
            detail::require(f == families.front(), "k_of_m_intervals: shortest delta needs identical families");
    }
    const double delta = resolve_delta(policy, m, k, alpha, families.front());
    const SelectionResult sel = select_top_k(y, k);
    std::vector<ConfidenceInterval> out;
    out.reserve(k);
    for (std::size_t idx : sel.selected)
        out.push_back(spec_from_delta(m, k, alpha, delta, families[idx]).apply(idx, y[idx], policy.label()));
    return out;
}

} // namespace sosci
