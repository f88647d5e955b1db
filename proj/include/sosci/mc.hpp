#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "sosci/baselines.hpp"
#include "sosci/bivariate.hpp"
#include "sosci/covariance.hpp"
#include "sosci/dist.hpp"
#include "sosci/errors.hpp"
#include "sosci/interval.hpp"
#include "sosci/rng.hpp"
#include "sosci/sampling.hpp"
#include "sosci/select.hpp"

namespace sosci {

/// One simulation cell: how estimates Y are generated around theta.
struct Scenario {
    enum class ThetaRule { fixed, uniform };
    enum class Panel { all_normal, half_normal_half_t5 };

    std::size_t m = 100;
    ThetaRule theta_rule = ThetaRule::uniform;
    std::vector<double> theta;     // ThetaRule::fixed
    double eta = 0.0;              // ThetaRule::uniform: theta_i = eta * U_i, U_i ~ Uniform(-1,1)
    Panel panel = Panel::all_normal;
    CovarianceModel covariance;    // for the mixed panel, one copy per half
    std::size_t reps = 50000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;      // replicate streams are (seed, stream, r)
};

inline constexpr int kPanelTailDf = 5;

/// Empirical error rates of one method over `reps` replicates.
///
/// Event rates count replicates with at least one miss; the *_mean fields are
/// expected miss counts (E V_lower, E V_upper), which the SoS bound controls
/// by m * lambda_lower and k * lambda_upper.
struct CoverageReport {
    MethodLabel method = MethodLabel::unadjusted;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::size_t k = 0;

    double sos_rate = 0.0;
    double sos_se = 0.0;
    double fcr_rate = 0.0;
    double fcr_se = 0.0;
    double lower_event_rate = 0.0;
    double upper_event_rate = 0.0;
    double lower_event_se = 0.0;
    double upper_event_se = 0.0;
    double lower_miss_mean = 0.0;
    double upper_miss_mean = 0.0;
    double lower_miss_se = 0.0;
    double upper_miss_se = 0.0;

    // Nominal bounds m*lambda_lower and k*lambda_upper (NaN for abs_max).
    double lower_bound = NAN;
    double upper_bound = NAN;

    // Raw integer tallies; everything above is derived from these.
    std::uint64_t sos_count = 0;
    std::uint64_t lower_event_count = 0;
    std::uint64_t upper_event_count = 0;
    std::uint64_t lower_miss_total = 0;
    std::uint64_t upper_miss_total = 0;
    std::uint64_t lower_miss_sq = 0;
    std::uint64_t upper_miss_sq = 0;
    std::uint64_t miss_sq = 0; // sum over replicates of (V_lower + V_upper)^2

    bool operator==(const CoverageReport&) const = default;
};

inline double binomial_se(double p, std::size_t reps) {
    return reps == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

/// How a method turns a replicate into intervals.
struct MethodPlan {
    MethodLabel label = MethodLabel::unadjusted;
    std::vector<double> c_lower; // per coordinate
    std::vector<double> c_upper;
    double lower_bound = NAN;
    double upper_bound = NAN;
    const CPlusCurve* curve = nullptr; // abs_max only
};

/// Offsets of `method` for each coordinate's family.
inline MethodPlan plan_method(MethodLabel method, std::span<const ShiftFamily> families, std::size_t k, double alpha,
                              double fixed_delta = 0.5) {
    const std::size_t m = families.size();
    MethodPlan plan;
    plan.label = method;
    if (is_bivariate(method)) {
        if (m != 2 || k != 1) throw ConfigError(std::string(to_string(method)) + " needs m = 2 and k = 1");
    }
    if (method == MethodLabel::abs_max) {
        plan.curve = &CPlusCurve::shared(alpha);
        return plan;
    }
    const TailLevels t = method_tail_levels(method, m, k, alpha, fixed_delta);
    plan.lower_bound = static_cast<double>(m) * t.lower;
    plan.upper_bound = static_cast<double>(k) * t.upper;
    plan.c_lower.resize(m);
    plan.c_upper.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const IntervalSpec s = IntervalSpec::from_levels(t.lower, t.upper, families[i]);
        plan.c_lower[i] = s.c_lower;
        plan.c_upper[i] = s.c_upper;
    }
    return plan;
}

namespace detail {

struct Tally {
    std::uint64_t sos = 0, lower_event = 0, upper_event = 0;
    std::uint64_t lower_total = 0, upper_total = 0, lower_sq = 0, upper_sq = 0, miss_sq = 0;

    void add(std::uint64_t vl, std::uint64_t vu) {
        sos += (vl + vu) > 0;
        lower_event += vl > 0;
        upper_event += vu > 0;
        lower_total += vl;
        upper_total += vu;
        lower_sq += vl * vl;
        upper_sq += vu * vu;
        miss_sq += (vl + vu) * (vl + vu);
    }

    Tally& operator+=(const Tally& o) {
        sos += o.sos;
        lower_event += o.lower_event;
        upper_event += o.upper_event;
        lower_total += o.lower_total;
        upper_total += o.upper_total;
        lower_sq += o.lower_sq;
        upper_sq += o.upper_sq;
        miss_sq += o.miss_sq;
        return *this;
    }
};

inline double mean_se(std::uint64_t total, std::uint64_t sq, std::size_t reps, double scale = 1.0) {
    if (reps <= 1) return 0.0;
    const double n = static_cast<double>(reps);
    const double mean = static_cast<double>(total) / n;
    const double var = std::max(0.0, static_cast<double>(sq) / n - mean * mean);
    return std::sqrt(var / n) / scale;
}

inline CoverageReport finish(const MethodPlan& plan, const Tally& t, std::size_t k, std::size_t reps,
                             std::uint64_t seed) {
    CoverageReport r;
    r.method = plan.label;
    r.reps = reps;
    r.seed = seed;
    r.k = k;
    const double n = static_cast<double>(reps);
    r.sos_count = t.sos;
    r.lower_event_count = t.lower_event;
    r.upper_event_count = t.upper_event;
    r.lower_miss_total = t.lower_total;
    r.upper_miss_total = t.upper_total;
    r.lower_miss_sq = t.lower_sq;
    r.upper_miss_sq = t.upper_sq;
    r.miss_sq = t.miss_sq;
    r.sos_rate = static_cast<double>(t.sos) / n;
    r.sos_se = binomial_se(r.sos_rate, reps);
    r.lower_event_rate = static_cast<double>(t.lower_event) / n;
    r.upper_event_rate = static_cast<double>(t.upper_event) / n;
    r.lower_event_se = binomial_se(r.lower_event_rate, reps);
    r.upper_event_se = binomial_se(r.upper_event_rate, reps);
    r.lower_miss_mean = static_cast<double>(t.lower_total) / n;
    r.upper_miss_mean = static_cast<double>(t.upper_total) / n;
    r.lower_miss_se = mean_se(t.lower_total, t.lower_sq, reps);
    r.upper_miss_se = mean_se(t.upper_total, t.upper_sq, reps);
    const double kd = static_cast<double>(k);
    r.fcr_rate = static_cast<double>(t.lower_total + t.upper_total) / (n * kd);
    r.fcr_se = mean_se(t.lower_total + t.upper_total, t.miss_sq, reps, kd);
    r.lower_bound = plan.lower_bound;
    r.upper_bound = plan.upper_bound;
    return r;
}

} // namespace detail

struct RunOptions {
    std::size_t workers = 1;
    double fixed_delta = 0.5; // MethodLabel::sos_fixed
};

/// Core replicate loop.  `draw(rng, y)` writes one replicate of Y; replicate
/// r always uses engine (seed, stream, r), and tallies are integer sums, so
/// the result does not depend on `workers`.
template <class Draw>
std::vector<CoverageReport> run_coverage_with(Draw&& draw, const Eigen::VectorXd& theta, std::size_t k,
                                              std::span<const MethodPlan> plans, std::size_t reps,
                                              std::uint64_t seed, std::uint64_t stream, std::size_t workers = 1) {
    const auto m = static_cast<std::size_t>(theta.size());
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (k < 1 || k > m) throw ConfigError("need 1 <= k <= m");
    for (const auto& p : plans)
        if (p.label != MethodLabel::abs_max && p.c_lower.size() != m)
            throw ConfigError("method plan dimension does not match theta");

    auto work = [&](std::size_t r0, std::size_t r1, std::vector<detail::Tally>& tallies) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(m));
        std::vector<std::size_t> order;
        for (std::size_t r = r0; r < r1; ++r) {
            Engine rng = make_engine(seed, stream, r);
            draw(rng, y);
            const std::span<const double> ys(y.data(), m);
            top_k_into(ys, k, order);
            for (std::size_t p = 0; p < plans.size(); ++p) {
                const MethodPlan& plan = plans[p];
                std::uint64_t vl = 0, vu = 0;
                if (plan.label == MethodLabel::abs_max) {
                    const ConfidenceInterval ci = abs_max_interval(ys, *plan.curve, /*polish=*/false);
                    const double th = theta(static_cast<Eigen::Index>(ci.index));
                    vl = ci.lo > th;
                    vu = ci.hi < th;
                } else {
                    for (std::size_t i = 0; i < k; ++i) {
                        const std::size_t idx = order[i];
                        const double th = theta(static_cast<Eigen::Index>(idx));
                        vl += ys[idx] - plan.c_lower[idx] > th;
                        vu += ys[idx] + plan.c_upper[idx] < th;
                    }
                }
                tallies[p].add(vl, vu);
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, reps));
    std::vector<std::vector<detail::Tally>> partial(workers, std::vector<detail::Tally>(plans.size()));
    if (workers == 1) {
        work(0, reps, partial[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t r0 = reps * w / workers, r1 = reps * (w + 1) / workers;
            pool.emplace_back(work, r0, r1, std::ref(partial[w]));
        }
        for (auto& t : pool) t.join();
    }

    std::vector<CoverageReport> out;
    out.reserve(plans.size());
    for (std::size_t p = 0; p < plans.size(); ++p) {
        detail::Tally total;
        for (const auto& part : partial) total += part[p];
        out.push_back(detail::finish(plans[p], total, k, reps, seed));
    }
    return out;
}

/// True parameter vector of the scenario (before any noise).
inline Eigen::VectorXd scenario_theta(const Scenario& s) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(s.m));
    if (s.theta_rule == Scenario::ThetaRule::fixed) {
        if (s.theta.size() != s.m) throw ConfigError("fixed theta must have m entries");
        for (std::size_t i = 0; i < s.m; ++i) theta(static_cast<Eigen::Index>(i)) = s.theta[i];
        return theta;
    }
    if (!(s.eta >= 0.0) || !std::isfinite(s.eta)) throw ConfigError("eta must be a nonnegative real");
    // Drawn from the master seed only, so every cell of an eta sweep shares U.
    Engine rng = make_engine(s.seed, streams::theta_draw, 0);
    boost::random::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (std::size_t i = 0; i < s.m; ++i) theta(static_cast<Eigen::Index>(i)) = s.eta * unif(rng);
    return theta;
}

namespace detail {

inline std::size_t block_dimension(const Scenario& s) {
    if (s.panel == Scenario::Panel::all_normal) return s.m;
    if (s.m % 2 != 0) throw ConfigError("the mixed normal/t panel needs an even m");
    return s.m / 2;
}

} // namespace detail

/// Error family of every coordinate: normal or t5, scaled by sqrt(Sigma_ii).
inline std::vector<ShiftFamily> scenario_families(const Scenario& s, const Eigen::MatrixXd& sigma) {
    const std::size_t h = detail::block_dimension(s);
    std::vector<ShiftFamily> fam;
    fam.reserve(s.m);
    for (std::size_t i = 0; i < s.m; ++i) {
        const double sd = std::sqrt(sigma(static_cast<Eigen::Index>(i % h), static_cast<Eigen::Index>(i % h)));
        if (s.panel == Scenario::Panel::half_normal_half_t5 && i >= h)
            fam.push_back(ShiftFamily::student_t(kPanelTailDf, sd));
        else
            fam.push_back(ShiftFamily::normal(sd));
    }
    return fam;
}

/// Run several methods on the same replicates of one scenario.
inline std::vector<CoverageReport> run_coverage(const Scenario& s, std::size_t k, std::span<const MethodLabel> methods,
                                                double alpha, const RunOptions& opt = {}) {
    if (s.m < 1) throw ConfigError("m must be >= 1");
    if (s.reps < 1) throw ConfigError("reps must be >= 1");
    if (k < 1 || k > s.m) throw ConfigError("need 1 <= k <= m");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    const std::size_t h = detail::block_dimension(s);
    const Eigen::MatrixXd sigma = build_covariance(s.covariance, h, s.seed);
    const Eigen::MatrixXd lower = cholesky(sigma);
    const Eigen::VectorXd theta = scenario_theta(s);
    const std::vector<ShiftFamily> families = scenario_families(s, sigma);

    std::vector<MethodPlan> plans;
    for (MethodLabel mth : methods) plans.push_back(plan_method(mth, families, k, alpha, opt.fixed_delta));

    const auto hi = static_cast<Eigen::Index>(h);
    const bool mixed = s.panel == Scenario::Panel::half_normal_half_t5;
    const Eigen::VectorXd head = theta.head(hi);
    const Eigen::VectorXd tail = mixed ? Eigen::VectorXd(theta.tail(hi)) : Eigen::VectorXd();
    auto draw = [&, hi, mixed](Engine& rng, Eigen::VectorXd& y) {
        thread_local Eigen::VectorXd z, part;
        z.resize(hi);
        part.resize(hi);
        draw_mvn_row(head, lower, rng, z, part);
        y.head(hi) = part;
        if (mixed) {
            draw_mvt_row(tail, lower, kPanelTailDf, rng, z, part);
            y.tail(hi) = part;
        }
    };
    return run_coverage_with(draw, theta, k, plans, s.reps, s.seed, s.stream, opt.workers);
}

inline CoverageReport run_coverage(const Scenario& s, std::size_t k, MethodLabel method, double alpha,
                                   const RunOptions& opt = {}) {
    const MethodLabel one[] = {method};
    return run_coverage(s, k, one, alpha, opt).front();
}

/// Fraction of N(mu, I_2) draws in B_{mu,c}: the abs-max-selected coordinate
/// lies within c of its mean.
inline double estimate_b_probability(double mu1, double mu2, double c, std::size_t reps, std::uint64_t seed,
                                     std::uint64_t stream = 0) {
    detail::require(reps >= 1, "estimate_b_probability: reps must be >= 1");
    boost::random::normal_distribution<double> std_normal;
    std::uint64_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        Engine rng = make_engine(seed, stream, r);
        const double y1 = mu1 + std_normal(rng);
        const double y2 = mu2 + std_normal(rng);
        hits += abs_max_index(y1, y2) == 0 ? std::abs(y1 - mu1) <= c : std::abs(y2 - mu2) <= c;
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

} // namespace sosci
