#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "sosci/covariance.hpp"
#include "sosci/errors.hpp"
#include "sosci/rng.hpp"

namespace sosci {

/// Fill `out` with theta + L z, z ~ N(0, I).
template <class URBG>
void draw_mvn_row(const Eigen::VectorXd& theta, const Eigen::MatrixXd& lower, URBG& rng,
                  Eigen::VectorXd& z, Eigen::VectorXd& out) {
    boost::random::normal_distribution<double> std_normal;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
    out.noalias() = lower.triangularView<Eigen::Lower>() * z;
    out += theta;
}

/// Fill `out` with theta + L z / sqrt(W / df): one chi-square mixing draw per row.
template <class URBG>
void draw_mvt_row(const Eigen::VectorXd& theta, const Eigen::MatrixXd& lower, int df, URBG& rng,
                  Eigen::VectorXd& z, Eigen::VectorXd& out) {
    boost::random::normal_distribution<double> std_normal;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
    boost::random::chi_squared_distribution<double> chi2(static_cast<double>(df));
    const double inv_root = 1.0 / std::sqrt(chi2(rng) / df);
    out.noalias() = lower.triangularView<Eigen::Lower>() * z;
    out *= inv_root;
    out += theta;
}

namespace detail {

inline Eigen::MatrixXd checked_factor(const Eigen::VectorXd& theta, const Eigen::MatrixXd& sigma) {
    require(sigma.rows() == theta.size() && sigma.cols() == theta.size(),
            "sampler: theta and sigma dimensions disagree");
    return cholesky(sigma);
}

} // namespace detail

/// reps x m matrix of N(theta, sigma) draws; row r comes from stream (seed, stream, r).
inline Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& theta, const Eigen::MatrixXd& sigma,
                                  std::size_t reps, std::uint64_t seed, std::uint64_t stream = 0) {
    const Eigen::MatrixXd lower = detail::checked_factor(theta, sigma);
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(reps), theta.size());
    Eigen::VectorXd z(theta.size()), row(theta.size());
    for (std::size_t r = 0; r < reps; ++r) {
        Engine rng = make_engine(seed, stream, r);
        draw_mvn_row(theta, lower, rng, z, row);
        draws.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return draws;
}

/// reps x m matrix of multivariate-t draws with location theta and scale sigma.
inline Eigen::MatrixXd sample_mvt(const Eigen::VectorXd& theta, const Eigen::MatrixXd& sigma, int df,
                                  std::size_t reps, std::uint64_t seed, std::uint64_t stream = 0) {
    detail::require(df >= 1, "sample_mvt: df must be >= 1");
    const Eigen::MatrixXd lower = detail::checked_factor(theta, sigma);
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(reps), theta.size());
    Eigen::VectorXd z(theta.size()), row(theta.size());
    for (std::size_t r = 0; r < reps; ++r) {
        Engine rng = make_engine(seed, stream, r);
        draw_mvt_row(theta, lower, df, rng, z, row);
        draws.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return draws;
}

} // namespace sosci
