#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/random/uniform_real_distribution.hpp>

#include "sosci/errors.hpp"
#include "sosci/rng.hpp"

namespace sosci {

/// Dependence structures for the correlated-estimator simulations.
struct CovarianceModel {
    enum class Kind { identity, ar, time_decay, block };

    Kind kind = Kind::identity;
    double rho = 0.0;
    // Block model: consecutive blocks of `block_size`; `block_count == 0`
    // tiles the whole dimension, otherwise coordinates past the last block
    // are independent.
    std::size_t block_size = 10;
    std::size_t block_count = 0;

    static CovarianceModel identity() { return {}; }
    static CovarianceModel ar(double rho) { return {Kind::ar, rho}; }
    static CovarianceModel time_decay() { return {Kind::time_decay}; }
    static CovarianceModel block(double rho, std::size_t block_size = 10, std::size_t block_count = 0) {
        return {Kind::block, rho, block_size, block_count};
    }

    std::string name() const {
        switch (kind) {
            case Kind::identity: return "identity";
            case Kind::ar: return "ar";
            case Kind::time_decay: return "time_decay";
            case Kind::block: return "block";
        }
        return "unknown";
    }

    bool operator==(const CovarianceModel&) const = default;
};

/// Lower-triangular L with L L^T = sigma.
inline Eigen::MatrixXd cholesky(const Eigen::MatrixXd& sigma) {
    detail::require(sigma.rows() == sigma.cols() && sigma.rows() > 0, "cholesky: matrix must be square");
    const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    detail::require(asym <= 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()),
                    "cholesky: matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: matrix is not positive definite");
    Eigen::MatrixXd lower = llt.matrixL();
    return lower;
}

/// Realize the model as a dim x dim covariance.  `seed` is only consumed by
/// the time-decay model (diagonal scale draws).
inline Eigen::MatrixXd build_covariance(const CovarianceModel& model, std::size_t dim, std::uint64_t seed = 0) {
    detail::require(dim >= 1, "build_covariance: dimension must be positive");
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n);
    switch (model.kind) {
        case CovarianceModel::Kind::identity:
            break;
        case CovarianceModel::Kind::ar:
            if (!(model.rho > -1.0 && model.rho < 1.0)) throw ConfigError("AR model needs |rho| < 1");
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    sigma(i, j) = std::pow(model.rho, static_cast<double>(std::abs(i - j)));
            break;
        case CovarianceModel::Kind::time_decay: {
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    if (i != j) sigma(i, j) = std::pow(static_cast<double>(std::abs(i - j)), -5.0) / 2.0;
            // Sigma = D^{1/2} Sigma* D^{1/2}, D diagonal with Uniform(1,3) entries.
            Engine rng = make_engine(seed, streams::time_decay_scales, 0);
            boost::random::uniform_real_distribution<double> unif(1.0, 3.0);
            Eigen::VectorXd root_d(n);
            for (Eigen::Index i = 0; i < n; ++i) root_d(i) = std::sqrt(unif(rng));
            sigma = root_d.asDiagonal() * sigma * root_d.asDiagonal();
            break;
        }
        case CovarianceModel::Kind::block: {
            if (model.block_size == 0) throw ConfigError("block model needs block_size >= 1");
            if (!(model.rho > -1.0 && model.rho < 1.0)) throw ConfigError("block model needs |rho| < 1");
            const std::size_t count = model.block_count == 0 ? (dim + model.block_size - 1) / model.block_size
                                                             : model.block_count;
            const std::size_t covered = std::min(dim, count * model.block_size);
            for (std::size_t i = 0; i < covered; ++i)
                for (std::size_t j = 0; j < covered; ++j)
                    if (i != j && i / model.block_size == j / model.block_size)
                        sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.rho;
            break;
        }
    }
    return sigma;
}

} // namespace sosci
