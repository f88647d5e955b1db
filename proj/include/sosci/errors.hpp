#pragma once

#include <stdexcept>
#include <string>

namespace sosci {

// Argument outside the mathematical domain of an operation (p not in (0,1), k > m, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid scenario or command configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Covariance matrix failed Cholesky factorization.
class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature non-convergence, unbracketed root, non-finite objective.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

} // namespace detail
} // namespace sosci
