#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "sosci/errors.hpp"

// Thin wrappers over Boost.Math kernels that translate failures into
// sosci::NumericalError.

namespace sosci::numerics {

/// Adaptive 15-point Gauss-Kronrod on [a, b]; throws if the error estimate
/// exceeds `abs_tol`.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, /*max_depth=*/15, /*tolerance=*/1e-11, &err);
    if (!std::isfinite(value) || err > abs_tol)
        throw NumericalError("quadrature did not converge (error estimate " + std::to_string(err) + ")");
    return value;
}

/// Root of an increasing-or-decreasing f on [lo, hi] by bisection until the
/// bracket is narrower than `tol`.  Returns the bracket.
template <class F>
std::pair<double, double> bisect(F&& f, double lo, double hi, double tol) {
    const double flo = f(lo), fhi = f(hi);
    if (!(std::isfinite(flo) && std::isfinite(fhi))) throw NumericalError("bisect: non-finite bracket value");
    if (flo == 0.0) return {lo, lo};
    if (fhi == 0.0) return {hi, hi};
    if ((flo < 0) == (fhi < 0)) throw NumericalError("bisect: root not bracketed");
    auto done = [tol](double l, double h) { return std::abs(h - l) <= tol; };
    std::uintmax_t max_iter = 200;
    return boost::math::tools::bisect(f, lo, hi, done, max_iter);
}

struct Minimum {
    double x;
    double value;
};

/// Minimize a 1-D function on [lo, hi] (Brent: golden-section steps with
/// parabolic acceleration).
template <class F>
Minimum minimize(F&& f, double lo, double hi) {
    std::uintmax_t max_iter = 500;
    const auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, 40, max_iter);
    if (!std::isfinite(fx)) throw NumericalError("minimize: objective is not finite at the optimum");
    return {x, fx};
}

} // namespace sosci::numerics
