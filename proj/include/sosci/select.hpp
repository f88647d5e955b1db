#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "sosci/errors.hpp"

namespace sosci {

/// Indices are 0-based.  `selected` is in rank order (best first);
/// `ranks[r]` is the index occupying rank r among all m coordinates.
struct SelectionResult {
    std::vector<std::size_t> selected;
    std::vector<std::size_t> ranks;
};

namespace detail {

// Larger key first, smaller index on ties.
template <class Key>
void rank_by(std::span<const double> y, std::vector<std::size_t>& order, std::size_t k, Key key) {
    order.resize(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
        const double ka = key(y[a]), kb = key(y[b]);
        return ka > kb || (ka == kb && a < b);
    };
    if (k >= y.size())
        std::sort(order.begin(), order.end(), better);
    else
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
}

} // namespace detail

/// Allocation-free top-k for hot loops: the first k entries of `order`
/// receive the selected indices in rank order.
inline void top_k_into(std::span<const double> y, std::size_t k, std::vector<std::size_t>& order) {
    detail::rank_by(y, order, k, [](double v) { return v; });
}

inline SelectionResult select_top_k(std::span<const double> y, std::size_t k) {
    detail::require(k >= 1 && k <= y.size(), "select_top_k: need 1 <= k <= m");
    SelectionResult out;
    detail::rank_by(y, out.ranks, y.size(), [](double v) { return v; });
    out.selected.assign(out.ranks.begin(), out.ranks.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

inline std::size_t abs_max_index(double y1, double y2) noexcept {
    return std::abs(y2) > std::abs(y1) ? 1 : 0;
}

inline SelectionResult select_abs_max(std::span<const double> y) {
    detail::require(y.size() == 2, "select_abs_max: y must have exactly two coordinates");
    const std::size_t s = abs_max_index(y[0], y[1]);
    return SelectionResult{{s}, {s, 1 - s}};
}

} // namespace sosci
