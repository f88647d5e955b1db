#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sosci/errors.hpp"

namespace sosci {

/// Interval construction methods.  The string labels are part of the CSV
/// output contract and must not change.
enum class MethodLabel {
    bonferroni,
    sidak,
    fcw_symmetric,
    fcw_shortest,
    sos_symmetric,
    sos_shortest,
    sos_fixed,
    fcr_selection_aware,
    unadjusted,
    larger_of_two,
    abs_max,
};

inline constexpr MethodLabel kTopKMethods[] = {
    MethodLabel::unadjusted,   MethodLabel::fcr_selection_aware, MethodLabel::fcw_shortest,
    MethodLabel::fcw_symmetric, MethodLabel::sos_shortest,       MethodLabel::sos_symmetric,
    MethodLabel::sidak,        MethodLabel::bonferroni,
};

inline std::string_view to_string(MethodLabel m) {
    switch (m) {
        case MethodLabel::bonferroni: return "bonferroni";
        case MethodLabel::sidak: return "sidak";
        case MethodLabel::fcw_symmetric: return "fcw_symmetric";
        case MethodLabel::fcw_shortest: return "fcw_shortest";
        case MethodLabel::sos_symmetric: return "sos_symmetric";
        case MethodLabel::sos_shortest: return "sos_shortest";
        case MethodLabel::sos_fixed: return "sos_fixed";
        case MethodLabel::fcr_selection_aware: return "fcr_selection_aware";
        case MethodLabel::unadjusted: return "unadjusted";
        case MethodLabel::larger_of_two: return "larger_of_two";
        case MethodLabel::abs_max: return "abs_max";
    }
    return "unknown";
}

/// Accepts the canonical label or its hyphenated spelling ("larger-of-two").
inline std::optional<MethodLabel> parse_method(std::string_view text) {
    std::string norm(text);
    for (char& ch : norm)
        if (ch == '-') ch = '_';
    for (auto m : {MethodLabel::bonferroni, MethodLabel::sidak, MethodLabel::fcw_symmetric,
                   MethodLabel::fcw_shortest, MethodLabel::sos_symmetric, MethodLabel::sos_shortest,
                   MethodLabel::sos_fixed, MethodLabel::fcr_selection_aware, MethodLabel::unadjusted, MethodLabel::larger_of_two,
                   MethodLabel::abs_max})
        if (to_string(m) == norm) return m;
    return std::nullopt;
}

/// Bivariate-only methods need m == 2.
inline bool is_bivariate(MethodLabel m) {
    return m == MethodLabel::larger_of_two || m == MethodLabel::abs_max;
}

struct ConfidenceInterval {
    std::size_t index = 0; // 0-based coordinate of the selected parameter
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    MethodLabel method = MethodLabel::unadjusted;

    double length() const noexcept { return hi - lo; }
    bool covers(double theta) const noexcept { return lo <= theta && theta <= hi; }
};

} // namespace sosci
