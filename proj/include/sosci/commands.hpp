#pragma once

// Command implementations behind the `sosci` CLI.  Each command is a pure
// function of its options and returns an OutputTable.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sosci/baselines.hpp"
#include "sosci/bivariate.hpp"
#include "sosci/covariance.hpp"
#include "sosci/dist.hpp"
#include "sosci/errors.hpp"
#include "sosci/interval.hpp"
#include "sosci/mc.hpp"
#include "sosci/sos.hpp"
#include "sosci/table.hpp"

namespace sosci::cli {

// ---------------------------------------------------------------------------
// Parsing helpers

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_real(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw ConfigError("not a finite number: '" + t + "'");
    return v;
}

inline std::vector<std::string> split(std::string_view text, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& f : split(text)) out.push_back(parse_real(f));
    return out;
}

/// Single-column CSV with header `y`.
inline std::vector<double> read_y_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("input file is empty");
    if (trim(line) != "y" && trim(line) != "\"y\"") throw ConfigError("input CSV must have header 'y'");
    std::vector<double> y;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        y.push_back(parse_real(t));
    }
    return y;
}

inline std::vector<double> read_y_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file '" + path + "'");
    return read_y_csv(in);
}

inline ShiftFamily parse_family(std::string_view text) {
    const std::string t = trim(text);
    if (t == "normal") return ShiftFamily::normal();
    if (t.size() > 1 && t[0] == 't') {
        const double df = parse_real(t.substr(1));
        if (df < 1 || df != std::floor(df)) throw ConfigError("t family needs an integer df >= 1");
        return ShiftFamily::student_t(static_cast<int>(df));
    }
    throw ConfigError("unknown family '" + t + "' (expected normal or t<df>)");
}

inline MethodLabel require_method(std::string_view text) {
    if (auto m = parse_method(trim(text))) return *m;
    throw ConfigError("unknown method '" + std::string(text) + "'");
}

inline Cell real(double x) { return x; }
inline Cell integer(std::size_t x) { return static_cast<std::int64_t>(x); }
inline Cell text(std::string_view s) { return std::string(s); }

// ---------------------------------------------------------------------------
// intervals

struct IntervalsOptions {
    std::vector<double> y;
    std::optional<std::size_t> k;      // default min(10, m)
    double alpha = 0.05;
    std::string method = "sos_shortest";
    std::string delta_policy;          // symmetric | shortest | <delta>; used with method "sos"
    std::string family = "normal";
};

inline OutputTable cmd_intervals(const IntervalsOptions& opt) {
    const std::vector<double>& y = opt.y;
    if (y.empty()) throw ConfigError("no estimates given");
    const std::size_t m = y.size();
    const std::size_t k = opt.k.value_or(std::min<std::size_t>(10, m));
    if (k < 1 || k > m) throw ConfigError("need 1 <= k <= m");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    const ShiftFamily family = parse_family(opt.family);

    std::vector<ConfidenceInterval> cis;
    double fixed_delta = 0.5;
    MethodLabel method;
    if (trim(opt.method) == "sos") {
        const std::string p = trim(opt.delta_policy.empty() ? "shortest" : opt.delta_policy);
        DeltaPolicy policy = p == "symmetric" ? DeltaPolicy::symmetric()
                           : p == "shortest"  ? DeltaPolicy::shortest()
                                              : DeltaPolicy::fixed(parse_real(p));
        if (policy.kind == DeltaPolicy::Kind::fixed && !(policy.delta > 0.0 && policy.delta < 1.0))
            throw ConfigError("delta must lie in (0,1)");
        fixed_delta = policy.delta;
        method = policy.label();
        cis = k_of_m_intervals(y, k, opt.alpha, policy, family);
    } else {
        method = require_method(opt.method);
        if (is_bivariate(method) && (m != 2 || k != 1)) throw ConfigError("bivariate methods need two estimates and k = 1");
        if (method == MethodLabel::larger_of_two) {
            cis = {larger_of_two_interval(y, opt.alpha, family)};
        } else if (method == MethodLabel::abs_max) {
            if (family.kind() != ShiftFamily::Kind::normal) throw ConfigError("abs_max assumes normal errors");
            cis = {abs_max_interval(y, opt.alpha)};
        } else if (method == MethodLabel::sos_shortest) {
            cis = k_of_m_intervals(y, k, opt.alpha, DeltaPolicy::shortest(), family);
        } else {
            if ((method == MethodLabel::fcw_shortest || method == MethodLabel::fcw_symmetric) &&
                family.kind() != ShiftFamily::Kind::normal)
                throw ConfigError("FCW intervals assume normal errors");
            if (method == MethodLabel::sos_fixed) {
                if (opt.delta_policy.empty()) throw ConfigError("sos_fixed needs --delta-policy <delta>");
                fixed_delta = parse_real(opt.delta_policy);
            }
            cis = top_k_intervals(y, k, opt.alpha, method, family, fixed_delta);
        }
    }

    OutputTable t({"index", "estimate", "lo", "hi", "method"});
    t.meta()["command"] = "intervals";
    t.meta()["m"] = m;
    t.meta()["k"] = k;
    t.meta()["alpha"] = opt.alpha;
    t.meta()["family"] = family.name();
    if (method == MethodLabel::sos_fixed) t.meta()["delta"] = fixed_delta;
    for (const auto& ci : cis)
        t.add_row({integer(ci.index + 1), real(ci.estimate), real(ci.lo), real(ci.hi), text(to_string(ci.method))});
    return t;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOptions {
    std::size_t m = 100;
    std::size_t k_min = 1;
    std::optional<std::size_t> k_max; // default m
    double alpha = 0.05;
};

inline OutputTable cmd_compare(const CompareOptions& opt) {
    const std::size_t k_max = opt.k_max.value_or(opt.m);
    if (opt.m < 1 || opt.k_min < 1 || opt.k_min > k_max || k_max > opt.m)
        throw ConfigError("need 1 <= k_min <= k_max <= m");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    OutputTable t({"k", "method", "length"});
    t.meta()["command"] = "compare";
    t.meta()["m"] = opt.m;
    t.meta()["alpha"] = opt.alpha;
    for (std::size_t k = opt.k_min; k <= k_max; ++k) {
        for (MethodLabel mth : kTopKMethods)
            t.add_row({integer(k), text(to_string(mth)), real(method_length(mth, opt.m, k, opt.alpha))});
        if (opt.m == 2 && k == 1)
            t.add_row({integer(k), text(to_string(MethodLabel::larger_of_two)),
                       real(2.0 * larger_of_two_interval(std::vector<double>{0.0, 0.0}, opt.alpha).hi)});
    }
    return t;
}

// ---------------------------------------------------------------------------
// cplus-curve

struct CPlusCurveOptions {
    double alpha = 0.05;
    double a_max = 8.0;
    double step = 0.01;
};

inline OutputTable cmd_cplus_curve(const CPlusCurveOptions& opt) {
    if (!(opt.step > 0.0) || !(opt.a_max > 0.0)) throw ConfigError("need step > 0 and a_max > 0");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    const CPlusCurve curve(opt.alpha, opt.a_max, opt.step);
    OutputTable t({"a", "c_plus"});
    t.meta()["command"] = "cplus-curve";
    t.meta()["alpha"] = opt.alpha;
    t.meta()["sidak"] = sidak2_constant(opt.alpha);
    t.meta()["unadjusted"] = unadjusted_halfwidth(opt.alpha);
    const auto knots = curve.knots();
    for (std::size_t i = 0; i < knots.size(); ++i)
        t.add_row({real(static_cast<double>(i) * curve.step()), real(knots[i])});
    return t;
}

// ---------------------------------------------------------------------------
// delta-scan

struct DeltaScanOptions {
    std::size_t m = 100;
    std::vector<std::size_t> ks = {10};
    double alpha = 0.05;
    double delta_from = 0.01;
    double delta_to = 0.99;
    double delta_step = 0.01;
};

inline OutputTable cmd_delta_scan(const DeltaScanOptions& opt) {
    if (!(opt.delta_from > 0.0 && opt.delta_to < 1.0 && opt.delta_from <= opt.delta_to && opt.delta_step > 0.0))
        throw ConfigError("delta grid must lie in (0,1) with a positive step");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (opt.ks.empty()) throw ConfigError("no k values given");
    OutputTable t({"m", "k", "delta", "length", "optimal"});
    t.meta()["command"] = "delta-scan";
    t.meta()["alpha"] = opt.alpha;
    const auto n = static_cast<std::size_t>(std::floor((opt.delta_to - opt.delta_from) / opt.delta_step + 1e-9));
    for (std::size_t k : opt.ks) {
        if (k < 1 || k > opt.m) throw ConfigError("need 1 <= k <= m");
        for (std::size_t i = 0; i <= n; ++i) {
            const double d = opt.delta_from + static_cast<double>(i) * opt.delta_step;
            t.add_row({integer(opt.m), integer(k), real(d),
                       real(sos_length(opt.m, k, opt.alpha, d, ShiftFamily::normal())), text("")});
        }
        const DeltaOptimum best = optimize_delta(opt.m, k, opt.alpha, ShiftFamily::normal());
        t.add_row({integer(opt.m), integer(k), real(best.delta), real(best.length), text("*")});
    }
    return t;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::vector<std::string> sigma_models = {"ar"}; // ar, time_decay, block, identity
    std::vector<double> rhos;                        // empty: per-model defaults
    std::vector<double> etas = {0, 5, 10, 20, 40};
    std::string panel = "mixed";                     // mixed | normal
    std::size_t m = 100;
    std::size_t k = 10;
    double alpha = 0.05;
    std::size_t reps = 50000;
    std::uint64_t seed = 0;
    std::vector<std::string> methods = {"sos_symmetric", "sos_shortest"};
    std::vector<double> theta;                       // fixed theta; overrides the Uniform(-1,1)*eta rule
    std::size_t block_size = 10;
    std::size_t threads = 1;
};

inline std::vector<double> default_rhos(CovarianceModel::Kind kind) {
    switch (kind) {
        case CovarianceModel::Kind::ar: return {0.3, 0.7};
        case CovarianceModel::Kind::block: return {0.0, 0.2, 0.5, 0.75, 0.9};
        default: return {0.0};
    }
}

inline CovarianceModel::Kind parse_sigma_model(std::string_view text) {
    std::string t = trim(text);
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "ar") return CovarianceModel::Kind::ar;
    if (t == "time_decay" || t == "td") return CovarianceModel::Kind::time_decay;
    if (t == "block") return CovarianceModel::Kind::block;
    if (t == "identity" || t == "independent") return CovarianceModel::Kind::identity;
    throw ConfigError("unknown sigma model '" + t + "'");
}

/// Stream id of one grid cell.  Depends only on the cell's own parameters so
/// a cell reproduces whether it is run alone or as part of a larger grid.
inline std::uint64_t cell_stream(CovarianceModel::Kind kind, double rho, double eta) {
    std::uint64_t h = SplitMix64::mix(static_cast<std::uint64_t>(kind) + 1);
    h = SplitMix64::mix(h ^ std::bit_cast<std::uint64_t>(rho + 0.0));
    h = SplitMix64::mix(h ^ std::bit_cast<std::uint64_t>(eta + 0.0));
    return h;
}

inline OutputTable cmd_simulate(const SimulateOptions& opt) {
    if (opt.reps < 1) throw ConfigError("reps must be >= 1");
    if (opt.k < 1 || opt.k > opt.m) throw ConfigError("need 1 <= k <= m");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (opt.sigma_models.empty() || opt.methods.empty()) throw ConfigError("need at least one sigma model and method");
    std::vector<MethodLabel> methods;
    for (const auto& s : opt.methods) methods.push_back(require_method(s));

    Scenario base;
    base.m = opt.m;
    base.reps = opt.reps;
    base.seed = opt.seed;
    const std::string panel = trim(opt.panel);
    if (panel == "mixed" || panel == "half_normal_half_t5")
        base.panel = Scenario::Panel::half_normal_half_t5;
    else if (panel == "normal" || panel == "all_normal")
        base.panel = Scenario::Panel::all_normal;
    else
        throw ConfigError("unknown panel '" + panel + "' (expected mixed or normal)");
    if (!opt.theta.empty()) {
        base.theta_rule = Scenario::ThetaRule::fixed;
        base.theta = opt.theta;
    }

    OutputTable t({"sigma_model", "rho", "eta", "method", "sos_rate", "se", "reps", "seed", "fcr_rate",
                   "lower_event_rate", "upper_event_rate"});
    t.meta()["command"] = "simulate";
    t.meta()["m"] = opt.m;
    t.meta()["k"] = opt.k;
    t.meta()["alpha"] = opt.alpha;
    t.meta()["panel"] = panel;
    t.meta()["theta_rule"] = opt.theta.empty() ? "uniform" : "fixed";

    const RunOptions run{opt.threads};
    for (const auto& name : opt.sigma_models) {
        const CovarianceModel::Kind kind = parse_sigma_model(name);
        const std::vector<double> rhos = opt.rhos.empty() ? default_rhos(kind) : opt.rhos;
        for (double rho : rhos) {
            CovarianceModel cov;
            cov.kind = kind;
            cov.rho = rho;
            cov.block_size = opt.block_size;
            const std::vector<double> etas = opt.theta.empty() ? opt.etas : std::vector<double>{0.0};
            for (double eta : etas) {
                Scenario s = base;
                s.covariance = cov;
                s.eta = eta;
                s.stream = cell_stream(kind, rho, eta);
                const auto reports = run_coverage(s, opt.k, methods, opt.alpha, run);
                for (const auto& r : reports)
                    t.add_row({text(cov.name()), real(rho), real(eta), text(to_string(r.method)), real(r.sos_rate),
                               real(r.sos_se), integer(r.reps), text(std::to_string(r.seed)), real(r.fcr_rate),
                               real(r.lower_event_rate), real(r.upper_event_rate)});
            }
        }
    }
    return t;
}

/// Key-value scenario file.  One `key = value` per line, `#` starts a
/// comment; list values are comma-separated.  Keys: sigma_model, rho, eta,
/// panel, m, k, alpha, reps, seed, methods, theta, block_size, threads.
inline SimulateOptions parse_simulate_config(std::string_view text, SimulateOptions opt = {}) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto as_count = [](const std::string& v) {
        const double x = parse_real(v);
        if (x < 0 || x != std::floor(x)) throw ConfigError("expected a nonnegative integer: '" + v + "'");
        return static_cast<std::size_t>(x);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::replace(key.begin(), key.end(), '-', '_');
        const std::string value = trim(body.substr(eq + 1));
        if (key == "sigma_model" || key == "sigma_models") opt.sigma_models = split(value);
        else if (key == "rho") opt.rhos = parse_real_list(value);
        else if (key == "eta") opt.etas = parse_real_list(value);
        else if (key == "panel") opt.panel = value;
        else if (key == "m") opt.m = as_count(value);
        else if (key == "k") opt.k = as_count(value);
        else if (key == "alpha") opt.alpha = parse_real(value);
        else if (key == "reps") opt.reps = as_count(value);
        else if (key == "seed") opt.seed = std::stoull(value);
        else if (key == "methods" || key == "method") opt.methods = split(value);
        else if (key == "theta") opt.theta = parse_real_list(value);
        else if (key == "block_size") opt.block_size = as_count(value);
        else if (key == "threads") opt.threads = as_count(value);
        else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return opt;
}

} // namespace sosci::cli
