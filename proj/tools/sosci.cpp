// sosci: simultaneous-over-selection confidence intervals from the command line.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sosci/commands.hpp"

namespace {

using namespace sosci;
using namespace sosci::cli;

struct Output {
    std::string format = "csv";
    std::string path;
};

void add_output_flags(CLI::App* cmd, Output& out) {
    cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", out.path, "Output file (default: stdout)");
}

void emit(const OutputTable& table, const Output& out) {
    const std::string text = table.render(out.format == "json" ? Format::json : Format::csv);
    if (out.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + out.path + "'");
    f << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence intervals with simultaneous coverage over selected parameters"};
    app.require_subcommand(1);
    Output out;
    std::uint64_t seed = 0;

    // intervals
    IntervalsOptions iv;
    std::string y_inline, y_file;
    std::size_t iv_k = 0;
    auto* intervals = app.add_subcommand("intervals", "Intervals for the selected coordinates of an estimate vector");
    intervals->add_option("--y", y_inline, "Comma-separated estimates");
    intervals->add_option("--input", y_file, "Single-column CSV with header 'y'")->check(CLI::ExistingFile);
    intervals->add_option("--k", iv_k, "Number of selected coordinates (default min(10, m))");
    intervals->add_option("--alpha", iv.alpha, "Level")->capture_default_str();
    intervals->add_option("--method", iv.method, "Method label, or 'sos' with --delta-policy")->capture_default_str();
    intervals->add_option("--delta-policy", iv.delta_policy, "symmetric | shortest | <delta in (0,1)>");
    intervals->add_option("--family", iv.family, "normal | t<df>")->capture_default_str();
    intervals->add_option("--seed", seed, "Unused; accepted for uniformity");
    add_output_flags(intervals, out);

    // compare
    CompareOptions cmp;
    std::size_t cmp_kmax = 0;
    auto* compare = app.add_subcommand("compare", "Interval lengths of every method across k");
    compare->add_option("--m", cmp.m)->capture_default_str();
    compare->add_option("--k-min", cmp.k_min)->capture_default_str();
    compare->add_option("--k-max", cmp_kmax, "Default m");
    compare->add_option("--alpha", cmp.alpha)->capture_default_str();
    compare->add_option("--seed", seed, "Unused; accepted for uniformity");
    add_output_flags(compare, out);

    // cplus-curve
    CPlusCurveOptions cpc;
    auto* cplus = app.add_subcommand("cplus-curve", "Acceptance-region constant c+ of the abs-max rule");
    cplus->add_option("--alpha", cpc.alpha)->capture_default_str();
    cplus->add_option("--a-max", cpc.a_max)->capture_default_str();
    cplus->add_option("--step", cpc.step)->capture_default_str();
    cplus->add_option("--seed", seed, "Unused; accepted for uniformity");
    add_output_flags(cplus, out);

    // delta-scan
    DeltaScanOptions ds;
    std::string ds_ks = "10";
    auto* dscan = app.add_subcommand("delta-scan", "Interval length as a function of delta");
    dscan->add_option("--m", ds.m)->capture_default_str();
    dscan->add_option("--k", ds_ks, "Comma-separated k values")->capture_default_str();
    dscan->add_option("--alpha", ds.alpha)->capture_default_str();
    dscan->add_option("--delta-from", ds.delta_from)->capture_default_str();
    dscan->add_option("--delta-to", ds.delta_to)->capture_default_str();
    dscan->add_option("--delta-step", ds.delta_step)->capture_default_str();
    dscan->add_option("--seed", seed, "Unused; accepted for uniformity");
    add_output_flags(dscan, out);

    // simulate
    SimulateOptions sim;
    std::string sim_models, sim_rho, sim_eta, sim_methods, sim_theta, sim_config;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo SoS coverage over a scenario grid");
    simulate->add_option("--config", sim_config, "key = value scenario file")->check(CLI::ExistingFile);
    auto* o_models = simulate->add_option("--sigma-model", sim_models, "ar, time_decay, block, identity (comma list)");
    auto* o_rho = simulate->add_option("--rho", sim_rho, "Comma-separated rho values (default per model)");
    auto* o_eta = simulate->add_option("--eta", sim_eta, "Comma-separated eta values (default 0,5,10,20,40)");
    auto* o_panel = simulate->add_option("--panel", sim.panel, "mixed | normal")->capture_default_str();
    auto* o_m = simulate->add_option("--m", sim.m)->capture_default_str();
    auto* o_k = simulate->add_option("--k", sim.k)->capture_default_str();
    auto* o_alpha = simulate->add_option("--alpha", sim.alpha)->capture_default_str();
    auto* o_reps = simulate->add_option("--reps", sim.reps)->capture_default_str();
    auto* o_seed = simulate->add_option("--seed", sim.seed)->capture_default_str();
    auto* o_methods = simulate->add_option("--methods", sim_methods, "Comma-separated method labels");
    auto* o_theta = simulate->add_option("--theta", sim_theta, "Fixed comma-separated theta (overrides eta)");
    auto* o_block = simulate->add_option("--block-size", sim.block_size)->capture_default_str();
    auto* o_threads = simulate->add_option("--threads", sim.threads)->capture_default_str();
    add_output_flags(simulate, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (intervals->parsed()) {
            if (!y_inline.empty() && !y_file.empty()) throw ConfigError("give either --y or --input, not both");
            iv.y = !y_file.empty() ? read_y_file(y_file) : parse_real_list(y_inline);
            if (intervals->count("--k")) iv.k = iv_k;
            emit(cmd_intervals(iv), out);
        } else if (compare->parsed()) {
            if (compare->count("--k-max")) cmp.k_max = cmp_kmax;
            emit(cmd_compare(cmp), out);
        } else if (cplus->parsed()) {
            emit(cmd_cplus_curve(cpc), out);
        } else if (dscan->parsed()) {
            ds.ks.clear();
            for (double k : parse_real_list(ds_ks)) {
                if (k < 1 || k != static_cast<double>(static_cast<std::size_t>(k)))
                    throw ConfigError("k values must be positive integers");
                ds.ks.push_back(static_cast<std::size_t>(k));
            }
            emit(cmd_delta_scan(ds), out);
        } else if (simulate->parsed()) {
            // Explicit flags override the config file, which overrides defaults.
            SimulateOptions opt = sim_config.empty() ? SimulateOptions{} : parse_simulate_config(slurp(sim_config));
            if (o_models->count()) opt.sigma_models = split(sim_models);
            if (o_rho->count()) opt.rhos = parse_real_list(sim_rho);
            if (o_eta->count()) opt.etas = parse_real_list(sim_eta);
            if (o_panel->count()) opt.panel = sim.panel;
            if (o_m->count()) opt.m = sim.m;
            if (o_k->count()) opt.k = sim.k;
            if (o_alpha->count()) opt.alpha = sim.alpha;
            if (o_reps->count()) opt.reps = sim.reps;
            if (o_seed->count()) opt.seed = sim.seed;
            if (o_methods->count()) opt.methods = split(sim_methods);
            if (o_theta->count()) opt.theta = parse_real_list(sim_theta);
            if (o_block->count()) opt.block_size = sim.block_size;
            if (o_threads->count()) opt.threads = sim.threads;
            emit(cmd_simulate(opt), out);
        }
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) { // ConfigError
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) { // DomainError
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
