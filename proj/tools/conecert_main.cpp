// Command-line front end: simulate | certify | verify | sweep | plot.

#include "conecert/runner.hpp"
#include "conecert/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

conecert::RunOptions make_options(const std::string& out_dir, long long seed, bool seed_set) {
    conecert::RunOptions options;
    if (!out_dir.empty()) {
        options.out_dir = out_dir;
    } else if (const char* env = std::getenv("CONECERT_OUT")) {
        options.out_dir = env;
    }
    if (seed_set) options.seed_override = static_cast<std::uint64_t>(seed);
    return options;
}

/// "2..6" or "4" -> [begin, end]
std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(conecert::kToolName) +
                 " - consensus simulation and certification toolkit"};
    app.set_version_flag("--version", conecert::kToolVersion);
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    long long seed = 0;
    bool seed_set = false;
    auto add_common = [&](CLI::App* cmd, bool scenario_required = true) {
        cmd->add_option("--scenario", scenario_path, "scenario file")->required(scenario_required);
        cmd->add_option("--out", out_dir, "output directory (default: $CONECERT_OUT or ./out)");
        cmd->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* simulate_cmd = app.add_subcommand("simulate", "integrate a scenario and write the CSV");
    add_common(simulate_cmd);

    std::string certify_input;
    auto* certify_cmd =
        app.add_subcommand("certify", "certify consensus from a scenario or a trajectory CSV");
    certify_cmd->add_option("--scenario", scenario_path, "scenario file");
    certify_cmd->add_option("--csv", certify_input, "trajectory CSV (alternative to --scenario)");
    certify_cmd->add_option("--out", out_dir, "output directory");
    certify_cmd->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_set = true; });

    conecert::VerifyOptions verify_options;
    std::string n_range = "2..6";
    auto* verify_cmd = app.add_subcommand(
        "verify", "run numerical verification suites (contraction|diameter|sandwich|two_cone|all)");
    verify_cmd->add_option("suite", verify_options.suite, "suite name")->required();
    verify_cmd->add_option("--n", n_range, "dimension or range, e.g. 2..6");
    verify_cmd->add_option("--samples", verify_options.samples, "samples per configuration");
    verify_cmd->add_option("--seed", verify_options.seed, "random seed");

    std::string sweep_parameter;
    std::vector<double> sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "rerun a scenario over a list of values");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--parameter", sweep_parameter, "flat key path, e.g. topology.delta")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "values to sweep");

    std::string plot_input, plot_kind = "states", plot_out = "plot.svg";
    int edge_i = 1, edge_j = 2;
    auto* plot_cmd = app.add_subcommand("plot", "emit an SVG from a CSV artifact");
    plot_cmd->add_option("--input", plot_input, "trajectory CSV or signal trace CSV")->required();
    plot_cmd->add_option("--kind", plot_kind, "states | metric | signal");
    plot_cmd->add_option("--out-file", plot_out, "output SVG path");
    plot_cmd->add_option("--edge-i", edge_i, "signal plot: listener node (1-based)");
    plot_cmd->add_option("--edge-j", edge_j, "signal plot: listened-to node (1-based)");

    CLI11_PARSE(app, argc, argv);

    try {
        const conecert::RunOptions options = make_options(out_dir, seed, seed_set);
        if (simulate_cmd->parsed()) {
            return conecert::run_simulate(scenario_path, options, std::cout);
        }
        if (certify_cmd->parsed()) {
            if (certify_input.empty() && scenario_path.empty()) {
                std::cerr << "error: certify needs --scenario or --csv\n";
                return conecert::kExitConfigError;
            }
            return conecert::run_certify(certify_input.empty() ? scenario_path : certify_input,
                                         options, std::cout);
        }
        if (verify_cmd->parsed()) {
            const auto [lo, hi] = parse_range(n_range);
            verify_options.n_begin = lo;
            verify_options.n_end = hi;
            return conecert::run_verify(verify_options, std::cout);
        }
        if (sweep_cmd->parsed()) {
            return conecert::run_sweep(scenario_path, sweep_parameter, sweep_values, options,
                                       std::cout);
        }
        if (plot_cmd->parsed()) {
            return conecert::run_plot(plot_input, plot_kind, plot_out, std::cout, edge_i, edge_j);
        }
    } catch (...) {
        return conecert::exit_code_for_current_exception(std::cerr);
    }
    return conecert::kExitConfigError;
}
