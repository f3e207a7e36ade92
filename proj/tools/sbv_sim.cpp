// sbv-sim: config-driven sweeps for multi-operator copper access rates under
// shared non-vectored spectrum versus sub-band-vectored partitioning.
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sbvsim/sbvsim.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sbvsim::config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

struct CommonArgs {
    std::string config_path;
    std::string out_path;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-operator DSL spectrum-partitioning rate simulator"};
    app.require_subcommand(1);

    CommonArgs run_args;
    long long cli_seed = 0;
    bool cli_seed_set = false;
    int cli_trials = 0;
    bool dry_run = false;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", run_args.config_path, "experiment config file")->required();
    run->add_option("--out", run_args.out_path, "output CSV path (default: config value or stdout)");
    run->add_option("--seed", cli_seed, "override the master seed")->check(CLI::NonNegativeNumber);
    run->add_option("--trials", cli_trials, "override the trial count")->check(CLI::PositiveNumber);
    run->add_flag("--dry-run", dry_run, "validate config and print the resolved scenario");

    CommonArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Dump the band plan as CSV");
    plan_cmd->add_option("config", plan_args.config_path, "experiment config file")->required();
    plan_cmd->add_option("--out", plan_args.out_path, "output CSV path (default: stdout)");

    CommonArgs fairness_args;
    auto* fairness_cmd =
        app.add_subcommand("fairness", "Run a fairness sweep over the distance grid");
    fairness_cmd->add_option("config", fairness_args.config_path, "experiment config file")
        ->required();
    fairness_cmd->add_option("--out", fairness_args.out_path, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    cli_seed_set = run->count("--seed") > 0;

    try {
        if (run->parsed()) {
            sbvsim::ExperimentSpec spec = sbvsim::parse_experiment(read_file(run_args.config_path));
            spec.master_seed = sbvsim::resolve_master_seed(
                spec.master_seed, std::getenv("SBV_SIM_SEED"), cli_seed_set,
                static_cast<std::uint64_t>(cli_seed));
            if (cli_trials > 0) {
                if (cli_trials < 10) throw sbvsim::config_error("--trials must be >= 10");
                spec.trials = cli_trials;
            }
            if (!run_args.out_path.empty()) spec.out_path = run_args.out_path;
            if (dry_run) {
                std::cout << sbvsim::describe_experiment(spec);
                return 0;
            }
            write_output(spec.out_path, sbvsim::run_experiment(spec));
            return 0;
        }
        if (plan_cmd->parsed()) {
            const sbvsim::ExperimentSpec spec =
                sbvsim::parse_experiment(read_file(plan_args.config_path));
            const sbvsim::ToneGrid grid = sbvsim::build_tone_grid(spec.scenario.f_max_hz);
            const sbvsim::BandPlan plan =
                sbvsim::build_band_plan(grid, spec.scenario.n_operators, spec.policy,
                                        spec.scenario.f_max_hz, spec.scenario.lower_band_vectored);
            write_output(plan_args.out_path, sbvsim::plan_to_csv(plan));
            return 0;
        }
        if (fairness_cmd->parsed()) {
            const sbvsim::ExperimentSpec spec =
                sbvsim::parse_experiment(read_file(fairness_args.config_path));
            const sbvsim::FairnessReport report =
                sbvsim::fairness_sweep(spec.policy, spec.scenario, spec.cable, spec.fext,
                                       spec.d_min_m, spec.d_max_m, spec.d_step_m, spec.delta0);
            write_output(fairness_args.out_path, sbvsim::fairness_report_to_csv(report));
            return 0;
        }
    } catch (const sbvsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
