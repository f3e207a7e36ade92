#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sbvsim/config.hpp"
#include "sbvsim/errors.hpp"
#include "sbvsim/fairness.hpp"
#include "sbvsim/rate_engine.hpp"
#include "sbvsim/scenario.hpp"
#include "sbvsim/version.hpp"

namespace sbvsim {

enum class ExperimentKind {
    BandComparison, // per-band NV vs SBV rates across load levels
    FairnessVsB,    // inter-operator rate delta vs distance for several slot widths
    RateVsDistance, // aggregate p10 vs CAB-NT distance for several f_max
    RateVsFmax,     // aggregate p10 vs f_max at fixed distance
    Degradation,    // per-band SBV rate under varying vectoring degradation
};

inline const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::BandComparison: return "band_comparison";
        case ExperimentKind::FairnessVsB: return "fairness_vs_b";
        case ExperimentKind::RateVsDistance: return "rate_vs_distance";
        case ExperimentKind::RateVsFmax: return "rate_vs_fmax";
        case ExperimentKind::Degradation: return "degradation";
    }
    return "?";
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::BandComparison;
    Scenario scenario;
    CableModel cable;
    FextModel fext;
    PartitionPolicy policy;

    int trials = 1000;
    std::uint64_t master_seed = 1;
    std::string out_path;

    // Sweep axes; kind-specific defaults are filled at parse time.
    std::vector<double> distances_m;
    std::vector<double> f_max_list_hz;
    std::vector<double> r_v_db_list;
    std::vector<double> slot_width_list_hz;
    std::vector<int> n_us_list;
    std::vector<int> n_op_list;

    // Fairness distance grid.
    double d_min_m = 50.0;
    double d_max_m = 600.0;
    double d_step_m = 25.0;
    double delta0 = kDefaultFairnessThreshold;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

inline CableModel cable_from_config(const Config& cfg) {
    CableModel cable;
    cable.name = cfg.get_string("cable", "name", cable.name);
    cable.a0_db = cfg.get_double("cable", "a0", cable.a0_db);
    cable.a1_db = cfg.get_double("cable", "a1", cable.a1_db);
    cable.a2_db = cfg.get_double("cable", "a2", cable.a2_db);
    cable.valid_f_max_hz = cfg.get_double("cable", "valid_f_max_hz", cable.valid_f_max_hz);
    if (cable.a0_db < 0.0 || cable.a1_db < 0.0 || cable.a2_db < 0.0) {
        throw config_error("cable keys 'a0'/'a1'/'a2' must be non-negative");
    }
    return cable;
}

inline FextModel fext_from_config(const Config& cfg) {
    FextModel fext;
    fext.k99_db = cfg.get_double("fext", "k99_db", fext.k99_db);
    fext.f0_hz = cfg.get_double("fext", "f0_hz", fext.f0_hz);
    fext.l0_m = cfg.get_double("fext", "l0_m", fext.l0_m);
    fext.freq_exponent = cfg.get_double("fext", "freq_exponent", fext.freq_exponent);
    fext.length_exponent = cfg.get_double("fext", "length_exponent", fext.length_exponent);
    fext.fluct_mean_db = cfg.get_double("fext", "fluct_mean_db", fext.fluct_mean_db);
    fext.fluct_std_db = cfg.get_double("fext", "fluct_std_db", fext.fluct_std_db);
    if (fext.f0_hz <= 0.0 || fext.l0_m <= 0.0 || fext.fluct_std_db < 0.0) {
        throw config_error("fext keys 'f0_hz'/'l0_m' must be positive, 'fluct_std_db' >= 0");
    }
    return fext;
}

inline PartitionPolicy policy_from_config(const Config& cfg) {
    PartitionPolicy policy;
    const std::string name = cfg.get_string("plan", "policy", "alternate_tone");
    if (name == "alternate_tone") {
        policy.kind = PartitionKind::AlternateTone;
    } else if (name == "consecutive_block") {
        policy.kind = PartitionKind::ConsecutiveBlock;
    } else {
        throw config_error("plan key 'policy': expected alternate_tone or consecutive_block, got '" +
                           name + "'");
    }
    policy.slot_width_hz = cfg.get_double("plan", "slot_width_hz", policy.slot_width_hz);
    policy.swap = cfg.get_bool("plan", "swap", policy.swap);
    policy.guard_tones = static_cast<int>(cfg.get_int("plan", "guard_tones", policy.guard_tones));
    if (policy.slot_width_hz <= 0.0) {
        throw config_error("plan key 'slot_width_hz' must be positive");
    }
    if (policy.guard_tones < 0) {
        throw config_error("plan key 'guard_tones' must be >= 0");
    }
    return policy;
}

inline ExperimentKind kind_from_name(const std::string& name) {
    if (name == "band_comparison") return ExperimentKind::BandComparison;
    if (name == "fairness_vs_b") return ExperimentKind::FairnessVsB;
    if (name == "rate_vs_distance") return ExperimentKind::RateVsDistance;
    if (name == "rate_vs_fmax") return ExperimentKind::RateVsFmax;
    if (name == "degradation") return ExperimentKind::Degradation;
    throw config_error("experiment key 'kind': unknown experiment '" + name + "'");
}

template <typename T>
inline void sort_axis(std::vector<T>& axis, const char* key) {
    if (axis.empty()) throw config_error(std::string("experiment key '") + key + "' is empty");
    std::sort(axis.begin(), axis.end());
}

} // namespace detail

/// Parses a whole experiment file ([scenario], [cable], [fext], [plan],
/// [experiment]) and fills kind-specific axis defaults. Unknown keys anywhere
/// in the file are hard errors.
inline ExperimentSpec parse_experiment(const std::string& config_text) {
    const Config cfg = Config::parse(config_text);
    ExperimentSpec spec;
    spec.scenario = scenario_from_config(cfg);
    spec.cable = detail::cable_from_config(cfg);
    spec.fext = detail::fext_from_config(cfg);
    spec.policy = detail::policy_from_config(cfg);

    if (!cfg.has("experiment", "kind")) {
        throw config_error("missing required experiment key 'kind'");
    }
    spec.kind = detail::kind_from_name(cfg.get_string("experiment", "kind", ""));
    spec.trials = static_cast<int>(cfg.get_int("experiment", "trials", spec.trials));
    if (spec.trials < 10) throw config_error("experiment key 'trials' must be >= 10");
    spec.master_seed =
        static_cast<std::uint64_t>(cfg.get_int("experiment", "master_seed",
                                               static_cast<long>(spec.master_seed)));
    spec.out_path = cfg.get_string("experiment", "out", spec.out_path);

    switch (spec.kind) {
        case ExperimentKind::BandComparison:
            spec.distances_m = cfg.get_double_list("experiment", "distances_m", {100.0, 250.0});
            spec.n_us_list = cfg.get_int_list("experiment", "n_us_list", {2, 6, 12, 24});
            spec.n_op_list = cfg.get_int_list("experiment", "n_op_list", {2, 3});
            break;
        case ExperimentKind::FairnessVsB:
            spec.f_max_list_hz =
                cfg.get_double_list("experiment", "f_max_list_hz", {35.2e6, 105.6e6});
            spec.slot_width_list_hz = cfg.get_double_list(
                "experiment", "slot_width_list_hz", {1.1e6, 2.2e6, 4.4e6, 8.8e6, 17.6e6});
            break;
        case ExperimentKind::RateVsDistance:
            spec.distances_m = cfg.get_double_list(
                "experiment", "distances_m",
                {50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0, 450.0, 500.0});
            spec.f_max_list_hz = cfg.get_double_list("experiment", "f_max_list_hz",
                                                     {35.2e6, 52.8e6, 70.4e6, 88.0e6, 105.6e6});
            spec.n_us_list = cfg.get_int_list("experiment", "n_us_list", {12, 24});
            spec.n_op_list = cfg.get_int_list("experiment", "n_op_list", {2, 3});
            break;
        case ExperimentKind::RateVsFmax:
            spec.distances_m = cfg.get_double_list("experiment", "distances_m", {100.0});
            spec.f_max_list_hz = cfg.get_double_list("experiment", "f_max_list_hz",
                                                     {35.2e6, 52.8e6, 70.4e6, 88.0e6, 105.6e6});
            spec.n_us_list = cfg.get_int_list("experiment", "n_us_list", {12, 24});
            spec.n_op_list = cfg.get_int_list("experiment", "n_op_list", {2, 3});
            break;
        case ExperimentKind::Degradation:
            spec.distances_m = cfg.get_double_list("experiment", "distances_m", {100.0, 250.0});
            spec.r_v_db_list =
                cfg.get_double_list("experiment", "r_v_db_list", {6.0, 10.0, 14.0, 20.0});
            break;
    }
    if (!spec.distances_m.empty()) detail::sort_axis(spec.distances_m, "distances_m");
    spec.d_min_m = cfg.get_double("experiment", "d_min_m", spec.d_min_m);
    spec.d_max_m = cfg.get_double("experiment", "d_max_m", spec.d_max_m);
    spec.d_step_m = cfg.get_double("experiment", "d_step_m", spec.d_step_m);
    spec.delta0 = cfg.get_double("experiment", "delta0", spec.delta0);
    if (!spec.f_max_list_hz.empty()) detail::sort_axis(spec.f_max_list_hz, "f_max_list_hz");
    if (!spec.r_v_db_list.empty()) detail::sort_axis(spec.r_v_db_list, "r_v_db_list");
    if (!spec.slot_width_list_hz.empty()) {
        detail::sort_axis(spec.slot_width_list_hz, "slot_width_list_hz");
    }
    if (!spec.n_us_list.empty()) detail::sort_axis(spec.n_us_list, "n_us_list");
    if (!spec.n_op_list.empty()) detail::sort_axis(spec.n_op_list, "n_op_list");

    cfg.reject_unknown_keys();
    return spec;
}

/// Seed precedence: explicit CLI flag, then the SBV_SIM_SEED environment
/// variable, then the config file value.
inline std::uint64_t resolve_master_seed(std::uint64_t config_seed, const char* env_value,
                                         bool cli_set, std::uint64_t cli_seed) {
    if (cli_set) return cli_seed;
    if (env_value != nullptr && *env_value != '\0') {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(env_value, &used);
            if (used != std::string(env_value).size()) throw std::invalid_argument(env_value);
            return static_cast<std::uint64_t>(v);
        } catch (const std::exception&) {
            throw config_error("environment variable SBV_SIM_SEED: expected an unsigned integer");
        }
    }
    return config_seed;
}

namespace detail {

inline std::string csv_preamble(const ExperimentSpec& spec, const std::string& header) {
    char comment[128];
    std::snprintf(comment, sizeof(comment), "# config_hash=%016llx version=%s kind=%s\n",
                  static_cast<unsigned long long>(fnv1a64(scenario_to_config_text(spec.scenario))),
                  kVersion, to_string(spec.kind));
    return header + "\n" + comment;
}

inline long long rate_field(double bps) { return std::llround(bps); }

struct PercentilePair {
    PercentileResult nv;
    PercentileResult sbv;
};

// NV and SBV columns of one grid point share trial seeds, so the lower-band
// contribution is pairwise identical between the two.
inline PercentilePair run_point(const ExperimentSpec& spec, const Scenario& scenario) {
    const ToneGrid grid = build_tone_grid(scenario.f_max_hz);
    const BandPlan plan = build_band_plan(grid, scenario.n_operators, spec.policy,
                                          scenario.f_max_hz, scenario.lower_band_vectored);
    PercentilePair pair;
    pair.nv = monte_carlo_percentile(0, plan, scenario, spec.cable, spec.fext, spec.trials,
                                     spec.master_seed, RateKind::NvFullBand);
    pair.sbv = monte_carlo_percentile(0, plan, scenario, spec.cable, spec.fext, spec.trials,
                                      spec.master_seed, RateKind::Combined);
    return pair;
}

inline std::string run_band_comparison(const ExperimentSpec& spec) {
    std::string out = csv_preamble(spec, "n_op,d_m,n_us,band_number,nv_p10_bps,sbv_p10_bps");
    char line[160];
    for (int n_op : spec.n_op_list) {
        for (double d : spec.distances_m) {
            for (int n_us : spec.n_us_list) {
                Scenario scenario = spec.scenario;
                scenario.n_operators = n_op;
                scenario.cab_nt_distance_m = d;
                scenario.n_disturbers = n_us;
                const PercentilePair pair = run_point(spec, scenario);
                for (const auto& [band, nv_p10] : pair.nv.per_band_p10_bps) {
                    const auto it = pair.sbv.per_band_p10_bps.find(band);
                    const double sbv_p10 = it == pair.sbv.per_band_p10_bps.end() ? 0.0 : it->second;
                    std::snprintf(line, sizeof(line), "%d,%.6g,%d,%d,%lld,%lld\n", n_op, d, n_us,
                                  band, rate_field(nv_p10), rate_field(sbv_p10));
                    out += line;
                }
            }
        }
    }
    return out;
}

inline std::string run_rate_vs_distance(const ExperimentSpec& spec) {
    std::string out = csv_preamble(spec, "n_op,n_us,f_max_hz,d_m,nv_p10_bps,sbv_p10_bps");
    char line[160];
    for (int n_op : spec.n_op_list) {
        for (int n_us : spec.n_us_list) {
            for (double f_max : spec.f_max_list_hz) {
                for (double d : spec.distances_m) {
                    Scenario scenario = spec.scenario;
                    scenario.n_operators = n_op;
                    scenario.n_disturbers = n_us;
                    scenario.f_max_hz = f_max;
                    scenario.cab_nt_distance_m = d;
                    const PercentilePair pair = run_point(spec, scenario);
                    std::snprintf(line, sizeof(line), "%d,%d,%.0f,%.6g,%lld,%lld\n", n_op, n_us,
                                  f_max, d, rate_field(pair.nv.p10_bps),
                                  rate_field(pair.sbv.p10_bps));
                    out += line;
                }
            }
        }
    }
    return out;
}

inline std::string run_rate_vs_fmax(const ExperimentSpec& spec) {
    std::string out = csv_preamble(spec, "n_op,n_us,f_max_hz,nv_p10_bps,sbv_p10_bps");
    char line[160];
    for (int n_op : spec.n_op_list) {
        for (int n_us : spec.n_us_list) {
            for (double f_max : spec.f_max_list_hz) {
                Scenario scenario = spec.scenario;
                scenario.n_operators = n_op;
                scenario.n_disturbers = n_us;
                scenario.f_max_hz = f_max;
                scenario.cab_nt_distance_m = spec.distances_m.front();
                const PercentilePair pair = run_point(spec, scenario);
                std::snprintf(line, sizeof(line), "%d,%d,%.0f,%lld,%lld\n", n_op, n_us, f_max,
                              rate_field(pair.nv.p10_bps), rate_field(pair.sbv.p10_bps));
                out += line;
            }
        }
    }
    return out;
}

inline std::string run_degradation(const ExperimentSpec& spec) {
    std::string out = csv_preamble(spec, "d_m,r_v_db,band_number,sbv_p10_bps,nv_p10_bps");
    char line[160];
    for (double d : spec.distances_m) {
        for (double r_v : spec.r_v_db_list) {
            Scenario scenario = spec.scenario;
            scenario.cab_nt_distance_m = d;
            scenario.r_v_db = r_v;
            const PercentilePair pair = run_point(spec, scenario);
            for (const auto& [band, sbv_p10] : pair.sbv.per_band_p10_bps) {
                const auto it = pair.nv.per_band_p10_bps.find(band);
                const double nv_p10 = it == pair.nv.per_band_p10_bps.end() ? 0.0 : it->second;
                std::snprintf(line, sizeof(line), "%.6g,%.6g,%d,%lld,%lld\n", d, r_v, band,
                              rate_field(sbv_p10), rate_field(nv_p10));
                out += line;
            }
        }
    }
    return out;
}

inline std::string run_fairness_vs_b(const ExperimentSpec& spec) {
    std::string out = csv_preamble(spec, "f_max_hz,slot_width_hz,d_m,delta_rb");
    char line[160];
    for (double f_max : spec.f_max_list_hz) {
        for (double b_hz : spec.slot_width_list_hz) {
            Scenario scenario = spec.scenario;
            scenario.f_max_hz = f_max;
            PartitionPolicy policy = spec.policy;
            policy.kind = PartitionKind::ConsecutiveBlock;
            policy.slot_width_hz = b_hz;
            const FairnessReport report =
                fairness_sweep(policy, scenario, spec.cable, spec.fext, spec.d_min_m,
                               spec.d_max_m, spec.d_step_m, spec.delta0);
            for (std::size_t i = 0; i < report.distances_m.size(); ++i) {
                std::snprintf(line, sizeof(line), "%.0f,%.0f,%.6g,%.9f\n", f_max, b_hz,
                              report.distances_m[i], report.delta_rb[i]);
                out += line;
            }
        }
    }
    return out;
}

} // namespace detail

/// Runs the experiment and returns the CSV text (header, config-hash comment,
/// rows sorted by the key columns). Identical spec and seed give identical
/// bytes.
inline std::string run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case ExperimentKind::BandComparison: return detail::run_band_comparison(spec);
        case ExperimentKind::FairnessVsB: return detail::run_fairness_vs_b(spec);
        case ExperimentKind::RateVsDistance: return detail::run_rate_vs_distance(spec);
        case ExperimentKind::RateVsFmax: return detail::run_rate_vs_fmax(spec);
        case ExperimentKind::Degradation: return detail::run_degradation(spec);
    }
    throw invalid_parameter_error("run_experiment: unhandled experiment kind");
}

/// Human-readable resolution summary for --dry-run.
inline std::string describe_experiment(const ExperimentSpec& spec) {
    std::string out = "experiment: " + std::string(to_string(spec.kind)) + "\n";
    out += "trials: " + std::to_string(spec.trials) + "\n";
    out += "master_seed: " + std::to_string(spec.master_seed) + "\n";
    char hash[64];
    std::snprintf(hash, sizeof(hash), "config_hash: %016llx\n",
                  static_cast<unsigned long long>(
                      detail::fnv1a64(scenario_to_config_text(spec.scenario))));
    out += hash;
    out += scenario_to_config_text(spec.scenario);
    return out;
}

} // namespace sbvsim
