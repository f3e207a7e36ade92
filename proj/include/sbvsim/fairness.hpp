#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "sbvsim/errors.hpp"
#include "sbvsim/rate_engine.hpp"

namespace sbvsim {

/// Default acceptable inter-operator rate difference.
inline constexpr double kDefaultFairnessThreshold = 0.05;

/// Relative spread of a set of operator rates: (max - min) / max, or 0 when
/// all rates are zero (equally served nothing).
inline double pairwise_rate_delta(const std::vector<double>& rates_bps) {
    if (rates_bps.size() < 2) {
        throw invalid_parameter_error("pairwise_rate_delta: need at least two operators");
    }
    double lo = rates_bps[0], hi = rates_bps[0];
    for (double r : rates_bps) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (hi <= 0.0) return 0.0;
    return (hi - lo) / hi;
}

/// Fraction of the data-rate difference between operators at distance d,
/// evaluated on the deterministic exclusive upper-band rates (the shared lower
/// band is identical for every operator and would only add noise).
/// For two operators this is |R1 - R2| / max(R1, R2); for more it generalizes
/// to the maximum pairwise difference over the maximum rate.
inline double rate_delta(const BandPlan& plan, const Scenario& scenario, const CableModel& cable,
                         const FextModel& fext, double d_m) {
    if (plan.n_operators < 2) {
        throw invalid_parameter_error("rate_delta: need at least two operators");
    }
    Scenario at_d = scenario;
    at_d.cab_nt_distance_m = d_m;
    RateEngine engine(plan, at_d, cable, fext);
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(plan.n_operators));
    for (int op = 0; op < plan.n_operators; ++op) {
        rates.push_back(engine.sbv_rate(op).aggregate_bps);
    }
    return pairwise_rate_delta(rates);
}

struct FairnessReport {
    std::vector<double> distances_m;
    std::vector<double> delta_rb; // one per distance, in [0, 1]
    double max_delta = 0.0;
    double slot_width_hz = 0.0; // 0 for alternate-tone plans
    double delta0 = kDefaultFairnessThreshold;
    bool passed = false;
    PartitionPolicy policy;
};

/// Evaluates rate_delta over a distance grid and checks it against delta0.
inline FairnessReport fairness_sweep(const PartitionPolicy& policy, const Scenario& scenario,
                                     const CableModel& cable, const FextModel& fext,
                                     double d_min_m, double d_max_m, double d_step_m,
                                     double delta0 = kDefaultFairnessThreshold) {
    if (!(d_min_m < d_max_m) || !(d_step_m > 0.0)) {
        throw invalid_parameter_error("fairness_sweep: need d_min < d_max and d_step > 0");
    }
    const ToneGrid grid = build_tone_grid(scenario.f_max_hz);
    const BandPlan plan = build_band_plan(grid, scenario.n_operators, policy, scenario.f_max_hz,
                                          scenario.lower_band_vectored);
    FairnessReport report;
    report.policy = policy;
    report.delta0 = delta0;
    report.slot_width_hz =
        policy.kind == PartitionKind::ConsecutiveBlock ? policy.slot_width_hz : 0.0;
    for (double d = d_min_m; d <= d_max_m + 1e-9; d += d_step_m) {
        report.distances_m.push_back(d);
        const double delta = rate_delta(plan, scenario, cable, fext, d);
        report.delta_rb.push_back(delta);
        report.max_delta = std::max(report.max_delta, delta);
    }
    report.passed = report.max_delta <= delta0;
    return report;
}

/// Picks the slot width: the largest candidate whose sweep stays within
/// delta0. Larger slots keep operators farther from partition boundaries, so
/// among passing candidates the widest wins. All candidates are scanned —
/// the delta/width relation is not assumed monotone.
inline std::optional<double> select_slot_width(const std::vector<double>& candidates_hz,
                                               const Scenario& scenario, const CableModel& cable,
                                               const FextModel& fext, double d_min_m,
                                               double d_max_m, double d_step_m, double delta0,
                                               bool swap = false) {
    if (candidates_hz.empty()) {
        throw invalid_parameter_error("select_slot_width: empty candidate list");
    }
    std::optional<double> best;
    for (double b_hz : candidates_hz) {
        PartitionPolicy policy;
        policy.kind = PartitionKind::ConsecutiveBlock;
        policy.slot_width_hz = b_hz;
        policy.swap = swap;
        const FairnessReport report =
            fairness_sweep(policy, scenario, cable, fext, d_min_m, d_max_m, d_step_m, delta0);
        if (report.passed && (!best || b_hz > *best)) best = b_hz;
    }
    return best;
}

inline std::string fairness_report_to_csv(const FairnessReport& report) {
    std::string out = "d_m,delta_rb,slot_width_hz,policy,swap\n";
    const char* policy_name =
        report.policy.kind == PartitionKind::ConsecutiveBlock ? "consecutive_block"
                                                              : "alternate_tone";
    char line[128];
    for (std::size_t i = 0; i < report.distances_m.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.6g,%.9f,%.0f,%s,%d\n", report.distances_m[i],
                      report.delta_rb[i], report.slot_width_hz, policy_name,
                      report.policy.swap ? 1 : 0);
        out += line;
    }
    return out;
}

} // namespace sbvsim
