#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sbvsim/config.hpp"
#include "sbvsim/errors.hpp"
#include "sbvsim/tone_plan.hpp"

namespace sbvsim {

/// Named binder load levels (number of active interfering pairs).
enum class LoadLevel { VeryLow = 2, Low = 6, Medium = 12, High = 24 };

/// Full experiment parameterization for one victim line.
struct Scenario {
    int n_operators = 2;
    int n_disturbers = static_cast<int>(LoadLevel::Medium);
    double cab_nt_distance_m = -1.0; // required; validated > 0
    double f_max_hz = 35.2e6;
    double r_v_db = 10.0;       // vectoring degradation, constant across tones
    double p_upper_dbm = 13.4;  // transmit power budget above the shared-band edge
    double p_total_dbm = 17.0;  // overall transmit power budget
    double gamma_db = 12.0;     // SNR gap
    double n0_dbm_hz = -140.0;  // background noise PSD
    double bit_min = 2.0;
    double bit_max = 15.0;
    bool lower_band_vectored = false;
    bool integer_bit_loading = false; // floor per-tone bits before clamping

    double gamma_linear() const { return std::pow(10.0, gamma_db / 10.0); }
    double r_v_linear() const { return std::pow(10.0, r_v_db / 10.0); }
    double n0_w_per_hz() const { return std::pow(10.0, n0_dbm_hz / 10.0) * 1e-3; }
    double p_upper_w() const { return std::pow(10.0, p_upper_dbm / 10.0) * 1e-3; }
    double p_total_w() const { return std::pow(10.0, p_total_dbm / 10.0) * 1e-3; }
};

inline void validate_scenario(const Scenario& s) {
    if (s.n_operators < 1) throw config_error("scenario key 'n_operators' must be >= 1");
    if (s.n_disturbers < 1) throw config_error("scenario key 'n_disturbers' must be >= 1");
    if (!(s.cab_nt_distance_m > 0.0)) {
        throw config_error("scenario key 'cab_nt_distance' must be a positive distance in meters");
    }
    if (!(s.f_max_hz >= 17.6e6)) {
        throw config_error("scenario key 'f_max' must be >= 17.6 MHz");
    }
    if (!(s.p_total_dbm > s.p_upper_dbm)) {
        throw config_error("scenario key 'p_total_dbm' must exceed 'p_upper_dbm'");
    }
    if (s.r_v_db < 0.0) throw config_error("scenario key 'r_v_db' must be >= 0");
    if (s.gamma_db < 0.0) throw config_error("scenario key 'gamma_db' must be >= 0");
    if (!(s.bit_min <= s.bit_max) || s.bit_min < 0.0) {
        throw config_error("scenario keys 'bit_min'/'bit_max' must satisfy 0 <= bit_min <= bit_max");
    }
}

namespace detail {

inline int parse_disturber_count(const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "very_low") return static_cast<int>(LoadLevel::VeryLow);
    if (v == "low") return static_cast<int>(LoadLevel::Low);
    if (v == "medium") return static_cast<int>(LoadLevel::Medium);
    if (v == "high") return static_cast<int>(LoadLevel::High);
    try {
        std::size_t used = 0;
        const int n = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw config_error("scenario key 'n_disturbers': expected a count or one of "
                           "very_low/low/medium/high, got '" + value + "'");
    }
}

} // namespace detail

/// Reads the [scenario] section of a parsed config, applying defaults for
/// omitted keys. Does not reject foreign keys — the caller owning the whole
/// file does that once all sections are consumed.
inline Scenario scenario_from_config(const Config& cfg) {
    Scenario s;
    s.n_operators = static_cast<int>(cfg.get_int("scenario", "n_operators", s.n_operators));
    if (cfg.has("scenario", "n_disturbers")) {
        s.n_disturbers = detail::parse_disturber_count(cfg.get_string("scenario", "n_disturbers", ""));
    }
    if (!cfg.has("scenario", "cab_nt_distance")) {
        throw config_error("missing required scenario key 'cab_nt_distance'");
    }
    s.cab_nt_distance_m = cfg.get_double("scenario", "cab_nt_distance", s.cab_nt_distance_m);
    s.f_max_hz = cfg.get_double("scenario", "f_max", s.f_max_hz);
    s.r_v_db = cfg.get_double("scenario", "r_v_db", s.r_v_db);
    s.p_upper_dbm = cfg.get_double("scenario", "p_upper_dbm", s.p_upper_dbm);
    s.p_total_dbm = cfg.get_double("scenario", "p_total_dbm", s.p_total_dbm);
    s.gamma_db = cfg.get_double("scenario", "gamma_db", s.gamma_db);
    s.n0_dbm_hz = cfg.get_double("scenario", "n0_dbm_hz", s.n0_dbm_hz);
    s.bit_min = cfg.get_double("scenario", "bit_min", s.bit_min);
    s.bit_max = cfg.get_double("scenario", "bit_max", s.bit_max);
    s.lower_band_vectored = cfg.get_bool("scenario", "lower_band_vectored", s.lower_band_vectored);
    s.integer_bit_loading = cfg.get_bool("scenario", "integer_bit_loading", s.integer_bit_loading);
    validate_scenario(s);
    return s;
}

/// Loads a scenario from config text (which may be a full experiment file).
/// Rejects unknown [scenario] keys; other sections belong to other loaders.
inline Scenario load_scenario(const std::string& config_text) {
    const Config cfg = Config::parse(config_text);
    const Scenario s = scenario_from_config(cfg);
    cfg.reject_unknown_keys("scenario");
    return s;
}

/// Canonical, lossless text form of a resolved scenario. Stable key order,
/// round-trips through load_scenario; also the input of the config hash.
inline std::string scenario_to_config_text(const Scenario& s) {
    char buf[64];
    std::string out = "[scenario]\n";
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
        out += buf;
    };
    put("bit_max", s.bit_max);
    put("bit_min", s.bit_min);
    put("cab_nt_distance", s.cab_nt_distance_m);
    put("f_max", s.f_max_hz);
    put("gamma_db", s.gamma_db);
    out += std::string("integer_bit_loading = ") + (s.integer_bit_loading ? "true" : "false") + "\n";
    out += std::string("lower_band_vectored = ") + (s.lower_band_vectored ? "true" : "false") + "\n";
    out += "n_disturbers = " + std::to_string(s.n_disturbers) + "\n";
    out += "n_operators = " + std::to_string(s.n_operators) + "\n";
    put("n0_dbm_hz", s.n0_dbm_hz);
    put("p_total_dbm", s.p_total_dbm);
    put("p_upper_dbm", s.p_upper_dbm);
    put("r_v_db", s.r_v_db);
    return out;
}

/// Flat per-tone transmit powers for one scenario/plan pair.
///
/// Shared-use (NV) powers split each region's budget over every tone in the
/// region; exclusive (SBV) powers split the upper budget over one operator's
/// assigned tones only. Power of tones that later load zero bits is never
/// re-allocated.
struct PowerAllocation {
    double p_tone_lower_w = 0.0;    // per shared lower-band tone
    double p_tone_nv_upper_w = 0.0; // per upper tone under shared use
    std::vector<double> p_tone_sbv_w; // per operator, on its assigned upper tones
    int lower_tone_count = 0;
    int upper_tone_count = 0;
    std::vector<int> operator_upper_tone_count;
    double lower_budget_w = 0.0;
    double upper_budget_w = 0.0;
};

inline PowerAllocation allocate_power(const Scenario& scenario, const BandPlan& plan) {
    if (std::abs(plan.grid.f_max_hz - scenario.f_max_hz) > 0.5 * plan.grid.delta_f_hz) {
        throw invalid_scenario_error("allocate_power: plan grid f_max differs from scenario f_max");
    }
    PowerAllocation alloc;
    alloc.upper_budget_w = scenario.p_upper_w();
    alloc.lower_budget_w = scenario.p_total_w() - scenario.p_upper_w();
    alloc.lower_tone_count = static_cast<int>(plan.lower_tones.size());
    alloc.upper_tone_count = plan.upper_tone_count();
    if (alloc.lower_tone_count == 0) {
        throw invalid_scenario_error("allocate_power: no active lower-band tones");
    }
    alloc.p_tone_lower_w = alloc.lower_budget_w / alloc.lower_tone_count;
    alloc.p_tone_nv_upper_w =
        alloc.upper_tone_count > 0 ? alloc.upper_budget_w / alloc.upper_tone_count : 0.0;
    alloc.operator_upper_tone_count = plan.operator_tone_count;
    alloc.p_tone_sbv_w.assign(static_cast<std::size_t>(plan.n_operators), 0.0);
    for (int op = 0; op < plan.n_operators; ++op) {
        const int count = plan.operator_tone_count[static_cast<std::size_t>(op)];
        if (count == 0) continue;
        // Evenly split tones take exactly n_operators times the shared per-tone
        // power; uneven splits fall back to budget / count per operator.
        if (count * plan.n_operators == alloc.upper_tone_count) {
            alloc.p_tone_sbv_w[static_cast<std::size_t>(op)] =
                static_cast<double>(plan.n_operators) * alloc.p_tone_nv_upper_w;
        } else {
            alloc.p_tone_sbv_w[static_cast<std::size_t>(op)] = alloc.upper_budget_w / count;
        }
    }
    return alloc;
}

} // namespace sbvsim
