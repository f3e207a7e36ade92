#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbvsim/channel.hpp"
#include "sbvsim/errors.hpp"
#include "sbvsim/rng.hpp"
#include "sbvsim/scenario.hpp"
#include "sbvsim/tone_plan.hpp"

namespace sbvsim {

/// Bits per DMT symbol carried by one tone under the gap approximation:
///   b = log2(1 + signal_gain * p_tone / ((eta * r_v + fext) * gamma)),
///   eta = noise_psd * delta_f.
/// Tones below bit_min are switched off; tones above bit_max are clamped.
/// Bits stay fractional unless floor_bits is set.
inline double tone_bits(double signal_gain, double p_tone_w, double noise_psd_w_hz,
                        double delta_f_hz, double fext_w, double r_v_linear, double gamma_linear,
                        double bit_min = 2.0, double bit_max = 15.0, bool floor_bits = false) {
    const double eta_w = noise_psd_w_hz * delta_f_hz * r_v_linear;
    double b = std::log2(1.0 + signal_gain * p_tone_w / ((eta_w + fext_w) * gamma_linear));
    if (floor_bits) b = std::floor(b);
    if (b < bit_min) return 0.0;
    return std::min(b, bit_max);
}

/// Total FEXT power received on one tone: sum over the disturbers of the
/// sampled coupling gain times the disturber's per-tone transmit power.
/// Disturbers are co-located with the victim (same loop length, coupling
/// length l = d unless overridden).
inline double fext_power(const FextModel& fext, const CableModel& cable, double f_hz, double d_m,
                         double l_m, const FextRealization& realization, int victim,
                         int n_disturbers, double p_disturber_tone_w) {
    if (victim < 0 || victim >= realization.n_victims) {
        throw invalid_parameter_error("fext_power: victim index out of range");
    }
    if (n_disturbers < 0 || n_disturbers > realization.n_disturbers) {
        throw invalid_parameter_error("fext_power: realization holds fewer disturbers than requested");
    }
    double total_w = 0.0;
    for (int m = 0; m < n_disturbers; ++m) {
        total_w += fext_gain_sampled(fext, cable, f_hz, d_m, l_m, realization.at(victim, m)) *
                   p_disturber_tone_w;
    }
    return total_w;
}

/// Per-operator rate split by comparison band.
struct RateResult {
    std::map<int, double> per_band_bps;
    double aggregate_bps = 0.0;
    int active_tone_count = 0;
    std::vector<double> per_tone_bits; // parallel to the evaluated tone set; diagnostics

    RateResult& operator+=(const RateResult& other) {
        for (const auto& [band, bps] : other.per_band_bps) per_band_bps[band] += bps;
        aggregate_bps += other.aggregate_bps;
        active_tone_count += other.active_tone_count;
        per_tone_bits.insert(per_tone_bits.end(), other.per_tone_bits.begin(),
                             other.per_tone_bits.end());
        return *this;
    }
};

/// Precomputed per-tone channel state for one (plan, scenario, cable, fext)
/// tuple. Rate evaluations over Monte Carlo trials reuse it; everything here
/// is immutable after construction.
class RateEngine {
public:
    RateEngine(const BandPlan& plan, const Scenario& scenario, const CableModel& cable,
               const FextModel& fext)
        : plan_(plan), scenario_(scenario), cable_(cable), fext_(fext),
          alloc_(allocate_power(scenario, plan)) {
        validate_scenario(scenario_);
        const double d = scenario_.cab_nt_distance_m;
        const double l = d; // co-located disturbers: coupling over the whole loop
        auto add_tone = [&](int k, bool upper) {
            ToneState t;
            t.tone = k;
            t.f_hz = plan_.grid.tone_frequency(k);
            t.band = plan_.band_number[static_cast<std::size_t>(k)];
            t.upper = upper;
            t.p_nv_w = upper ? alloc_.p_tone_nv_upper_w : alloc_.p_tone_lower_w;
            t.direct = direct_gain(cable_, t.f_hz, d);
            t.fext99 = fext_gain_99(fext_, cable_, t.f_hz, d, l);
            t.owner = upper ? plan_.assignment[static_cast<std::size_t>(k)] : std::int8_t{-1};
            tones_.push_back(t);
        };
        for (int k : plan_.lower_tones) add_tone(k, false);
        for (int k = plan_.first_upper_tone; k <= plan_.last_upper_tone; ++k) add_tone(k, true);
    }

    const PowerAllocation& allocation() const { return alloc_; }
    const BandPlan& plan() const { return plan_; }
    const Scenario& scenario() const { return scenario_; }

    /// Shared full-band rate: every active tone, FEXT from the first
    /// n_disturbers columns of the realization, no vectoring.
    RateResult nv_rate(int operator_id, const FextRealization& realization,
                       bool keep_per_tone_bits = false) const {
        require_operator(operator_id);
        const double w = fluctuation_weight(realization, operator_id);
        RateResult result;
        for (const ToneState& t : tones_) {
            const double fext_w = t.fext99 * w * t.p_nv_w;
            accumulate(result, t.band,
                       bits_for(t.direct, t.p_nv_w, fext_w, 1.0), keep_per_tone_bits);
        }
        finish(result);
        return result;
    }

    /// Exclusive vectored rate on the operator's assigned upper tones. No
    /// crosstalk term: same-operator FEXT is cancelled (up to the residual
    /// degradation r_v) and other operators never share these tones, so the
    /// result is deterministic.
    RateResult sbv_rate(int operator_id, bool keep_per_tone_bits = false) const {
        require_operator(operator_id);
        const double p_sbv = alloc_.p_tone_sbv_w[static_cast<std::size_t>(operator_id)];
        const double r_v = scenario_.r_v_linear();
        RateResult result;
        for (const ToneState& t : tones_) {
            if (!t.upper || t.owner != operator_id) continue;
            accumulate(result, t.band, bits_for(t.direct, p_sbv, 0.0, r_v), keep_per_tone_bits);
        }
        finish(result);
        return result;
    }

    /// Deployment rate of one operator: shared lower band (with crosstalk,
    /// unless the lower band is configured vectored) plus exclusive vectored
    /// upper band.
    RateResult combined_rate(int operator_id, const FextRealization& realization,
                             bool keep_per_tone_bits = false) const {
        require_operator(operator_id);
        const double w = fluctuation_weight(realization, operator_id);
        const double r_v = scenario_.r_v_linear();
        RateResult result;
        for (const ToneState& t : tones_) {
            if (t.upper) continue;
            double b;
            if (plan_.lower_band_vectored) {
                b = bits_for(t.direct, t.p_nv_w, 0.0, r_v);
            } else {
                b = bits_for(t.direct, t.p_nv_w, t.fext99 * w * t.p_nv_w, 1.0);
            }
            accumulate(result, t.band, b, keep_per_tone_bits);
        }
        finish(result);
        result += sbv_rate(operator_id, keep_per_tone_bits);
        return result;
    }

    /// Per-tone diagnostic CSV for one operator and one realization.
    std::string tone_dump_csv(int operator_id, const FextRealization& realization) const {
        require_operator(operator_id);
        const double w = fluctuation_weight(realization, operator_id);
        const double r_v = scenario_.r_v_linear();
        const double p_sbv = alloc_.p_tone_sbv_w[static_cast<std::size_t>(operator_id)];
        std::string out = "tone_index,f_hz,regime,operator_id,snr_db,bits,fext_w\n";
        char line[160];
        for (const ToneState& t : tones_) {
            double p = t.p_nv_w, fext_w = 0.0, noise_scale = 1.0, bits = 0.0;
            const Regime regime = plan_.regime_of(t.tone);
            if (!t.upper) {
                fext_w = plan_.lower_band_vectored ? 0.0 : t.fext99 * w * t.p_nv_w;
                noise_scale = plan_.lower_band_vectored ? r_v : 1.0;
                bits = bits_for(t.direct, p, fext_w, noise_scale);
            } else if (t.owner == operator_id) {
                p = p_sbv;
                noise_scale = r_v;
                bits = bits_for(t.direct, p, 0.0, noise_scale);
            } else {
                continue; // tone not transmitted by this operator
            }
            const double eta_w = scenario_.n0_w_per_hz() * plan_.grid.delta_f_hz * noise_scale;
            const double snr_db = 10.0 * std::log10(t.direct * p / (eta_w + fext_w));
            std::snprintf(line, sizeof(line), "%d,%.1f,%s,%d,%.4f,%.6f,%.8e\n", t.tone, t.f_hz,
                          to_string(regime), operator_id, snr_db, bits, fext_w);
            out += line;
        }
        return out;
    }

private:
    struct ToneState {
        int tone = 0;
        double f_hz = 0.0;
        int band = 0;
        bool upper = false;
        std::int8_t owner = -1;
        double p_nv_w = 0.0;
        double direct = 0.0;
        double fext99 = 0.0;
    };

    void require_operator(int operator_id) const {
        if (operator_id < 0 || operator_id >= plan_.n_operators) {
            throw invalid_parameter_error("rate engine: unknown operator_id " +
                                          std::to_string(operator_id));
        }
    }

    // Sum of linear fluctuation back-offs across the scenario's disturbers.
    // The per-pair draw is frequency-flat, so it factors out of the tone loop.
    double fluctuation_weight(const FextRealization& realization, int operator_id) const {
        if (realization.n_disturbers < scenario_.n_disturbers) {
            throw invalid_parameter_error(
                "rate engine: realization holds fewer disturbers than the scenario requests");
        }
        const int victim = operator_id % std::max(realization.n_victims, 1);
        double w = 0.0;
        for (int m = 0; m < scenario_.n_disturbers; ++m) {
            w += std::pow(10.0, -realization.at(victim, m) / 10.0);
        }
        return w;
    }

    double bits_for(double gain, double p_w, double fext_w, double r_v_linear) const {
        return tone_bits(gain, p_w, scenario_.n0_w_per_hz(), plan_.grid.delta_f_hz, fext_w,
                         r_v_linear, scenario_.gamma_linear(), scenario_.bit_min,
                         scenario_.bit_max, scenario_.integer_bit_loading);
    }

    static void accumulate(RateResult& result, int band, double bits, bool keep_bits) {
        if (keep_bits) result.per_tone_bits.push_back(bits);
        if (bits > 0.0) {
            result.per_band_bps[band] += bits;
            ++result.active_tone_count;
        }
    }

    void finish(RateResult& result) const {
        result.aggregate_bps = 0.0;
        for (auto& [band, bits] : result.per_band_bps) {
            bits *= plan_.grid.symbol_rate_hz;
            result.aggregate_bps += bits;
        }
    }

    BandPlan plan_;
    Scenario scenario_;
    CableModel cable_;
    FextModel fext_;
    PowerAllocation alloc_;
    std::vector<ToneState> tones_;
};

inline RateResult nv_rate(int operator_id, const BandPlan& plan, const Scenario& scenario,
                          const CableModel& cable, const FextModel& fext,
                          const FextRealization& realization) {
    return RateEngine(plan, scenario, cable, fext).nv_rate(operator_id, realization);
}

inline RateResult sbv_rate(int operator_id, const BandPlan& plan, const Scenario& scenario,
                           const CableModel& cable, const FextModel& fext) {
    return RateEngine(plan, scenario, cable, fext).sbv_rate(operator_id);
}

inline RateResult combined_operator_rate(int operator_id, const BandPlan& plan,
                                         const Scenario& scenario, const CableModel& cable,
                                         const FextModel& fext,
                                         const FextRealization& realization) {
    return RateEngine(plan, scenario, cable, fext).combined_rate(operator_id, realization);
}

/// Empirical quantile, lower (inverse-CDF) rule: no interpolation, the
/// smallest sample x with CDF(x) >= p.
inline double percentile_lower(std::vector<double> samples, double p) {
    if (samples.empty()) throw invalid_parameter_error("percentile_lower: no samples");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    auto index = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n))) - 1;
    index = std::min(index, samples.size() - 1);
    return samples[index];
}

struct PercentileResult {
    std::vector<double> samples; // aggregate bps, in trial order
    double p10_bps = 0.0;
    int trial_count = 0;
    std::uint64_t master_seed = 0;
    std::map<int, double> per_band_p10_bps; // same trial set, per comparison band
};

enum class RateKind { Combined, NvFullBand };

/// Runs `trials` independent crosstalk realizations and reduces to empirical
/// 10th percentiles. Trial seeds derive from the master seed, so reruns (and
/// any fan-out order) reproduce samples bit-identically.
inline PercentileResult monte_carlo_percentile(int operator_id, const BandPlan& plan,
                                               const Scenario& scenario, const CableModel& cable,
                                               const FextModel& fext, int trials,
                                               std::uint64_t master_seed,
                                               RateKind kind = RateKind::Combined) {
    if (trials < 10) {
        throw invalid_parameter_error("monte_carlo_percentile: trials must be >= 10");
    }
    RateEngine engine(plan, scenario, cable, fext);
    PercentileResult result;
    result.trial_count = trials;
    result.master_seed = master_seed;
    result.samples.reserve(static_cast<std::size_t>(trials));

    std::vector<int> bands;
    for (const Band& b : plan.lower_bands) bands.push_back(b.number);
    for (const Band& b : plan.upper_bands) bands.push_back(b.number);
    std::map<int, std::vector<double>> band_samples;
    for (int b : bands) band_samples[b].reserve(static_cast<std::size_t>(trials));

    for (int trial = 0; trial < trials; ++trial) {
        const auto seed = derive_trial_seed(master_seed, static_cast<std::uint64_t>(trial));
        const FextRealization realization = sample_fext(fext, 1, scenario.n_disturbers, seed);
        const RateResult rate = (kind == RateKind::Combined)
                                    ? engine.combined_rate(operator_id, realization)
                                    : engine.nv_rate(operator_id, realization);
        result.samples.push_back(rate.aggregate_bps);
        for (int b : bands) {
            const auto it = rate.per_band_bps.find(b);
            band_samples[b].push_back(it == rate.per_band_bps.end() ? 0.0 : it->second);
        }
    }
    result.p10_bps = percentile_lower(result.samples, 0.10);
    for (const auto& [band, samples] : band_samples) {
        result.per_band_p10_bps[band] = percentile_lower(samples, 0.10);
    }
    return result;
}

} // namespace sbvsim
