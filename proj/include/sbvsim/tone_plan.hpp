#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sbvsim/errors.hpp"

namespace sbvsim {

/// DMT tone grid: tone k sits at frequency k * delta_f_hz.
struct ToneGrid {
    double delta_f_hz = 4312.5;
    double symbol_rate_hz = 4000.0;
    double f_max_hz = 35.2e6;
    int max_tone_index = 0;

    double tone_frequency(int k) const { return static_cast<double>(k) * delta_f_hz; }
};

inline ToneGrid build_tone_grid(double f_max_hz, double delta_f_hz = 4312.5) {
    if (!(delta_f_hz > 0.0)) {
        throw invalid_parameter_error("build_tone_grid: delta_f_hz must be positive");
    }
    if (!(f_max_hz >= delta_f_hz)) {
        throw invalid_parameter_error("build_tone_grid: f_max_hz must be >= delta_f_hz");
    }
    ToneGrid grid;
    grid.delta_f_hz = delta_f_hz;
    grid.f_max_hz = f_max_hz;
    // floor(f_max / delta_f), then nudge so that k*df <= f_max < (k+1)*df holds
    // exactly in floating point.
    auto k = static_cast<long long>(f_max_hz / delta_f_hz);
    while ((static_cast<double>(k) + 1.0) * delta_f_hz <= f_max_hz) ++k;
    while (k > 0 && static_cast<double>(k) * delta_f_hz > f_max_hz) --k;
    grid.max_tone_index = static_cast<int>(k);
    return grid;
}

/// Contiguous frequency band [f_start, f_stop) mapped onto a tone grid.
struct Band {
    int number = 0;
    double f_start_hz = 0.0;
    double f_stop_hz = 0.0;
    int first_tone = 0;
    int last_tone = -1; // inclusive; last < first means no tones on this grid

    int tone_count() const { return last_tone >= first_tone ? last_tone - first_tone + 1 : 0; }
    bool empty() const { return tone_count() == 0; }
};

namespace detail {

// Comparison band edges in Hz: three downstream VDSL2-17a bands below the
// partition edge, four 4.4 MHz-class slots up to 35.2 MHz.
struct BandEdge {
    double start;
    double stop;
};
inline constexpr std::array<BandEdge, 7> kComparisonBands = {{
    {0.138e6, 3.75e6},
    {5.2e6, 8.5e6},
    {14.0e6, 17.66e6},
    {17.66e6, 22.08e6},
    {22.08e6, 26.50e6},
    {26.50e6, 30.90e6},
    {30.90e6, 35.20e6},
}};

// Above 35.2 MHz, reporting continues in 4.4 MHz extension bands (8, 9, ...).
inline constexpr double kExtensionBandWidthHz = 4.4e6;

inline int first_tone_at_or_above(double f_hz, double delta_f_hz) {
    auto k = static_cast<long long>(std::ceil(f_hz / delta_f_hz));
    while (static_cast<double>(k) * delta_f_hz < f_hz) ++k;
    while (k > 0 && static_cast<double>(k - 1) * delta_f_hz >= f_hz) --k;
    return static_cast<int>(k);
}

inline int last_tone_below(double f_hz, double delta_f_hz) {
    auto k = static_cast<long long>(f_hz / delta_f_hz);
    while (static_cast<double>(k + 1) * delta_f_hz < f_hz) ++k;
    while (k >= 0 && static_cast<double>(k) * delta_f_hz >= f_hz) --k;
    return static_cast<int>(k);
}

} // namespace detail

/// Frequency below which spectrum stays shared between operators for
/// compatibility with deployed VDSL2-17a systems (edge of comparison band 3).
inline constexpr double kSharedBandEdgeHz = 17.66e6;

/// Band number for a frequency: 1..7 for the comparison bands, 8+ for the
/// 4.4 MHz extension bands above 35.2 MHz, 0 when the frequency falls in an
/// inter-band gap (upstream gaps and the sub-138 kHz region).
inline int band_number_for_frequency(double f_hz) {
    for (std::size_t i = 0; i < detail::kComparisonBands.size(); ++i) {
        if (f_hz >= detail::kComparisonBands[i].start && f_hz < detail::kComparisonBands[i].stop) {
            return static_cast<int>(i) + 1;
        }
    }
    if (f_hz >= 35.2e6) {
        return 8 + static_cast<int>((f_hz - 35.2e6) / detail::kExtensionBandWidthHz);
    }
    return 0;
}

/// The seven comparison bands used for per-band rate reporting, clipped to the
/// given grid. Band 4 holds 1024 tones on the default grid.
inline std::vector<Band> table2_bands(const ToneGrid& grid = build_tone_grid(35.2e6)) {
    std::vector<Band> bands;
    bands.reserve(detail::kComparisonBands.size());
    for (std::size_t i = 0; i < detail::kComparisonBands.size(); ++i) {
        Band b;
        b.number = static_cast<int>(i) + 1;
        b.f_start_hz = detail::kComparisonBands[i].start;
        b.f_stop_hz = detail::kComparisonBands[i].stop;
        b.first_tone = detail::first_tone_at_or_above(b.f_start_hz, grid.delta_f_hz);
        b.last_tone = std::min(detail::last_tone_below(b.f_stop_hz, grid.delta_f_hz),
                               grid.max_tone_index);
        bands.push_back(b);
    }
    return bands;
}

enum class PartitionKind {
    AlternateTone,    // round-robin tone assignment across operators
    ConsecutiveBlock, // uniform band slots of slot_width_hz, split into per-operator blocks
};

struct PartitionPolicy {
    PartitionKind kind = PartitionKind::AlternateTone;
    double slot_width_hz = 4.4e6; // the slot width B (ConsecutiveBlock only)
    bool swap = false;            // rotate the lowest-block owner across successive slots
    int guard_tones = 0;          // tones silenced on each side of an operator boundary
};

enum class Regime : std::uint8_t {
    Off,         // gap tone, never carries downstream bits
    Shared,      // below the shared-band edge, all operators transmit
    Partitioned, // above the edge, exclusively assigned and vectored
    Guard,       // silenced partition-boundary tone
};

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Off: return "off";
        case Regime::Shared: return "shared";
        case Regime::Partitioned: return "partitioned";
        case Regime::Guard: return "guard";
    }
    return "?";
}

/// Full spectrum plan: shared lower bands plus exclusively assigned upper tones.
/// Immutable after construction; safe for concurrent reads.
struct BandPlan {
    ToneGrid grid;
    int n_operators = 1;
    bool lower_band_vectored = false;
    PartitionPolicy policy;

    std::vector<Band> lower_bands; // comparison bands 1..3, clipped
    std::vector<Band> upper_bands; // comparison bands 4..7 plus extensions, clipped

    int first_upper_tone = 0;
    int last_upper_tone = -1; // inclusive; last < first when the plan has no upper spectrum

    /// Per tone index 0..max: owning operator for partitioned tones,
    /// -1 for non-partitioned tones, -2 for guard tones.
    std::vector<std::int8_t> assignment;
    /// Per tone index 0..max: band number (0 = gap).
    std::vector<std::uint8_t> band_number;

    std::vector<int> lower_tones;          // active shared tones (bands 1..3)
    std::vector<int> operator_tone_count;  // partitioned tones per operator

    bool has_upper() const { return last_upper_tone >= first_upper_tone; }
    int upper_tone_count() const {
        return has_upper() ? last_upper_tone - first_upper_tone + 1 : 0;
    }
    Regime regime_of(int tone) const {
        if (band_number[static_cast<std::size_t>(tone)] == 0) return Regime::Off;
        if (tone < first_upper_tone || tone > last_upper_tone) return Regime::Shared;
        if (assignment[static_cast<std::size_t>(tone)] == -2) return Regime::Guard;
        return Regime::Partitioned;
    }
};

namespace detail {

inline void assign_slot_blocks(std::vector<std::int8_t>& assignment, int slot_first, int slot_count,
                               int n_operators, bool swap, int slot_index) {
    const int base = slot_count / n_operators;
    int pos = slot_first;
    for (int block = 0; block < n_operators; ++block) {
        // remainder tones of an indivisible slot land in the last (highest) block
        const int count = (block == n_operators - 1) ? slot_count - base * (n_operators - 1) : base;
        const int owner = swap ? (block + slot_index) % n_operators : block;
        for (int t = 0; t < count; ++t) {
            assignment[static_cast<std::size_t>(pos++)] = static_cast<std::int8_t>(owner);
        }
    }
}

inline void apply_guard_tones(BandPlan& plan, int guard_tones) {
    if (guard_tones <= 0 || !plan.has_upper()) return;
    std::vector<int> boundaries;
    for (int k = plan.first_upper_tone; k < plan.last_upper_tone; ++k) {
        const auto a = plan.assignment[static_cast<std::size_t>(k)];
        const auto b = plan.assignment[static_cast<std::size_t>(k + 1)];
        if (a >= 0 && b >= 0 && a != b) boundaries.push_back(k);
    }
    for (int k : boundaries) {
        for (int g = 0; g < guard_tones; ++g) {
            const int below = k - g;
            const int above = k + 1 + g;
            if (below >= plan.first_upper_tone) {
                plan.assignment[static_cast<std::size_t>(below)] = -2;
            }
            if (above <= plan.last_upper_tone) {
                plan.assignment[static_cast<std::size_t>(above)] = -2;
            }
        }
    }
}

} // namespace detail

/// Builds the spectrum plan for n_operators under the given partitioning
/// policy. Lower comparison bands stay shared; every tone from the shared-band
/// edge up to f_max is assigned to exactly one operator (minus optional guard
/// tones). Under ConsecutiveBlock, each 17.6 MHz sub-channel is tiled with
/// slots of slot_width_hz (floored to the grid, final slot possibly short) and
/// every slot is split into n_operators consecutive blocks.
inline BandPlan build_band_plan(const ToneGrid& grid, int n_operators,
                                const PartitionPolicy& policy, double f_max_hz,
                                bool lower_band_vectored = false) {
    if (n_operators < 1) {
        throw invalid_parameter_error("build_band_plan: n_operators must be >= 1");
    }
    if (!(f_max_hz > 0.0) || f_max_hz > grid.f_max_hz + 0.5 * grid.delta_f_hz) {
        throw invalid_parameter_error("build_band_plan: f_max_hz must be positive and on the grid");
    }

    BandPlan plan;
    plan.grid = grid;
    plan.n_operators = n_operators;
    plan.lower_band_vectored = lower_band_vectored;
    plan.policy = policy;

    const int max_tone = std::min(grid.max_tone_index,
                                  detail::last_tone_below(f_max_hz + 0.5 * grid.delta_f_hz,
                                                          grid.delta_f_hz));
    plan.assignment.assign(static_cast<std::size_t>(max_tone) + 1, -1);
    plan.band_number.assign(static_cast<std::size_t>(max_tone) + 1, 0);
    for (int k = 0; k <= max_tone; ++k) {
        const int bn = band_number_for_frequency(grid.tone_frequency(k));
        plan.band_number[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(bn);
    }

    // Shared lower bands (1..3), clipped to the plan ceiling.
    for (const Band& b : table2_bands(grid)) {
        if (b.number > 3) break;
        Band clipped = b;
        clipped.last_tone = std::min(clipped.last_tone, max_tone);
        if (clipped.empty()) continue;
        plan.lower_bands.push_back(clipped);
        for (int k = clipped.first_tone; k <= clipped.last_tone; ++k) {
            plan.lower_tones.push_back(k);
        }
    }

    // Partitioned upper region.
    plan.first_upper_tone = detail::first_tone_at_or_above(kSharedBandEdgeHz, grid.delta_f_hz);
    plan.last_upper_tone = max_tone;
    plan.operator_tone_count.assign(static_cast<std::size_t>(n_operators), 0);

    if (plan.has_upper()) {
        if (policy.kind == PartitionKind::AlternateTone) {
            for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
                plan.assignment[static_cast<std::size_t>(k)] =
                    static_cast<std::int8_t>((k - plan.first_upper_tone) % n_operators);
            }
        } else {
            const int slot_tones = static_cast<int>(policy.slot_width_hz / grid.delta_f_hz);
            if (slot_tones < n_operators) {
                throw invalid_parameter_error(
                    "build_band_plan: slot_width_hz holds fewer tones than n_operators");
            }
            // Sub-channel boundaries: shared edge -> 35.2 MHz, then 17.6 MHz steps.
            int slot_index = 0;
            double sub_lo = kSharedBandEdgeHz;
            int next_tone = plan.first_upper_tone;
            while (next_tone <= plan.last_upper_tone) {
                const double sub_hi = (sub_lo < 35.2e6) ? 35.2e6 : sub_lo + 17.6e6;
                int sub_last = std::min(detail::last_tone_below(sub_hi, grid.delta_f_hz),
                                        plan.last_upper_tone);
                for (int s = next_tone; s <= sub_last; s += slot_tones) {
                    const int count = std::min(slot_tones, sub_last - s + 1);
                    detail::assign_slot_blocks(plan.assignment, s, count, n_operators,
                                               policy.swap, slot_index++);
                }
                next_tone = std::max(next_tone, sub_last + 1);
                sub_lo = sub_hi;
            }
        }
        detail::apply_guard_tones(plan, policy.guard_tones);
        for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
            const auto owner = plan.assignment[static_cast<std::size_t>(k)];
            if (owner >= 0) ++plan.operator_tone_count[static_cast<std::size_t>(owner)];
        }

        // Upper comparison + extension bands, clipped.
        for (const Band& b : table2_bands(grid)) {
            if (b.number < 4) continue;
            Band clipped = b;
            clipped.first_tone = std::max(clipped.first_tone, plan.first_upper_tone);
            clipped.last_tone = std::min(clipped.last_tone, plan.last_upper_tone);
            if (!clipped.empty()) plan.upper_bands.push_back(clipped);
        }
        double ext_lo = 35.2e6;
        int ext_number = 8;
        while (ext_lo < grid.tone_frequency(plan.last_upper_tone) + 0.5 * grid.delta_f_hz) {
            Band ext;
            ext.number = ext_number++;
            ext.f_start_hz = ext_lo;
            ext.f_stop_hz = ext_lo + detail::kExtensionBandWidthHz;
            ext.first_tone = detail::first_tone_at_or_above(ext_lo, grid.delta_f_hz);
            ext.last_tone = std::min(detail::last_tone_below(ext.f_stop_hz, grid.delta_f_hz),
                                     plan.last_upper_tone);
            if (!ext.empty()) plan.upper_bands.push_back(ext);
            ext_lo = ext.f_stop_hz;
        }
    }
    return plan;
}

struct OperatorTone {
    int tone = 0;
    Regime regime = Regime::Shared;
};

/// All tones one operator transmits on: the shared lower-band tones plus the
/// operator's exclusively assigned upper tones.
inline std::vector<OperatorTone> operator_tones(const BandPlan& plan, int operator_id) {
    if (operator_id < 0 || operator_id >= plan.n_operators) {
        throw invalid_parameter_error("operator_tones: unknown operator_id " +
                                      std::to_string(operator_id));
    }
    std::vector<OperatorTone> tones;
    tones.reserve(plan.lower_tones.size() +
                  static_cast<std::size_t>(plan.operator_tone_count[static_cast<std::size_t>(operator_id)]));
    for (int k : plan.lower_tones) tones.push_back({k, Regime::Shared});
    for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
        if (plan.assignment[static_cast<std::size_t>(k)] == operator_id) {
            tones.push_back({k, Regime::Partitioned});
        }
    }
    return tones;
}

/// CSV dump of the whole plan, one row per tone on the grid.
inline std::string plan_to_csv(const BandPlan& plan) {
    std::ostringstream out;
    out << "tone_index,f_hz,band_number,regime,operator_id\n";
    char line[96];
    for (int k = 0; k < static_cast<int>(plan.assignment.size()); ++k) {
        const Regime regime = plan.regime_of(k);
        const int op = plan.assignment[static_cast<std::size_t>(k)] >= 0
                           ? plan.assignment[static_cast<std::size_t>(k)]
                           : -1;
        std::snprintf(line, sizeof(line), "%d,%.1f,%d,%s,%d\n", k, plan.grid.tone_frequency(k),
                      static_cast<int>(plan.band_number[static_cast<std::size_t>(k)]),
                      to_string(regime), op);
        out << line;
    }
    return out.str();
}

} // namespace sbvsim
