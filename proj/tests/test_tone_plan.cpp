#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "sbvsim/tone_plan.hpp"

using namespace sbvsim;

TEST_CASE("tone grid indexing") {
    SECTION("floor of f_max over delta_f") {
        // Oracle: integer arithmetic, k * 43125 <= 10 * f_max < (k+1) * 43125.
        CHECK(build_tone_grid(35.2e6).max_tone_index == 8162);
        CHECK(build_tone_grid(4312.5).max_tone_index == 1);
        CHECK(build_tone_grid(105.6e6).max_tone_index == 24486);
        CHECK(build_tone_grid(17.6e6).max_tone_index == 4081);
    }
    SECTION("grid invariant holds around the boundary") {
        for (double f_max : {20e6, 35.2e6, 52.8e6, 105.6e6, 35.2e6 + 1.0, 35.2e6 - 1.0}) {
            const ToneGrid g = build_tone_grid(f_max);
            CHECK(g.tone_frequency(g.max_tone_index) <= f_max);
            CHECK(g.tone_frequency(g.max_tone_index + 1) > f_max);
        }
    }
    SECTION("invalid parameters") {
        CHECK_THROWS_AS(build_tone_grid(35.2e6, 0.0), invalid_parameter_error);
        CHECK_THROWS_AS(build_tone_grid(35.2e6, -4312.5), invalid_parameter_error);
        CHECK_THROWS_AS(build_tone_grid(1000.0, 4312.5), invalid_parameter_error);
    }
}

TEST_CASE("comparison bands") {
    const auto bands = table2_bands();
    REQUIRE(bands.size() == 7);

    SECTION("frequency ranges") {
        CHECK(bands[0].f_start_hz == 0.138e6);
        CHECK(bands[0].f_stop_hz == 3.75e6);
        CHECK(bands[6].f_start_hz == 30.90e6);
        CHECK(bands[6].f_stop_hz == 35.20e6);
    }
    SECTION("tone ranges on the default grid") {
        const int first[7] = {32, 1206, 3247, 4096, 5120, 6145, 7166};
        const int last[7] = {869, 1971, 4095, 5119, 6144, 7165, 8162};
        for (int i = 0; i < 7; ++i) {
            CHECK(bands[i].first_tone == first[i]);
            CHECK(bands[i].last_tone == last[i]);
        }
        CHECK(bands[3].tone_count() == 1024); // about 4.4 MHz of tones
    }
    SECTION("bandwidths match the frequency ranges after grid rounding") {
        for (int i = 0; i < 7; ++i) {
            const double width_hz = bands[i].tone_count() * 4312.5;
            CHECK(std::abs(width_hz - (bands[i].f_stop_hz - bands[i].f_start_hz)) <= 2 * 4312.5);
        }
    }
    SECTION("every tone frequency lies inside its band") {
        for (const Band& b : bands) {
            CHECK(b.first_tone * 4312.5 >= b.f_start_hz);
            CHECK(b.last_tone * 4312.5 < b.f_stop_hz);
        }
    }
    SECTION("band lookup by frequency") {
        CHECK(band_number_for_frequency(1e6) == 1);
        CHECK(band_number_for_frequency(4e6) == 0);   // upstream gap
        CHECK(band_number_for_frequency(17.66e6) == 4); // half-open boundary
        CHECK(band_number_for_frequency(36e6) == 8);
        CHECK(band_number_for_frequency(105e6) == 23);
    }
}

namespace {

PartitionPolicy consecutive(double b_hz, bool swap = false, int guard = 0) {
    PartitionPolicy p;
    p.kind = PartitionKind::ConsecutiveBlock;
    p.slot_width_hz = b_hz;
    p.swap = swap;
    p.guard_tones = guard;
    return p;
}

} // namespace

TEST_CASE("band plan construction") {
    const ToneGrid grid = build_tone_grid(35.2e6);

    SECTION("single operator owns all upper tones") {
        const BandPlan plan = build_band_plan(grid, 1, PartitionPolicy{}, 35.2e6);
        REQUIRE(plan.has_upper());
        CHECK(plan.first_upper_tone == 4096);
        CHECK(plan.last_upper_tone == 8162);
        CHECK(plan.operator_tone_count[0] == plan.upper_tone_count());
        for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
            CHECK(plan.assignment[static_cast<std::size_t>(k)] == 0);
        }
    }
    SECTION("alternate tones interleave even and odd indexes") {
        const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, 35.2e6);
        for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
            CHECK(plan.assignment[static_cast<std::size_t>(k)] == (k % 2 == 0 ? 0 : 1));
        }
    }
    SECTION("consecutive blocks keep operator 0 below operator 1 in every slot") {
        const BandPlan plan = build_band_plan(grid, 2, consecutive(4.4e6), 35.2e6);
        const int slot_tones = 1020; // floor(4.4 MHz / delta_f)
        for (int slot_first = 4096; slot_first <= 8162; slot_first += slot_tones) {
            const int slot_last = std::min(slot_first + slot_tones - 1, 8162);
            int last_op0 = -1, first_op1 = slot_last + 1;
            for (int k = slot_first; k <= slot_last; ++k) {
                if (plan.assignment[static_cast<std::size_t>(k)] == 0) last_op0 = std::max(last_op0, k);
                if (plan.assignment[static_cast<std::size_t>(k)] == 1) first_op1 = std::min(first_op1, k);
            }
            CHECK(last_op0 < first_op1);
        }
    }
    SECTION("remainder tones go to the last block") {
        // Final slot of the 35.2 MHz sub-channel holds 1007 tones: 503 + 504.
        const BandPlan plan = build_band_plan(grid, 2, consecutive(4.4e6), 35.2e6);
        int op0 = 0, op1 = 0;
        for (int k = 4096 + 3 * 1020; k <= 8162; ++k) {
            (plan.assignment[static_cast<std::size_t>(k)] == 0 ? op0 : op1)++;
        }
        CHECK(op0 == 503);
        CHECK(op1 == 504);
    }
    SECTION("swap rotates the lowest-block owner; operator 0 holds ceil(K/2) of K slots") {
        const BandPlan plan = build_band_plan(grid, 2, consecutive(4.4e6, true), 35.2e6);
        std::vector<int> lowest_owners;
        for (int slot_first = 4096; slot_first <= 8162; slot_first += 1020) {
            lowest_owners.push_back(plan.assignment[static_cast<std::size_t>(slot_first)]);
        }
        REQUIRE(lowest_owners.size() == 4);
        CHECK(lowest_owners == std::vector<int>{0, 1, 0, 1});
        const auto owned = std::count(lowest_owners.begin(), lowest_owners.end(), 0);
        CHECK(owned == (static_cast<long>(lowest_owners.size()) + 1) / 2);

        // Odd slot count: B = 3.6 MHz gives 834-tone slots, K = 5.
        const BandPlan odd = build_band_plan(grid, 2, consecutive(3.6e6, true), 35.2e6);
        std::vector<int> odd_owners;
        for (int slot_first = 4096; slot_first <= 8162; slot_first += 834) {
            odd_owners.push_back(odd.assignment[static_cast<std::size_t>(slot_first)]);
        }
        REQUIRE(odd_owners.size() == 5);
        CHECK(std::count(odd_owners.begin(), odd_owners.end(), 0) == 3); // ceil(5/2)
    }
    SECTION("swap rotation continues across sub-channel boundaries") {
        const ToneGrid wide = build_tone_grid(52.8e6);
        const BandPlan plan = build_band_plan(wide, 2, consecutive(4.4e6, true), 52.8e6);
        // Sub-channel 1 ends after four slots; the next sub-channel starts at
        // 35.2 MHz with the rotation picking up at slot index 4.
        const int second_sub_first = 8163;
        CHECK(plan.assignment[static_cast<std::size_t>(second_sub_first)] == 0);
        CHECK(plan.assignment[static_cast<std::size_t>(second_sub_first + 1020)] == 1);
    }
    SECTION("slot narrower than the operator count is rejected") {
        CHECK_THROWS_AS(build_band_plan(grid, 3, consecutive(2 * 4312.5), 35.2e6),
                        invalid_parameter_error);
    }
    SECTION("guard tones silence partition boundaries") {
        const BandPlan plan = build_band_plan(grid, 2, consecutive(4.4e6, false, 2), 35.2e6);
        // First internal boundary of the first slot: 510 tones for op 0.
        const int boundary = 4096 + 510 - 1;
        CHECK(plan.assignment[static_cast<std::size_t>(boundary)] == -2);
        CHECK(plan.assignment[static_cast<std::size_t>(boundary - 1)] == -2);
        CHECK(plan.assignment[static_cast<std::size_t>(boundary + 1)] == -2);
        CHECK(plan.assignment[static_cast<std::size_t>(boundary + 2)] == -2);
        CHECK(plan.assignment[static_cast<std::size_t>(boundary - 2)] == 0);
        CHECK(plan.assignment[static_cast<std::size_t>(boundary + 3)] == 1);
        CHECK(plan.regime_of(boundary) == Regime::Guard);
        const BandPlan no_guard = build_band_plan(grid, 2, consecutive(4.4e6), 35.2e6);
        CHECK(plan.operator_tone_count[0] + plan.operator_tone_count[1] <
              no_guard.operator_tone_count[0] + no_guard.operator_tone_count[1]);
    }
    SECTION("no upper spectrum at f_max = 17.6 MHz") {
        const ToneGrid low_grid = build_tone_grid(17.6e6);
        const BandPlan plan = build_band_plan(low_grid, 2, PartitionPolicy{}, 17.6e6);
        CHECK_FALSE(plan.has_upper());
        CHECK(plan.lower_tones.size() > 0);
    }
}

TEST_CASE("operator tone sets") {
    const ToneGrid grid = build_tone_grid(35.2e6);

    SECTION("single operator sees every active tone") {
        const BandPlan plan = build_band_plan(grid, 1, PartitionPolicy{}, 35.2e6);
        const auto tones = operator_tones(plan, 0);
        CHECK(tones.size() == plan.lower_tones.size() + 4067);
    }
    SECTION("upper sets are disjoint and exhaustive") {
        const BandPlan plan = build_band_plan(grid, 3, PartitionPolicy{}, 35.2e6);
        std::set<int> seen;
        std::size_t total = 0;
        for (int op = 0; op < 3; ++op) {
            for (const OperatorTone& t : operator_tones(plan, op)) {
                if (t.regime != Regime::Partitioned) continue;
                CHECK(seen.insert(t.tone).second);
                ++total;
            }
        }
        CHECK(total == static_cast<std::size_t>(plan.upper_tone_count()));
    }
    SECTION("unknown operator is rejected") {
        const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, 35.2e6);
        CHECK_THROWS_AS(operator_tones(plan, 2), invalid_parameter_error);
        CHECK_THROWS_AS(operator_tones(plan, -1), invalid_parameter_error);
    }
}

TEST_CASE("partition property across operator counts, policies and bandwidths") {
    for (double f_max : {35.2e6, 52.8e6, 105.6e6}) {
        const ToneGrid grid = build_tone_grid(f_max);
        for (int n_op : {1, 2, 3, 4}) {
            std::vector<PartitionPolicy> policies = {PartitionPolicy{}, consecutive(4.4e6),
                                                     consecutive(4.4e6, true)};
            for (const auto& policy : policies) {
                const BandPlan plan = build_band_plan(grid, n_op, policy, f_max);
                INFO("f_max=" << f_max << " n_op=" << n_op
                              << " consecutive=" << (policy.kind == PartitionKind::ConsecutiveBlock)
                              << " swap=" << policy.swap);
                // Disjoint and exhaustive: every upper tone owned exactly once.
                int assigned = 0;
                for (int k = plan.first_upper_tone; k <= plan.last_upper_tone; ++k) {
                    const auto owner = plan.assignment[static_cast<std::size_t>(k)];
                    REQUIRE(owner >= 0);
                    REQUIRE(owner < n_op);
                    ++assigned;
                }
                REQUIRE(assigned == plan.upper_tone_count());
                // Lower band never partitioned.
                for (int k : plan.lower_tones) {
                    REQUIRE(plan.assignment[static_cast<std::size_t>(k)] == -1);
                }
                // Alternate assignment balances counts to within n_op - 1 in
                // every upper band.
                if (policy.kind == PartitionKind::AlternateTone) {
                    for (const Band& band : plan.upper_bands) {
                        std::vector<int> counts(static_cast<std::size_t>(n_op), 0);
                        for (int k = band.first_tone; k <= band.last_tone; ++k) {
                            ++counts[static_cast<std::size_t>(
                                plan.assignment[static_cast<std::size_t>(k)])];
                        }
                        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
                        REQUIRE(*hi - *lo <= n_op - 1);
                    }
                }
                // Deterministic rebuild.
                const BandPlan again = build_band_plan(grid, n_op, policy, f_max);
                REQUIRE(plan.assignment == again.assignment);
            }
        }
    }
}

TEST_CASE("plan export") {
    const ToneGrid grid = build_tone_grid(35.2e6);
    const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, 35.2e6);
    const std::string csv = plan_to_csv(plan);
    CHECK(csv.rfind("tone_index,f_hz,band_number,regime,operator_id\n", 0) == 0);
    CHECK(csv.find("\n0,0.0,0,off,-1\n") != std::string::npos);
    CHECK(csv.find("\n32,138000.0,1,shared,-1\n") != std::string::npos);
    CHECK(csv.find("\n4096,17664000.0,4,partitioned,0\n") != std::string::npos);
    CHECK(csv.find("\n4097,17668312.5,4,partitioned,1\n") != std::string::npos);
    const auto rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == 8163 + 1); // tones 0..8162 plus header
}
