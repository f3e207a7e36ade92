#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sbvsim/scenario.hpp"

using namespace sbvsim;

TEST_CASE("scenario loading") {
    SECTION("minimal config applies defaults") {
        const Scenario s = load_scenario("scenario.cab_nt_distance = 100\n");
        CHECK(s.cab_nt_distance_m == 100.0);
        CHECK(s.gamma_db == 12.0);
        CHECK(s.n0_dbm_hz == -140.0);
        CHECK(s.n_disturbers == 12);
        CHECK(s.n_operators == 2);
        CHECK(s.f_max_hz == 35.2e6);
        CHECK(s.r_v_db == 10.0);
        CHECK(s.bit_min == 2.0);
        CHECK(s.bit_max == 15.0);
        CHECK_FALSE(s.lower_band_vectored);
    }
    SECTION("named load levels") {
        CHECK(load_scenario("[scenario]\ncab_nt_distance = 100\nn_disturbers = very_low\n")
                  .n_disturbers == 2);
        CHECK(load_scenario("[scenario]\ncab_nt_distance = 100\nn_disturbers = low\n")
                  .n_disturbers == 6);
        CHECK(load_scenario("[scenario]\ncab_nt_distance = 100\nn_disturbers = medium\n")
                  .n_disturbers == 12);
        CHECK(load_scenario("[scenario]\ncab_nt_distance = 100\nn_disturbers = high\n")
                  .n_disturbers == 24);
        CHECK(load_scenario("[scenario]\ncab_nt_distance = 100\nn_disturbers = 7\n")
                  .n_disturbers == 7);
    }
    SECTION("validation errors name the offending key") {
        CHECK_THROWS_WITH(load_scenario("[scenario]\ncab_nt_distance = -5\n"),
                          Catch::Matchers::ContainsSubstring("cab_nt_distance"));
        CHECK_THROWS_WITH(load_scenario("[scenario]\nn_operators = 2\n"),
                          Catch::Matchers::ContainsSubstring("cab_nt_distance"));
        CHECK_THROWS_WITH(
            load_scenario("[scenario]\ncab_nt_distance = 100\np_total_dbm = 13.0\n"),
            Catch::Matchers::ContainsSubstring("p_total_dbm"));
        CHECK_THROWS_WITH(load_scenario("[scenario]\ncab_nt_distance = 100\nchannels = 4\n"),
                          Catch::Matchers::ContainsSubstring("channels"));
    }
    SECTION("round trip through the canonical serialization is lossless") {
        Scenario s;
        s.cab_nt_distance_m = 137.5;
        s.f_max_hz = 52.8e6;
        s.n_operators = 3;
        s.n_disturbers = 24;
        s.r_v_db = 6.25;
        s.p_upper_dbm = 13.41;
        s.p_total_dbm = 17.03;
        s.gamma_db = 11.9;
        s.n0_dbm_hz = -139.5;
        s.bit_min = 1.75;
        s.bit_max = 14.5;
        s.lower_band_vectored = true;
        s.integer_bit_loading = true;
        const Scenario back = load_scenario(scenario_to_config_text(s));
        CHECK(back.cab_nt_distance_m == s.cab_nt_distance_m);
        CHECK(back.f_max_hz == s.f_max_hz);
        CHECK(back.n_operators == s.n_operators);
        CHECK(back.n_disturbers == s.n_disturbers);
        CHECK(back.r_v_db == s.r_v_db);
        CHECK(back.p_upper_dbm == s.p_upper_dbm);
        CHECK(back.p_total_dbm == s.p_total_dbm);
        CHECK(back.gamma_db == s.gamma_db);
        CHECK(back.n0_dbm_hz == s.n0_dbm_hz);
        CHECK(back.bit_min == s.bit_min);
        CHECK(back.bit_max == s.bit_max);
        CHECK(back.lower_band_vectored == s.lower_band_vectored);
        CHECK(back.integer_bit_loading == s.integer_bit_loading);
        CHECK(scenario_to_config_text(back) == scenario_to_config_text(s));
    }
    SECTION("unit conversions") {
        Scenario s;
        CHECK_THAT(s.p_upper_w(), Catch::Matchers::WithinRel(0.02187761623949553, 1e-14));
        CHECK_THAT(s.p_total_w(), Catch::Matchers::WithinRel(0.05011872336272722, 1e-14));
        CHECK_THAT(s.gamma_linear(), Catch::Matchers::WithinRel(15.848931924611133, 1e-14));
        CHECK_THAT(s.n0_w_per_hz(), Catch::Matchers::WithinRel(1e-17, 1e-12));
    }
}

namespace {

Scenario scenario_at(double f_max_hz, int n_operators) {
    Scenario s;
    s.cab_nt_distance_m = 100.0;
    s.f_max_hz = f_max_hz;
    s.n_operators = n_operators;
    return s;
}

} // namespace

TEST_CASE("power allocation") {
    SECTION("single operator gets the shared per-tone power") {
        const ToneGrid grid = build_tone_grid(35.2e6);
        const BandPlan plan = build_band_plan(grid, 1, PartitionPolicy{}, 35.2e6);
        const PowerAllocation alloc = allocate_power(scenario_at(35.2e6, 1), plan);
        CHECK(alloc.p_tone_sbv_w[0] == alloc.p_tone_nv_upper_w);
    }
    SECTION("spot values for a 1000-tone upper band split 500/500") {
        // f_max = 21.973 MHz puts exactly 1000 tones above the shared edge.
        const ToneGrid grid = build_tone_grid(21.973e6);
        const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, 21.973e6);
        REQUIRE(plan.upper_tone_count() == 1000);
        REQUIRE(plan.operator_tone_count[0] == 500);
        const PowerAllocation alloc = allocate_power(scenario_at(21.973e6, 2), plan);
        CHECK_THAT(alloc.p_tone_nv_upper_w,
                   Catch::Matchers::WithinRel(2.187761623949553e-5, 1e-12));
        CHECK_THAT(alloc.p_tone_sbv_w[0],
                   Catch::Matchers::WithinRel(4.375523247899106e-5, 1e-12));
        CHECK(alloc.p_tone_sbv_w[0] == 2.0 * alloc.p_tone_nv_upper_w);
    }
    SECTION("per-region budgets are conserved across the default grids") {
        for (double f_max : {35.2e6, 52.8e6, 70.4e6, 88.0e6, 105.6e6}) {
            const ToneGrid grid = build_tone_grid(f_max);
            for (int n_op : {1, 2, 3, 4}) {
                const BandPlan plan = build_band_plan(grid, n_op, PartitionPolicy{}, f_max);
                const Scenario s = scenario_at(f_max, n_op);
                const PowerAllocation alloc = allocate_power(s, plan);
                const double lower_sum = alloc.p_tone_lower_w * alloc.lower_tone_count;
                const double upper_sum = alloc.p_tone_nv_upper_w * alloc.upper_tone_count;
                CHECK_THAT(lower_sum, Catch::Matchers::WithinRel(alloc.lower_budget_w, 1e-9));
                CHECK_THAT(upper_sum, Catch::Matchers::WithinRel(alloc.upper_budget_w, 1e-9));
                for (int op = 0; op < n_op; ++op) {
                    const double sbv_sum = alloc.p_tone_sbv_w[static_cast<std::size_t>(op)] *
                                           alloc.operator_upper_tone_count[static_cast<std::size_t>(op)];
                    CHECK_THAT(sbv_sum, Catch::Matchers::WithinRel(alloc.upper_budget_w, 1e-9));
                }
            }
        }
    }
    SECTION("evenly split tones carry exactly n_operators times the shared power") {
        // f_max values trimmed so the upper tone count divides evenly.
        const struct { double f_max; int n_op; } cases[] = {
            {35.195e6, 2}, {35.19e6, 3}, {35.188e6, 4}};
        for (const auto& c : cases) {
            const ToneGrid grid = build_tone_grid(c.f_max);
            const BandPlan plan = build_band_plan(grid, c.n_op, PartitionPolicy{}, c.f_max);
            REQUIRE(plan.upper_tone_count() % c.n_op == 0);
            const PowerAllocation alloc = allocate_power(scenario_at(c.f_max, c.n_op), plan);
            for (int op = 0; op < c.n_op; ++op) {
                CHECK(alloc.p_tone_sbv_w[static_cast<std::size_t>(op)] ==
                      static_cast<double>(c.n_op) * alloc.p_tone_nv_upper_w);
            }
        }
    }
    SECTION("upper per-tone power strictly decreases as f_max grows") {
        double previous = 1.0;
        for (double f_max : {35.2e6, 52.8e6, 70.4e6, 88.0e6, 105.6e6}) {
            const ToneGrid grid = build_tone_grid(f_max);
            const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, f_max);
            const PowerAllocation alloc = allocate_power(scenario_at(f_max, 2), plan);
            CHECK(alloc.p_tone_nv_upper_w < previous);
            previous = alloc.p_tone_nv_upper_w;
        }
    }
    SECTION("mismatched plan and scenario bandwidths are rejected") {
        const ToneGrid grid = build_tone_grid(35.2e6);
        const BandPlan plan = build_band_plan(grid, 2, PartitionPolicy{}, 35.2e6);
        CHECK_THROWS_AS(allocate_power(scenario_at(52.8e6, 2), plan), invalid_scenario_error);
    }
}
