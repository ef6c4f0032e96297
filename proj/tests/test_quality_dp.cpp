#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tscc/oracle.hpp"
#include "tscc/quality_dp.hpp"

using namespace tscc;

TEST_CASE("worked DP example across the four budgets") {
    const std::vector<int> tiles = {10, 11, 16, 17};
    const LevelTables tables = fixtures::example_dp_tables(4);

    auto r13 = assign_quality_dp(tiles, 13, tables);
    REQUIRE(r13.feasible);
    CHECK(r13.assignment.levels == std::vector<int>{4, 3, 3, 3});
    CHECK(r13.assignment.total_cost == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(r13.assignment.total_bitrate_mbit == doctest::Approx(13.0));

    auto r14 = assign_quality_dp(tiles, 14, tables);
    CHECK(r14.assignment.levels == std::vector<int>{4, 4, 3, 3});

    auto r18 = assign_quality_dp(tiles, 18, tables);
    CHECK(r18.assignment.levels == std::vector<int>{4, 4, 4, 4});

    auto r20 = assign_quality_dp(tiles, 20, tables);
    CHECK(r20.assignment.levels == std::vector<int>{4, 4, 4, 4});
}

TEST_CASE("empty fetch set yields an empty assignment of cost zero") {
    LevelTables tables;
    auto r = assign_quality_dp({}, 10, tables);
    REQUIRE(r.feasible);
    CHECK(r.assignment.empty());
    CHECK(r.assignment.total_cost == 0.0);
}

TEST_CASE("a tile that cannot fit at its lowest level blocks the assignment") {
    LevelTables tables;
    tables.tau = {{1.0, 0.5}, {1.0, 0.5}};
    tables.bitrate_units = {{2, 4}, {9, 12}};
    tables.bitrate_mbit = {{2, 4}, {9, 12}};
    auto r = assign_quality_dp({3, 7}, 8, tables);
    CHECK_FALSE(r.feasible);
    CHECK(r.blocking_tiles == std::vector<int>{7});
    CHECK(r.assignment.empty());  // never a partial assignment
}

TEST_CASE("jointly infeasible set reports every tile") {
    LevelTables tables;
    tables.tau = {{1.0}, {1.0}, {1.0}};
    tables.bitrate_units = {{3}, {3}, {3}};
    tables.bitrate_mbit = {{3}, {3}, {3}};
    auto r = assign_quality_dp({1, 2, 3}, 8, tables);
    CHECK_FALSE(r.feasible);
    CHECK(r.blocking_tiles == std::vector<int>{1, 2, 3});
}

TEST_CASE("budget zero without a free level is infeasible") {
    LevelTables tables;
    tables.tau = {{1.0, 0.5}};
    tables.bitrate_units = {{1, 2}};
    tables.bitrate_mbit = {{1, 2}};
    auto r = assign_quality_dp({1}, 0, tables);
    CHECK_FALSE(r.feasible);
}

TEST_CASE("upward quantization never understates the spend") {
    CHECK(quantize_bitrate_units(0.95, 0.1) == 10);
    CHECK(quantize_bitrate_units(1.0, 0.1) == 10);
    CHECK(quantize_bitrate_units(1.01, 0.1) == 11);
    CHECK(quantize_bitrate_units(0.0, 0.1) == 0);
    CHECK(quantize_bitrate_units(4.0, 1.0) == 4);
}

TEST_CASE("DP equals the enumeration oracle on random instances") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 300; ++rep) {
        auto inst = fixtures::random_dp_instance(rng);
        auto dp = assign_quality_dp(inst.tiles, inst.budget_units, inst.tables);
        auto oracle = exhaustive_assignment(inst.tiles, inst.budget_units, inst.tables);
        REQUIRE(dp.feasible == oracle.feasible);
        if (dp.feasible) {
            CHECK(dp.assignment.levels == oracle.assignment.levels);
            CHECK(dp.assignment.total_cost == oracle.assignment.total_cost);
        }
    }
}

TEST_CASE("optimal cost is non-increasing in the budget") {
    std::mt19937_64 rng(103);
    for (int rep = 0; rep < 100; ++rep) {
        auto inst = fixtures::random_dp_instance(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (long long budget = inst.budget_units; budget <= inst.budget_units + 6; ++budget) {
            auto dp = assign_quality_dp(inst.tiles, budget, inst.tables);
            if (!dp.feasible) continue;
            CHECK(dp.assignment.total_cost <= prev + 1e-12);
            prev = std::min(prev, dp.assignment.total_cost);
        }
    }
}

TEST_CASE("returned assignments respect the budget") {
    std::mt19937_64 rng(107);
    for (int rep = 0; rep < 200; ++rep) {
        auto inst = fixtures::random_dp_instance(rng);
        auto dp = assign_quality_dp(inst.tiles, inst.budget_units, inst.tables);
        if (!dp.feasible) continue;
        CHECK(assignment_units(dp.assignment, inst.tables) <= inst.budget_units);
    }
}
