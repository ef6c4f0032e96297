#pragma once

// Shared fixtures and reference helpers for the test suites.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "tscc/tscc.hpp"

namespace fixtures {

// Worked single-slot scenario on a 6x8 grid. All tiles share the ladders:
//   bitrate {1,2,3,4} Mbit, distortion {8, 4.5, 2.95, 1.25},
//   flow {0.1,0.2,0.3,0.4} in the playing chunk and {0.1,0.2,0.3,0.9} in the
//   fetched chunk (the top level spikes next chunk).
// With qp=0.65, qs=0.9, Bt=8 and the {1.0, 0.7} shrink ladder the budgets
// come out 13/14/18/20; the DP yields {4,3,3,3}/{4,4,3,3}/{4,4,4,4}/{4,4,4,4};
// the local search improves (1,0) to {3,3,3,3} and leaves the rest; and the
// sweep commits {4,4,4,4} at (0.7, 0).
inline tscc::VideoMeta example_meta() {
    tscc::VideoMeta meta;
    meta.grid.rows = 6;
    meta.grid.cols = 8;
    meta.chunk_duration_s = 1.0;
    const double bitrate[4] = {1.0, 2.0, 3.0, 4.0};
    const double distortion[4] = {8.0, 4.5, 2.95, 1.25};
    const double flow_cur[4] = {0.1, 0.2, 0.3, 0.4};
    const double flow_next[4] = {0.1, 0.2, 0.3, 0.9};
    meta.chunks.resize(2);
    for (int c = 0; c < 2; ++c) {
        meta.chunks[c].tiles.assign(48, std::vector<tscc::TileMeta>(4));
        for (int i = 0; i < 48; ++i)
            for (int j = 0; j < 4; ++j) {
                tscc::TileMeta& t = meta.chunks[c].tiles[i][j];
                t.bitrate_mbit = bitrate[j];
                t.distortion = distortion[j];
                t.flow = c == 0 ? flow_cur[j] : flow_next[j];
            }
    }
    return meta;
}

inline tscc::Config example_config() {
    tscc::Config cfg;
    cfg.sfov_ladder = {1.0, 0.7};
    cfg.sigma_y_deg = 5.0;
    cfg.sigma_p_deg = 5.0;
    cfg.viewport_w_deg = 40.0;
    cfg.viewport_h_deg = 25.0;
    cfg.bw_unit_mbit = 1.0;
    cfg.qp_init = 0.65;
    cfg.qs_init = 0.9;
    cfg.gamma_init_mbit = 13.0;
    return cfg;  // xi=1, rho=2.5, k_dof=0.1, cp=4, lambda=0.5, cs=1000, omega=0.05 defaults
}

inline tscc::SystemState example_state() {
    tscc::SystemState st;
    st.qp = 0.65;
    st.qs = 0.9;
    st.pose = tscc::Pose::normalized(90.0, -30.0);
    st.rot = tscc::Rotation{0.0, 0.0};
    st.gamma_mbit = 13.0;
    return st;
}

constexpr double example_bt_mbps = 8.0;

// Level tables straight from the worked DP example: identical per tile,
// {tau, bitrate} = {8,1}, {4,2}, {2,3}, {1,4}.
inline tscc::LevelTables example_dp_tables(int tiles) {
    tscc::LevelTables t;
    t.tau.assign(tiles, {8.0, 4.0, 2.0, 1.0});
    t.bitrate_units.assign(tiles, {1, 2, 3, 4});
    t.bitrate_mbit.assign(tiles, {1.0, 2.0, 3.0, 4.0});
    return t;
}

// Random DP instance with dyadic costs (multiples of 1/256) so that cost
// sums compare exactly between the DP and the enumeration oracle.
struct DpInstance {
    std::vector<int> tiles;
    tscc::LevelTables tables;
    long long budget_units = 0;
};

inline DpInstance random_dp_instance(std::mt19937_64& rng, int max_tiles = 6, int max_levels = 4,
                                     long long max_budget = 30) {
    DpInstance inst;
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_tiles));
    const int levels = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_levels));
    inst.budget_units = static_cast<long long>(rng() % static_cast<std::uint64_t>(max_budget + 1));
    inst.tables.tau.resize(n);
    inst.tables.bitrate_units.resize(n);
    inst.tables.bitrate_mbit.resize(n);
    for (int k = 0; k < n; ++k) {
        inst.tiles.push_back(k + 1);
        long long units = static_cast<long long>(rng() % 4);
        for (int j = 0; j < levels; ++j) {
            inst.tables.tau[k].push_back(static_cast<double>(rng() % 4096) / 256.0);
            inst.tables.bitrate_units[k].push_back(units);
            inst.tables.bitrate_mbit[k].push_back(static_cast<double>(units) * 0.1);
            units += 1 + static_cast<long long>(rng() % 3);
        }
    }
    return inst;
}

// Random single-slot scenario small enough for full enumeration: coarse 3x4
// grid, three levels, queue state above target so every configuration stays
// feasible.
struct SlotInstance {
    tscc::VideoMeta meta;
    tscc::Config cfg;
    tscc::SystemState st;
    double bt = 8.0;
};

inline SlotInstance random_slot_instance(std::mt19937_64& rng) {
    SlotInstance r;
    r.meta.grid = {3, 4};
    r.meta.chunk_duration_s = 1.0;
    r.meta.chunks.resize(2);
    for (auto& chunk : r.meta.chunks) {
        chunk.tiles.assign(12, std::vector<tscc::TileMeta>(3));
        for (int i = 0; i < 12; ++i) {
            double b = 0.1 + static_cast<double>(rng() % 16) / 64.0;
            double ssim = 0.55 + static_cast<double>(rng() % 16) / 100.0;
            double f = static_cast<double>(rng() % 32) / 256.0;
            for (int j = 0; j < 3; ++j) {
                chunk.tiles[i][j].bitrate_mbit = b;
                chunk.tiles[i][j].distortion = 1.0 / ssim;
                chunk.tiles[i][j].flow = std::min(1.0, f);
                b *= 1.8 + static_cast<double>(rng() % 16) / 32.0;
                ssim += 0.08 + static_cast<double>(rng() % 8) / 100.0;
                f += static_cast<double>(rng() % 64) / 256.0;
            }
        }
    }
    r.cfg.sfov_ladder = {1.0, 0.85, 0.7};
    r.cfg.viewport_w_deg = 100;
    r.cfg.viewport_h_deg = 80;
    r.cfg.sigma_y_deg = 4;
    r.cfg.sigma_p_deg = 4;
    r.cfg.bw_unit_mbit = 0.1;
    r.st.qp = 0.55 + static_cast<double>(rng() % 40) / 100.0;
    r.st.qs = static_cast<double>(rng() % 100) / 100.0;
    r.st.pose = tscc::Pose::normalized(static_cast<double>(rng() % 360),
                                       -20.0 + static_cast<double>(rng() % 40));
    r.st.rot = tscc::Rotation{static_cast<double>(rng() % 80) - 40.0,
                              static_cast<double>(rng() % 30) - 15.0};
    r.bt = 2.0 + static_cast<double>(rng() % 80) / 10.0;
    return r;
}

// Reference point-sampling implementation of the viewport overlap query:
// 1-degree lattice over the (slightly inset) viewport rectangle. Valid when
// centers and viewport edges sit on a coarse grid so no sliver is thinner
// than the inset.
inline std::vector<int> overlap_sampling_oracle(double cy, double cp, double w, double h,
                                                const tscc::TileGrid& grid) {
    constexpr double inset = 1e-6;
    std::vector<double> yaws, pitches;
    if (w <= 1e-9) {
        yaws.push_back(cy);
    } else {
        yaws.push_back(cy - w / 2 + inset);
        for (double y = cy - w / 2 + 1.0; y < cy + w / 2 - inset; y += 1.0) yaws.push_back(y);
        yaws.push_back(cy + w / 2 - inset);
    }
    const double plo = std::max(-90.0, cp - h / 2);
    const double phi = std::min(90.0, cp + h / 2);
    if (phi - plo <= 1e-9) {
        pitches.push_back(cp);
    } else {
        pitches.push_back(plo + inset);
        for (double p = plo + 1.0; p < phi - inset; p += 1.0) pitches.push_back(p);
        pitches.push_back(phi - inset);
    }
    std::set<int> tiles;
    const double tw = grid.tile_width_deg();
    const double th = grid.tile_height_deg();
    for (double y : yaws)
        for (double p : pitches) {
            int col = static_cast<int>(std::floor(tscc::detail::wrap_yaw(y) / tw));
            if (col >= grid.cols) col = grid.cols - 1;
            int row = static_cast<int>(std::floor((90.0 - tscc::detail::clamp_pitch(p)) / th));
            if (row >= grid.rows) row = grid.rows - 1;
            tiles.insert(grid.index_of(row + 1, col + 1));
        }
    return std::vector<int>(tiles.begin(), tiles.end());
}

}  // namespace fixtures
