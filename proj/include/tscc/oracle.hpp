#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tscc/controller.hpp"

namespace tscc {

struct OracleAssignmentResult {
    bool feasible = false;
    Assignment assignment;
    long long enumeration_count = 0;
};

struct OracleStepResult {
    bool feasible = false;
    Assignment assignment;
    double s_fov = 1.0;
    int y_dof = 0;
    double objective = 0.0;
    long long enumeration_count = 0;
};

// Full enumeration of level vectors for small instances. Same feasibility
// rule and tie-break as the DP: minimum cost, then the lexicographically
// largest level vector in fetch-set order.
inline OracleAssignmentResult exhaustive_assignment(const std::vector<int>& tiles,
                                                    long long budget_units, const LevelTables& tables,
                                                    long long enumeration_cap = 10'000'000) {
    const int n = static_cast<int>(tiles.size());
    const int levels = tables.level_count();
    OracleAssignmentResult out;
    if (n == 0) {
        out.feasible = true;
        return out;
    }

    double combos = 1.0;
    for (int k = 0; k < n; ++k) combos *= levels;
    if (combos > static_cast<double>(enumeration_cap))
        throw std::invalid_argument("exhaustive_assignment: enumeration cap exceeded");

    std::vector<int> cur(static_cast<size_t>(n), 1);
    std::vector<int> best;
    double best_cost = 0.0;
    while (true) {
        ++out.enumeration_count;
        long long units = 0;
        double cost = 0.0;
        for (int k = 0; k < n; ++k) {
            units += tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(cur[k] - 1)];
            cost += tables.tau[static_cast<size_t>(k)][static_cast<size_t>(cur[k] - 1)];
        }
        if (units <= budget_units) {
            if (best.empty()) {
                best = cur;
                best_cost = cost;
            } else {
                const double tie = 1e-9 * (1.0 + std::abs(best_cost));
                if (cost < best_cost - tie) {
                    best = cur;
                    best_cost = cost;
                } else if (cost <= best_cost + tie &&
                           std::lexicographical_compare(best.begin(), best.end(), cur.begin(),
                                                        cur.end())) {
                    best = cur;
                    best_cost = std::min(best_cost, cost);
                }
            }
        }
        int k = n - 1;
        while (k >= 0 && cur[static_cast<size_t>(k)] == levels) {
            cur[static_cast<size_t>(k)] = 1;
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<size_t>(k)];
    }

    if (best.empty()) return out;
    out.feasible = true;
    out.assignment.tiles = tiles;
    out.assignment.levels = best;
    for (int k = 0; k < n; ++k) {
        out.assignment.total_cost += tables.tau[static_cast<size_t>(k)][static_cast<size_t>(best[k] - 1)];
        out.assignment.total_bitrate_mbit +=
            tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(best[k] - 1)];
    }
    return out;
}

// True per-slot optimum of xi*Phi + rho*Qs over every configuration and every
// feasible assignment of the same fetch set, evaluated with the identical
// objective plumbing as the online controller.
inline OracleStepResult exhaustive_step(const SystemState& state, const TileGrid& grid,
                                        const ChunkMeta& chunk_cur, const ChunkMeta& chunk_next,
                                        double T, double bt_mbps, const Config& config,
                                        long long enumeration_cap = 10'000'000) {
    detail::StepPlumbing pl = detail::run_vpts(state, grid, chunk_cur, chunk_next, T, config);
    const int n = pl.fetch.size();
    const int levels = chunk_next.level_count();

    double combos = 1.0;
    for (int k = 0; k < n; ++k) combos *= levels;
    combos *= 2.0 * static_cast<double>(config.sfov_ladder.size());
    if (combos > static_cast<double>(enumeration_cap))
        throw std::invalid_argument("exhaustive_step: enumeration cap exceeded");

    OracleStepResult out;
    LevelTables tables;
    std::vector<std::vector<double>> vli;
    for (double s_fov : config.sfov_ladder) {
        for (int y_dof : {0, 1}) {
            const long long budget =
                bandwidth_budget(state.qp, bt_mbps, T, config.cp_seconds, config.lambda_target, s_fov,
                                 y_dof, config.k_dof, config.bw_unit_mbit);
            detail::build_tables(pl, chunk_next, s_fov, y_dof, config, tables, vli);
            std::vector<int> cur(static_cast<size_t>(n), 1);
            while (true) {
                ++out.enumeration_count;
                long long units = 0;
                for (int k = 0; k < n; ++k)
                    units += tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(cur[k] - 1)];
                if (units <= budget) {
                    Assignment a;
                    a.tiles = pl.fetch.tiles;
                    a.levels = cur;
                    for (int k = 0; k < n; ++k) {
                        a.total_cost +=
                            tables.tau[static_cast<size_t>(k)][static_cast<size_t>(cur[k] - 1)];
                        a.total_bitrate_mbit +=
                            tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(cur[k] - 1)];
                    }
                    Decision cand;
                    detail::evaluate_candidate(pl, a, s_fov, y_dof, state, chunk_next, T, bt_mbps,
                                               config, cand);
                    if (!out.feasible || cand.objective_value < out.objective) {
                        out.feasible = true;
                        out.assignment = std::move(a);
                        out.s_fov = s_fov;
                        out.y_dof = y_dof;
                        out.objective = cand.objective_value;
                    }
                }
                int k = n - 1;
                while (k >= 0 && cur[static_cast<size_t>(k)] == levels) {
                    cur[static_cast<size_t>(k)] = 1;
                    --k;
                }
                if (k < 0) break;
                ++cur[static_cast<size_t>(k)];
            }
        }
    }
    return out;
}

// Smallest SSIM across every (chunk, tile, level) of the video.
inline double min_ssim(const VideoMeta& meta) {
    double worst = 1.0;
    for (const ChunkMeta& chunk : meta.chunks)
        for (const auto& tile : chunk.tiles)
            for (const TileMeta& t : tile) worst = std::min(worst, t.ssim());
    return worst;
}

// Empirical bound on the online-to-offline objective ratio:
//   1 / (s_min * (1 - k_dof) * r)
// with r the minimum SSIM of the instance and s_min the smallest ladder entry.
inline double competitive_bound(const VideoMeta& meta, const Config& config) {
    const double s_min = config.sfov_ladder.back();
    return 1.0 / (s_min * (1.0 - config.k_dof) * min_ssim(meta));
}

}  // namespace tscc
