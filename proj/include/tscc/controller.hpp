#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tscc/config.hpp"
#include "tscc/costs.hpp"
#include "tscc/local_search.hpp"
#include "tscc/metadata.hpp"
#include "tscc/quality_dp.hpp"
#include "tscc/queues.hpp"
#include "tscc/viewport.hpp"

namespace tscc {

struct SystemState {
    double qp = 0.5;
    double qs = 0.0;
    Pose pose;
    Rotation rot;
    double gamma_mbit = 0.0;  // last committed viewport bandwidth
};

// One evaluated (s_fov, y_dof) configuration inside a step.
struct SweepItem {
    double s_fov = 1.0;
    int y_dof = 0;
    long long budget_units = 0;
    bool feasible = false;
    Assignment initial;   // DP result
    Assignment refined;   // after SMI local search
    double phi = 0.0;
    double predicted_qs = 0.0;
    double objective = 0.0;
};

struct Decision {
    FetchSet fetch;
    std::vector<double> probabilities;  // per fetched tile, fetch-set order
    Assignment assignment;
    double s_fov = 1.0;
    int y_dof = 0;
    double phi = 0.0;
    double expected_flow = 0.0;
    double objective_value = 0.0;
    double predicted_qs_next = 0.0;
    double predicted_qp_next = 0.0;
    bool degraded = false;  // infeasibility fallback, may violate the budget
    std::vector<SweepItem> evaluations;
};

namespace detail {

struct StepPlumbing {
    Pose center;
    ProbabilityField field;
    FetchSet fetch;
    std::vector<double> p;  // over fetch set
    double sum_p = 0.0;
    std::vector<std::vector<double>> flow_cur;   // [k][j-1], playing chunk
    std::vector<std::vector<double>> flow_next;  // [k][j-1], fetched chunk
};

inline StepPlumbing run_vpts(const SystemState& state, const TileGrid& grid,
                             const ChunkMeta& chunk_cur, const ChunkMeta& chunk_next, double T,
                             const Config& config) {
    StepPlumbing out;
    out.center = predict_center(state.pose, state.rot, T);
    out.field = viewing_probabilities(out.center, config.sigma_y_deg, config.sigma_p_deg,
                                      config.viewport_w_deg, config.viewport_h_deg, grid);
    out.fetch = select_tiles(out.field, config.epsilon, grid);
    const int n = out.fetch.size();
    const int levels = chunk_next.level_count();
    out.p.resize(static_cast<size_t>(n));
    out.flow_cur.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(levels)));
    out.flow_next.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(levels)));
    for (int k = 0; k < n; ++k) {
        const int tile = out.fetch.tiles[static_cast<size_t>(k)];
        out.p[static_cast<size_t>(k)] = out.field.at(tile);
        out.sum_p += out.field.at(tile);
        for (int j = 1; j <= levels; ++j) {
            out.flow_cur[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] = chunk_cur.at(tile, j).flow;
            out.flow_next[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] = chunk_next.at(tile, j).flow;
        }
    }
    return out;
}

// tau / vli / bitrate tables for one (s_fov, y_dof) configuration, reading
// distortion and flow from the fetched chunk.
inline void build_tables(const StepPlumbing& pl, const ChunkMeta& chunk_next, double s_fov, int y_dof,
                         const Config& config, LevelTables& tables,
                         std::vector<std::vector<double>>& vli) {
    const int n = pl.fetch.size();
    const int levels = chunk_next.level_count();
    tables.tau.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(levels)));
    tables.bitrate_units.assign(static_cast<size_t>(n),
                                std::vector<long long>(static_cast<size_t>(levels)));
    tables.bitrate_mbit.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(levels)));
    vli.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(levels)));
    for (int k = 0; k < n; ++k) {
        const int tile = pl.fetch.tiles[static_cast<size_t>(k)];
        const double p_i = pl.p[static_cast<size_t>(k)];
        for (int j = 1; j <= levels; ++j) {
            const TileMeta& t = chunk_next.at(tile, j);
            vli[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] =
                compute_vli(t.distortion, s_fov, y_dof, config.k_dof, p_i, pl.sum_p);
            tables.tau[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] =
                vli[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] * config.xi +
                config.rho * compute_ci(t.flow, s_fov, y_dof, config.k_dof, p_i, pl.sum_p);
            tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] =
                quantize_bitrate_units(t.bitrate_mbit, config.bw_unit_mbit);
            tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] = t.bitrate_mbit;
        }
    }
}

inline std::vector<double> member_values(const Assignment& a, const ChunkMeta& chunk,
                                         double TileMeta::*fieldp) {
    std::vector<double> out(static_cast<size_t>(a.size()));
    for (int k = 0; k < a.size(); ++k)
        out[static_cast<size_t>(k)] = chunk.at(a.tiles[static_cast<size_t>(k)],
                                               a.levels[static_cast<size_t>(k)]).*fieldp;
    return out;
}

}  // namespace detail

// Viewing-probability-weighted means over an assignment's members, read from
// the chunk the assignment fetches. probabilities[k] belongs to tiles[k].
inline double expected_distortion(const Assignment& a, const ChunkMeta& chunk,
                                  const std::vector<double>& probabilities) {
    return probability_weighted_mean(detail::member_values(a, chunk, &TileMeta::distortion),
                                     probabilities);
}

inline double expected_flow(const Assignment& a, const ChunkMeta& chunk,
                            const std::vector<double>& probabilities) {
    return probability_weighted_mean(detail::member_values(a, chunk, &TileMeta::flow), probabilities);
}

// Mean SSIM (reciprocal distortion) of the assignment, weighted the same way.
// The FoV/DoF penalty is deliberately not applied here; it already enters the
// quality loss.
inline double weighted_ssim(const Assignment& a, const ChunkMeta& chunk,
                            const std::vector<double>& probabilities) {
    std::vector<double> ssim(static_cast<size_t>(a.size()));
    for (int k = 0; k < a.size(); ++k)
        ssim[static_cast<size_t>(k)] =
            chunk.at(a.tiles[static_cast<size_t>(k)], a.levels[static_cast<size_t>(k)]).ssim();
    return probability_weighted_mean(ssim, probabilities);
}

namespace detail {

// Fill the objective-related fields of a decision candidate.
inline void evaluate_candidate(const StepPlumbing& pl, const Assignment& a, double s_fov, int y_dof,
                               const SystemState& state, const ChunkMeta& chunk_next, double T,
                               double bt_mbps, const Config& config, Decision& d) {
    d.fetch = pl.fetch;
    d.probabilities = pl.p;
    d.assignment = a;
    d.s_fov = s_fov;
    d.y_dof = y_dof;
    d.phi = quality_loss(expected_distortion(a, chunk_next, pl.p), s_fov, y_dof, config.k_dof);
    d.expected_flow = expected_flow(a, chunk_next, pl.p);
    d.predicted_qs_next =
        update_sickness_queue(state.qs, state.rot.omega_y_deg_s, state.rot.omega_p_deg_s,
                              d.expected_flow, s_fov, y_dof, config.k_dof, config.cs_capacity,
                              config.omega)
            .qs;
    d.predicted_qp_next = update_packet_queue(state.qp, T, config.cp_seconds, s_fov, y_dof,
                                              config.k_dof, a.total_bitrate_mbit, bt_mbps)
                              .qp;
    d.objective_value = config.xi * d.phi + config.rho * d.predicted_qs_next;
}

inline Assignment all_at_level(const FetchSet& fetch, int level, const LevelTables& tables) {
    Assignment a;
    a.tiles = fetch.tiles;
    a.levels.assign(a.tiles.size(), level);
    for (int k = 0; k < a.size(); ++k) {
        a.total_cost += tables.tau[static_cast<size_t>(k)][static_cast<size_t>(level - 1)];
        a.total_bitrate_mbit += tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(level - 1)];
    }
    return a;
}

}  // namespace detail

// One slot of the online algorithm: viewport prediction and tile selection,
// then for every (s_fov, y_dof) configuration a DP quality assignment plus
// SMI-guided refinement, committing the candidate with the minimum
// xi*Phi + rho*Qs. Ties prefer the larger s_fov, then y_dof = 0. If every
// configuration is infeasible, a degraded all-level-1 decision with the
// smallest s_fov and active DoF blur is emitted instead.
inline Decision etscaa_step(const SystemState& state, const TileGrid& grid, const ChunkMeta& chunk_cur,
                            const ChunkMeta& chunk_next, double T, double bt_mbps,
                            const Config& config) {
    if (!(bt_mbps > 0)) throw std::invalid_argument("etscaa_step: Bt must be > 0");
    detail::StepPlumbing pl = detail::run_vpts(state, grid, chunk_cur, chunk_next, T, config);

    Decision best;
    bool have_best = false;
    std::vector<SweepItem> evals;
    LevelTables tables;
    std::vector<std::vector<double>> vli;

    for (double s_fov : config.sfov_ladder) {
        for (int y_dof : {0, 1}) {
            SweepItem item;
            item.s_fov = s_fov;
            item.y_dof = y_dof;
            item.budget_units = bandwidth_budget(state.qp, bt_mbps, T, config.cp_seconds,
                                                 config.lambda_target, s_fov, y_dof, config.k_dof,
                                                 config.bw_unit_mbit);
            detail::build_tables(pl, chunk_next, s_fov, y_dof, config, tables, vli);
            DpOutcome dp = assign_quality_dp(pl.fetch.tiles, item.budget_units, tables);
            if (!dp.feasible) {
                evals.push_back(std::move(item));
                continue;
            }
            item.feasible = true;
            item.initial = dp.assignment;
            const SmiContext smi_ctx = make_smi_context(state.qs, pl.flow_cur, pl.flow_next, vli);
            RefineOptions ropts;
            ropts.alpha = config.alpha;
            ropts.nsl_capacity = config.nsl_capacity;
            item.refined = refine(dp.assignment, item.budget_units, tables, smi_ctx, ropts);

            Decision cand;
            detail::evaluate_candidate(pl, item.refined, s_fov, y_dof, state, chunk_next, T, bt_mbps,
                                       config, cand);
            item.phi = cand.phi;
            item.predicted_qs = cand.predicted_qs_next;
            item.objective = cand.objective_value;
            evals.push_back(item);
            if (!have_best || cand.objective_value < best.objective_value) {
                best = std::move(cand);
                have_best = true;
            }
        }
    }

    if (!have_best) {
        // Every configuration infeasible: fetch everything at the lowest
        // level with the most protective configuration and report it.
        const double s_fov = config.sfov_ladder.back();
        detail::build_tables(pl, chunk_next, s_fov, 1, config, tables, vli);
        Assignment a = detail::all_at_level(pl.fetch, 1, tables);
        detail::evaluate_candidate(pl, a, s_fov, 1, state, chunk_next, T, bt_mbps, config, best);
        best.degraded = true;
    }
    best.evaluations = std::move(evals);
    return best;
}

// Baselines. All three fix s_fov = 1 and y_dof = 0 and use the same viewport
// prediction; they are simplified stand-ins for published tile-selection
// schemes, not faithful re-implementations.

// Highest viewing probability first, each tile raised to the best level the
// remaining budget allows before moving on.
inline Decision baseline_greedy_step(const SystemState& state, const TileGrid& grid,
                                     const ChunkMeta& chunk_cur, const ChunkMeta& chunk_next, double T,
                                     double bt_mbps, const Config& config) {
    detail::StepPlumbing pl = detail::run_vpts(state, grid, chunk_cur, chunk_next, T, config);
    const long long budget = bandwidth_budget(state.qp, bt_mbps, T, config.cp_seconds,
                                              config.lambda_target, 1.0, 0, config.k_dof,
                                              config.bw_unit_mbit);
    LevelTables tables;
    std::vector<std::vector<double>> vli;
    detail::build_tables(pl, chunk_next, 1.0, 0, config, tables, vli);

    const int n = pl.fetch.size();
    const int levels = chunk_next.level_count();
    Assignment a = detail::all_at_level(pl.fetch, 1, tables);
    Decision d;
    long long used = assignment_units(a, tables);
    if (used > budget) {
        detail::evaluate_candidate(pl, a, 1.0, 0, state, chunk_next, T, bt_mbps, config, d);
        d.degraded = true;
        return d;
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        return pl.p[static_cast<size_t>(lhs)] > pl.p[static_cast<size_t>(rhs)];
    });
    for (int k : order) {
        int j = a.levels[static_cast<size_t>(k)];
        while (j < levels) {
            const long long delta =
                tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j)] -
                tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j - 1)];
            if (used + delta > budget) break;
            used += delta;
            ++j;
        }
        a.levels[static_cast<size_t>(k)] = j;
    }
    a.total_cost = 0.0;
    a.total_bitrate_mbit = 0.0;
    for (int k = 0; k < n; ++k) {
        const int j = a.levels[static_cast<size_t>(k)] - 1;
        a.total_cost += tables.tau[static_cast<size_t>(k)][static_cast<size_t>(j)];
        a.total_bitrate_mbit += tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(j)];
    }
    detail::evaluate_candidate(pl, a, 1.0, 0, state, chunk_next, T, bt_mbps, config, d);
    return d;
}

// Single quality level for the whole fetch set: the highest one that fits.
inline Decision baseline_uniform_step(const SystemState& state, const TileGrid& grid,
                                      const ChunkMeta& chunk_cur, const ChunkMeta& chunk_next, double T,
                                      double bt_mbps, const Config& config) {
    detail::StepPlumbing pl = detail::run_vpts(state, grid, chunk_cur, chunk_next, T, config);
    const long long budget = bandwidth_budget(state.qp, bt_mbps, T, config.cp_seconds,
                                              config.lambda_target, 1.0, 0, config.k_dof,
                                              config.bw_unit_mbit);
    LevelTables tables;
    std::vector<std::vector<double>> vli;
    detail::build_tables(pl, chunk_next, 1.0, 0, config, tables, vli);

    const int levels = chunk_next.level_count();
    int chosen = 0;
    for (int j = levels; j >= 1; --j) {
        long long total = 0;
        for (int k = 0; k < pl.fetch.size(); ++k)
            total += tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j - 1)];
        if (total <= budget) {
            chosen = j;
            break;
        }
    }
    Decision d;
    Assignment a = detail::all_at_level(pl.fetch, chosen == 0 ? 1 : chosen, tables);
    detail::evaluate_candidate(pl, a, 1.0, 0, state, chunk_next, T, bt_mbps, config, d);
    d.degraded = chosen == 0;
    return d;
}

// Distortion-only DP: the assignment cost is VLI alone, no sickness term and
// no refinement.
inline Decision baseline_probdash_step(const SystemState& state, const TileGrid& grid,
                                       const ChunkMeta& chunk_cur, const ChunkMeta& chunk_next,
                                       double T, double bt_mbps, const Config& config) {
    detail::StepPlumbing pl = detail::run_vpts(state, grid, chunk_cur, chunk_next, T, config);
    const long long budget = bandwidth_budget(state.qp, bt_mbps, T, config.cp_seconds,
                                              config.lambda_target, 1.0, 0, config.k_dof,
                                              config.bw_unit_mbit);
    LevelTables tables;
    std::vector<std::vector<double>> vli;
    detail::build_tables(pl, chunk_next, 1.0, 0, config, tables, vli);
    tables.tau = vli;

    Decision d;
    DpOutcome dp = assign_quality_dp(pl.fetch.tiles, budget, tables);
    if (!dp.feasible) {
        Assignment a = detail::all_at_level(pl.fetch, 1, tables);
        detail::evaluate_candidate(pl, a, 1.0, 0, state, chunk_next, T, bt_mbps, config, d);
        d.degraded = true;
        return d;
    }
    detail::evaluate_candidate(pl, dp.assignment, 1.0, 0, state, chunk_next, T, bt_mbps, config, d);
    return d;
}

}  // namespace tscc
