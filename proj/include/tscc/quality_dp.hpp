#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tscc {

// One quality level per fetched tile. levels[k] belongs to tiles[k]; tiles
// are kept in ascending index order.
struct Assignment {
    std::vector<int> tiles;
    std::vector<int> levels;
    double total_bitrate_mbit = 0.0;
    double total_cost = 0.0;  // sum of tau over members

    int size() const { return static_cast<int>(tiles.size()); }
    bool empty() const { return tiles.empty(); }
};

struct DpOutcome {
    bool feasible = false;
    Assignment assignment;
    std::vector<int> blocking_tiles;  // tiles that cannot fit even at level 1
};

// Per-tile, per-level input tables in fetch-set order: values[k][j-1] is the
// entry for tiles[k] at level j.
struct LevelTables {
    std::vector<std::vector<double>> tau;
    std::vector<std::vector<long long>> bitrate_units;
    std::vector<std::vector<double>> bitrate_mbit;

    int tile_count() const { return static_cast<int>(tau.size()); }
    int level_count() const { return tau.empty() ? 0 : static_cast<int>(tau[0].size()); }
};

// Bitrates are quantized upward so that an assignment fitting the integer
// budget also fits the real bound.
inline long long quantize_bitrate_units(double bitrate_mbit, double bw_unit_mbit) {
    if (!(bw_unit_mbit > 0)) throw std::invalid_argument("quantize_bitrate_units: unit must be > 0");
    return static_cast<long long>(std::ceil(bitrate_mbit / bw_unit_mbit - 1e-9));
}

// Minimum-cost quality assignment under an integer bandwidth budget.
//
// M(n, beta) = 0 when n = 0, else min over levels j with b_{v_n,j} <= beta of
// M(n-1, beta - b_{v_n,j}) + tau(v_n, j). The chosen level is recorded per
// examined state and the assignment is recovered by walking the table back
// from (|V|, budget).
//
// Ties break toward the higher quality level, then the lower tile index:
// tiles are processed in reverse so the backtrack fixes the lowest-index
// tile's level first, preferring the higher level at each step.
inline DpOutcome assign_quality_dp(const std::vector<int>& tiles, long long budget_units,
                                   const LevelTables& tables) {
    const int n = static_cast<int>(tiles.size());
    if (tables.tile_count() != n) throw std::invalid_argument("assign_quality_dp: table size mismatch");
    if (budget_units < 0) budget_units = 0;
    if (budget_units > 200'000)
        throw std::invalid_argument("assign_quality_dp: budget axis too large; increase bw_unit");

    DpOutcome out;
    if (n == 0) {
        out.feasible = true;
        return out;
    }
    const int levels = tables.level_count();
    if (levels < 1) throw std::invalid_argument("assign_quality_dp: no quality levels");

    // Cheap infeasibility screen: every tile must fit at its cheapest level,
    // jointly within the budget.
    long long min_sum = 0;
    for (int k = 0; k < n; ++k) {
        long long mn = std::numeric_limits<long long>::max();
        for (int j = 0; j < levels; ++j) mn = std::min(mn, tables.bitrate_units[k][j]);
        min_sum += mn;
        if (mn > budget_units) out.blocking_tiles.push_back(tiles[k]);
    }
    if (!out.blocking_tiles.empty()) return out;
    if (min_sum > budget_units) {
        out.blocking_tiles = tiles;  // jointly infeasible, no single offender
        return out;
    }

    const size_t width = static_cast<size_t>(budget_units) + 1;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(width, 0.0), cur(width, inf);
    std::vector<std::int16_t> choice(static_cast<size_t>(n) * width, -1);

    // Stage k processes tiles[n-1-k]; the backtrack then emits tiles[0] first.
    for (int k = 0; k < n; ++k) {
        const int tile_pos = n - 1 - k;
        std::fill(cur.begin(), cur.end(), inf);
        for (long long beta = 0; beta <= budget_units; ++beta) {
            double best = inf;
            int best_level = -1;
            for (int j = levels - 1; j >= 0; --j) {  // high level first: wins ties
                const long long b = tables.bitrate_units[tile_pos][j];
                if (b > beta) continue;
                const double c = prev[static_cast<size_t>(beta - b)];
                if (c == inf) continue;
                const double total = c + tables.tau[tile_pos][j];
                // Costs that agree to rounding noise count as tied, so that
                // permutations of one optimal multiset (whose partial sums
                // differ only in grouping) keep the higher level in front.
                if (best_level < 0 || total < best - 1e-9 * (1.0 + std::abs(best))) {
                    best = total;
                    best_level = j;
                }
            }
            cur[static_cast<size_t>(beta)] = best;
            choice[static_cast<size_t>(k) * width + static_cast<size_t>(beta)] =
                static_cast<std::int16_t>(best_level);
        }
        std::swap(prev, cur);
    }
    if (prev[width - 1] == inf) {
        out.blocking_tiles = tiles;
        return out;
    }

    // Backtrack from (n, budget); stage n-1 holds the choice for tiles[0].
    out.feasible = true;
    out.assignment.tiles = tiles;
    out.assignment.levels.assign(static_cast<size_t>(n), 0);
    long long beta = budget_units;
    for (int k = n - 1; k >= 0; --k) {
        const int tile_pos = n - 1 - k;
        const int j = choice[static_cast<size_t>(k) * width + static_cast<size_t>(beta)];
        out.assignment.levels[static_cast<size_t>(tile_pos)] = j + 1;
        beta -= tables.bitrate_units[tile_pos][j];
    }
    for (int k = 0; k < n; ++k) {
        const int j = out.assignment.levels[static_cast<size_t>(k)] - 1;
        out.assignment.total_cost += tables.tau[k][j];
        out.assignment.total_bitrate_mbit += tables.bitrate_mbit[k][j];
    }
    return out;
}

inline long long assignment_units(const Assignment& a, const LevelTables& tables) {
    long long total = 0;
    for (int k = 0; k < a.size(); ++k)
        total += tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(a.levels[k] - 1)];
    return total;
}

}  // namespace tscc
