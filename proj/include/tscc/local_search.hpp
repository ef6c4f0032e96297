#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tscc/quality_dp.hpp"

namespace tscc {

// Bounded FIFO memory of recently examined assignments. The fingerprint is
// the level vector itself; a compact rolling key is used only to make the
// membership probe cheap, with an exact vector comparison confirming hits.
class NeighborSearchList {
public:
    explicit NeighborSearchList(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("NeighborSearchList: capacity must be >= 1");
    }

    static std::uint64_t key_of(const std::vector<int>& levels) {
        std::uint64_t k = 1469598103934665603ull;
        for (int v : levels) k = (k ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
        return k;
    }

    bool contains(const std::vector<int>& levels) const {
        if (keys_.find(key_of(levels)) == keys_.end()) return false;
        for (const auto& e : entries_)
            if (e == levels) return true;
        return false;
    }

    void insert(const std::vector<int>& levels) {
        if (contains(levels)) return;
        entries_.push_back(levels);
        keys_.insert(key_of(levels));
        if (static_cast<int>(entries_.size()) > capacity_) {
            keys_.erase(keys_.find(key_of(entries_.front())));
            entries_.pop_front();
        }
    }

    int size() const { return static_cast<int>(entries_.size()); }

private:
    int capacity_;
    std::deque<std::vector<int>> entries_;
    std::unordered_multiset<std::uint64_t> keys_;
};

// Inputs for the sickness migration indicator, in fetch-set order:
//   smi_term[k][j-1] = qs_prev * (flow_next[k][j] - flow_cur[k][j]) + vli[k][j]
// so SMI of an assignment is the sum of its members' terms.
struct SmiContext {
    std::vector<std::vector<double>> smi_term;

    double smi(const Assignment& a) const {
        double total = 0.0;
        for (int k = 0; k < a.size(); ++k)
            total += smi_term[static_cast<size_t>(k)][static_cast<size_t>(a.levels[k] - 1)];
        return total;
    }
};

inline SmiContext make_smi_context(double qs_prev, const std::vector<std::vector<double>>& flow_cur,
                                   const std::vector<std::vector<double>>& flow_next,
                                   const std::vector<std::vector<double>>& vli) {
    SmiContext ctx;
    ctx.smi_term.resize(vli.size());
    for (size_t k = 0; k < vli.size(); ++k) {
        ctx.smi_term[k].resize(vli[k].size());
        for (size_t j = 0; j < vli[k].size(); ++j)
            ctx.smi_term[k][j] = qs_prev * (flow_next[k][j] - flow_cur[k][j]) + vli[k][j];
    }
    return ctx;
}

inline double compute_smi(const Assignment& a, const SmiContext& ctx) { return ctx.smi(a); }

// All assignments one level step away from `a` on exactly one tile, within
// level bounds and the bandwidth budget. Order: tile index ascending, the
// -1 move before the +1 move.
inline std::vector<Assignment> neighbors(const Assignment& a, long long budget_units,
                                         const LevelTables& tables) {
    const int levels = tables.level_count();
    const long long used = assignment_units(a, tables);
    std::vector<Assignment> out;
    for (int k = 0; k < a.size(); ++k) {
        for (int delta : {-1, +1}) {
            const int j = a.levels[static_cast<size_t>(k)] + delta;
            if (j < 1 || j > levels) continue;
            const long long next_units = used -
                tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(a.levels[k] - 1)] +
                tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j - 1)];
            if (next_units > budget_units) continue;
            Assignment nb = a;
            nb.levels[static_cast<size_t>(k)] = j;
            nb.total_cost = 0.0;
            nb.total_bitrate_mbit = 0.0;
            for (int m = 0; m < nb.size(); ++m) {
                nb.total_cost += tables.tau[static_cast<size_t>(m)][static_cast<size_t>(nb.levels[m] - 1)];
                nb.total_bitrate_mbit +=
                    tables.bitrate_mbit[static_cast<size_t>(m)][static_cast<size_t>(nb.levels[m] - 1)];
            }
            out.push_back(std::move(nb));
        }
    }
    return out;
}

struct RefineOptions {
    int alpha = 10;
    int nsl_capacity = 20;
    int max_iterations = 200;  // hard cap against cycling walks
};

// SMI-guided local search around the DP assignment. The walk moves to the
// minimum-SMI neighbor not blocked by the NSL (even when that worsens SMI),
// while the returned incumbent only ever improves. Stops when a single
// assignment has been examined alpha times, when no admissible neighbor
// exists, or at the iteration cap.
inline Assignment refine(const Assignment& initial, long long budget_units, const LevelTables& tables,
                         const SmiContext& smi_ctx, const RefineOptions& opts = {}) {
    Assignment incumbent = initial;
    double incumbent_smi = smi_ctx.smi(incumbent);

    Assignment center = initial;
    double center_smi = incumbent_smi;

    NeighborSearchList nsl(opts.nsl_capacity);
    nsl.insert(center.levels);

    std::map<std::vector<int>, int> exam_count;
    exam_count[center.levels] = 1;

    const int levels = tables.level_count();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // Scan single-step moves; SMI changes by one term only.
        int best_tile = -1, best_level = 0;
        double best_smi = 0.0;
        long long used = assignment_units(center, tables);
        for (int k = 0; k < center.size(); ++k) {
            const int j0 = center.levels[static_cast<size_t>(k)];
            for (int delta : {-1, +1}) {
                const int j = j0 + delta;
                if (j < 1 || j > levels) continue;
                const long long next_units = used -
                    tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j0 - 1)] +
                    tables.bitrate_units[static_cast<size_t>(k)][static_cast<size_t>(j - 1)];
                if (next_units > budget_units) continue;
                const double smi = center_smi -
                    smi_ctx.smi_term[static_cast<size_t>(k)][static_cast<size_t>(j0 - 1)] +
                    smi_ctx.smi_term[static_cast<size_t>(k)][static_cast<size_t>(j - 1)];
                if (best_tile >= 0 && !(smi < best_smi)) continue;
                center.levels[static_cast<size_t>(k)] = j;
                const bool blocked = nsl.contains(center.levels);
                center.levels[static_cast<size_t>(k)] = j0;
                if (blocked) continue;
                best_tile = k;
                best_level = j;
                best_smi = smi;
            }
        }
        if (best_tile < 0) break;  // every neighbor blocked or infeasible

        center.levels[static_cast<size_t>(best_tile)] = best_level;
        center_smi = best_smi;
        nsl.insert(center.levels);
        const int visits = ++exam_count[center.levels];

        if (center_smi < incumbent_smi) {
            incumbent = center;
            incumbent_smi = center_smi;
        }
        if (visits >= opts.alpha) break;
    }

    // Refresh derived totals for the incumbent.
    incumbent.total_cost = 0.0;
    incumbent.total_bitrate_mbit = 0.0;
    for (int k = 0; k < incumbent.size(); ++k) {
        const int j = incumbent.levels[static_cast<size_t>(k)] - 1;
        incumbent.total_cost += tables.tau[static_cast<size_t>(k)][static_cast<size_t>(j)];
        incumbent.total_bitrate_mbit +=
            tables.bitrate_mbit[static_cast<size_t>(k)][static_cast<size_t>(j)];
    }
    return incumbent;
}

}  // namespace tscc
