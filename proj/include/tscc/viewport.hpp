#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tscc/grid.hpp"

namespace tscc {

struct Pose {
    double yaw_deg = 0.0;    // [0, 360)
    double pitch_deg = 0.0;  // [-90, 90]

    static Pose normalized(double yaw, double pitch) {
        return Pose{detail::wrap_yaw(yaw), detail::clamp_pitch(pitch)};
    }
};

struct Rotation {
    double omega_y_deg_s = 0.0;
    double omega_p_deg_s = 0.0;

    double magnitude() const {
        return std::sqrt(omega_y_deg_s * omega_y_deg_s + omega_p_deg_s * omega_p_deg_s);
    }
};

// Per-tile viewing probability for the next slot, tile-indexed (1-based
// tiles map to p[tile-1]).
struct ProbabilityField {
    std::vector<double> p;

    double at(int tile) const { return p[static_cast<size_t>(tile - 1)]; }
};

// A rectangular (wrapping in yaw) region of tiles to fetch.
struct FetchSet {
    std::vector<int> tiles;  // ascending tile indices
    int row_first = 1;
    int row_last = 1;
    int col_first = 1;   // first column of the arc
    int col_count = 1;   // arc length; wraps modulo grid.cols

    bool contains(int tile) const {
        return std::binary_search(tiles.begin(), tiles.end(), tile);
    }
    int size() const { return static_cast<int>(tiles.size()); }
};

// Dead-reckoning predictor: yaw advances by omega_y*T (wrapping), pitch by
// omega_p*T (clamped at the poles).
inline Pose predict_center(const Pose& pose, const Rotation& rot, double T) {
    return Pose::normalized(pose.yaw_deg + rot.omega_y_deg_s * T,
                            pose.pitch_deg + rot.omega_p_deg_s * T);
}

// Candidate viewport positions on a 5-degree lattice within +/-3 sigma of the
// predicted center, weighted by the discretized independent 2D Gaussian.
// Each tile sums the weights of the candidates whose viewport overlaps it.
inline ProbabilityField viewing_probabilities(const Pose& center, double sigma_y_deg,
                                              double sigma_p_deg, double viewport_w_deg,
                                              double viewport_h_deg, const TileGrid& grid) {
    if (!(sigma_y_deg > 0 && sigma_p_deg > 0))
        throw std::invalid_argument("viewing_probabilities: sigma must be > 0");

    constexpr double kLatticeDeg = 5.0;
    const int ky_max = static_cast<int>(std::floor(3.0 * sigma_y_deg / kLatticeDeg));
    const int kp_max = static_cast<int>(std::floor(3.0 * sigma_p_deg / kLatticeDeg));

    struct Candidate {
        Pose pose;
        double weight;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<size_t>(2 * ky_max + 1) * (2 * kp_max + 1));
    double total = 0.0;
    for (int ky = -ky_max; ky <= ky_max; ++ky) {
        const double dy = ky * kLatticeDeg;
        const double wy = std::exp(-dy * dy / (2.0 * sigma_y_deg * sigma_y_deg));
        for (int kp = -kp_max; kp <= kp_max; ++kp) {
            const double dp = kp * kLatticeDeg;
            const double wp = std::exp(-dp * dp / (2.0 * sigma_p_deg * sigma_p_deg));
            candidates.push_back(
                {Pose::normalized(center.yaw_deg + dy, center.pitch_deg + dp), wy * wp});
            total += wy * wp;
        }
    }

    ProbabilityField field;
    field.p.assign(static_cast<size_t>(grid.tile_count()), 0.0);
    for (const Candidate& c : candidates) {
        const double w = c.weight / total;
        for (int tile : tiles_overlapping_viewport(c.pose.yaw_deg, c.pose.pitch_deg, viewport_w_deg,
                                                   viewport_h_deg, grid))
            field.p[static_cast<size_t>(tile - 1)] += w;
    }
    for (double& v : field.p) v = std::min(v, 1.0);  // guard accumulated rounding
    return field;
}

namespace detail {

// Minimal covering arc of a set of 0-based columns on a ring of size cols:
// the complement of the largest cyclic gap.
inline void covering_arc(const std::vector<int>& sorted_cols, int cols, int& start, int& count) {
    const int m = static_cast<int>(sorted_cols.size());
    if (m == cols) {
        start = 0;
        count = cols;
        return;
    }
    int best_gap = -1, best_next = 0;
    for (int i = 0; i < m; ++i) {
        const int cur = sorted_cols[static_cast<size_t>(i)];
        const int next = sorted_cols[static_cast<size_t>((i + 1) % m)];
        const int gap = detail::mod_floor(next - cur, cols) - 1 + (m == 1 ? cols : 0);
        if (gap > best_gap) {
            best_gap = gap;
            best_next = (i + 1) % m;
        }
    }
    start = sorted_cols[static_cast<size_t>(best_next)];
    count = cols - best_gap;
}

}  // namespace detail

// Boundary-trimmed tile selection. Start from the minimal bounding rectangle
// of the support {p_i > 0}; repeatedly drop a boundary row or column whose
// members all fall below epsilon. The row and column holding the
// highest-probability tile are never dropped, so the set stays non-empty.
inline FetchSet select_tiles(const ProbabilityField& field, double epsilon, const TileGrid& grid) {
    const int n = grid.tile_count();
    if (static_cast<int>(field.p.size()) != n)
        throw std::invalid_argument("select_tiles: field size does not match grid");

    int max_tile = 0;
    double max_p = 0.0;
    std::vector<int> support_rows, support_cols;
    for (int i = 1; i <= n; ++i) {
        const double p = field.at(i);
        if (p > 0.0) {
            support_rows.push_back(grid.row_of(i) - 1);
            support_cols.push_back(grid.col_of(i) - 1);
            if (p > max_p) {
                max_p = p;
                max_tile = i;
            }
        }
    }
    if (max_tile == 0) throw std::invalid_argument("select_tiles: all probabilities are zero");

    int r0 = *std::min_element(support_rows.begin(), support_rows.end());
    int r1 = *std::max_element(support_rows.begin(), support_rows.end());
    std::sort(support_cols.begin(), support_cols.end());
    support_cols.erase(std::unique(support_cols.begin(), support_cols.end()), support_cols.end());
    int c_start = 0, c_count = 0;
    detail::covering_arc(support_cols, grid.cols, c_start, c_count);

    const int max_row = grid.row_of(max_tile) - 1;
    const int max_col = grid.col_of(max_tile) - 1;

    auto row_below_eps = [&](int row) {
        for (int k = 0; k < c_count; ++k) {
            const int col = detail::mod_floor(c_start + k, grid.cols);
            if (field.at(grid.index_of(row + 1, col + 1)) >= epsilon) return false;
        }
        return true;
    };
    auto col_below_eps = [&](int col) {
        for (int row = r0; row <= r1; ++row)
            if (field.at(grid.index_of(row + 1, col + 1)) >= epsilon) return false;
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        if (r0 < r1 && r0 != max_row && row_below_eps(r0)) {
            ++r0;
            changed = true;
        }
        if (r0 < r1 && r1 != max_row && row_below_eps(r1)) {
            --r1;
            changed = true;
        }
        // A full ring has no column boundary to trim.
        if (c_count > 1 && c_count < grid.cols && c_start != max_col && col_below_eps(c_start)) {
            c_start = detail::mod_floor(c_start + 1, grid.cols);
            --c_count;
            changed = true;
        }
        const int c_end = detail::mod_floor(c_start + c_count - 1, grid.cols);
        if (c_count > 1 && c_count < grid.cols && c_end != max_col && col_below_eps(c_end)) {
            --c_count;
            changed = true;
        }
    }

    FetchSet out;
    out.row_first = r0 + 1;
    out.row_last = r1 + 1;
    out.col_first = c_start + 1;
    out.col_count = c_count;
    for (int k = 0; k < c_count; ++k) {
        const int col = detail::mod_floor(c_start + k, grid.cols);
        for (int row = r0; row <= r1; ++row) out.tiles.push_back(grid.index_of(row + 1, col + 1));
    }
    std::sort(out.tiles.begin(), out.tiles.end());
    return out;
}

}  // namespace tscc
