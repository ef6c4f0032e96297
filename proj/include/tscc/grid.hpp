#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tscc {

// Equirectangular tile grid. Tiles are indexed 1-based, column-major and
// top-to-bottom: index = (col-1)*rows + row, so in a 6-row grid the tiles
// 1, 7, 13 form the top row. Column c spans yaw [(c-1)*w, c*w) with wraparound
// at 360; row r spans pitch [90 - r*h, 90 - (r-1)*h], row 1 at the north pole.
struct TileGrid {
    int rows = 6;
    int cols = 8;

    int tile_count() const { return rows * cols; }
    double tile_width_deg() const { return 360.0 / cols; }
    double tile_height_deg() const { return 180.0 / rows; }

    int index_of(int row, int col) const { return (col - 1) * rows + row; }
    int row_of(int index) const { return (index - 1) % rows + 1; }
    int col_of(int index) const { return (index - 1) / rows + 1; }

    double col_yaw_min(int col) const { return (col - 1) * tile_width_deg(); }
    double row_pitch_max(int row) const { return 90.0 - (row - 1) * tile_height_deg(); }

    void validate() const {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid: rows and cols must be positive");
    }
};

namespace detail {

inline double wrap_yaw(double yaw_deg) {
    double y = std::fmod(yaw_deg, 360.0);
    if (y < 0) y += 360.0;
    return y == 360.0 ? 0.0 : y;
}

inline double clamp_pitch(double pitch_deg) {
    if (pitch_deg > 90.0) return 90.0;
    if (pitch_deg < -90.0) return -90.0;
    return pitch_deg;
}

// Shortest signed arc from a to b in degrees, result in (-180, 180].
inline double yaw_arc(double from_deg, double to_deg) {
    double d = std::fmod(to_deg - from_deg, 360.0);
    if (d > 180.0) d -= 360.0;
    if (d <= -180.0) d += 360.0;
    return d;
}

inline int mod_floor(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace detail

// Tiles whose angular rectangle intersects the viewport rectangle with
// positive measure. Yaw wraps modulo 360; pitch clamps at the poles. A
// degenerate (zero-size) axis degrades to point containment, so a zero-size
// viewport yields the single tile containing its center.
inline std::vector<int> tiles_overlapping_viewport(double center_yaw_deg, double center_pitch_deg,
                                                   double viewport_w_deg, double viewport_h_deg,
                                                   const TileGrid& grid) {
    grid.validate();
    if (center_pitch_deg < -90.0 || center_pitch_deg > 90.0)
        throw std::invalid_argument("viewport: pitch center must be in [-90,90]");

    constexpr double kEps = 1e-9;
    const double tw = grid.tile_width_deg();
    const double th = grid.tile_height_deg();

    // Column range (0-based, possibly unwrapped beyond [0, cols)).
    int col_first, col_last;
    if (viewport_w_deg <= kEps) {
        col_first = col_last = static_cast<int>(std::floor(detail::wrap_yaw(center_yaw_deg) / tw));
        if (col_first >= grid.cols) col_first = col_last = grid.cols - 1;
    } else if (viewport_w_deg >= 360.0 - kEps) {
        col_first = 0;
        col_last = grid.cols - 1;
    } else {
        const double lo = center_yaw_deg - viewport_w_deg / 2.0;
        const double hi = center_yaw_deg + viewport_w_deg / 2.0;
        col_first = static_cast<int>(std::floor((lo + kEps) / tw));
        col_last = static_cast<int>(std::ceil((hi - kEps) / tw)) - 1;
        if (col_last - col_first + 1 > grid.cols) col_last = col_first + grid.cols - 1;
    }

    // Row range (0-based), pitch clamped, no wrap.
    const double plo = detail::clamp_pitch(center_pitch_deg - viewport_h_deg / 2.0);
    const double phi = detail::clamp_pitch(center_pitch_deg + viewport_h_deg / 2.0);
    int row_first, row_last;
    if (phi - plo <= kEps) {
        double u = 90.0 - detail::clamp_pitch(center_pitch_deg);
        row_first = row_last = static_cast<int>(std::floor(u / th));
    } else {
        row_first = static_cast<int>(std::floor((90.0 - phi + kEps) / th));
        row_last = static_cast<int>(std::ceil((90.0 - plo - kEps) / th)) - 1;
    }
    if (row_first < 0) row_first = 0;
    if (row_last > grid.rows - 1) row_last = grid.rows - 1;
    if (row_last < row_first) row_last = row_first;

    std::vector<int> out;
    out.reserve(static_cast<size_t>(col_last - col_first + 1) * (row_last - row_first + 1));
    for (int c = col_first; c <= col_last; ++c) {
        const int col = detail::mod_floor(c, grid.cols) + 1;
        for (int r = row_first; r <= row_last; ++r) out.push_back(grid.index_of(r + 1, col));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace tscc
