#pragma once

#include <stdexcept>
#include <vector>

#include "tscc/queues.hpp"

namespace tscc {

// Cybersickness indicator of tile (i,j): flow scaled by the shrink factor and
// the tile's share of the viewing probability mass.
//   CI = f * s_fov(1-k_dof*y_dof) * p_i / sum_p
inline double compute_ci(double flow, double s_fov, int y_dof, double k_dof, double p_i,
                         double sum_p_over_set) {
    if (!(sum_p_over_set > 0)) throw std::invalid_argument("compute_ci: probability mass must be > 0");
    return flow * detail::shrink_factor(s_fov, y_dof, k_dof) * p_i / sum_p_over_set;
}

// Video loss indicator of tile (i,j): probability-weighted distortion,
// amplified when the viewport shrinks or blurs.
//   VLI = p_i * d / (s_fov(1-k_dof*y_dof) * sum_p)
inline double compute_vli(double distortion, double s_fov, int y_dof, double k_dof, double p_i,
                          double sum_p_over_set) {
    if (!(sum_p_over_set > 0)) throw std::invalid_argument("compute_vli: probability mass must be > 0");
    const double shrink = detail::shrink_factor(s_fov, y_dof, k_dof);
    if (!(shrink > 0)) throw std::invalid_argument("compute_vli: degenerate shrink factor");
    return p_i * distortion / (shrink * sum_p_over_set);
}

// Per-tile assignment cost: tau = xi*VLI + rho*CI.
inline double tile_cost_tau(double distortion, double flow, double s_fov, int y_dof, double k_dof,
                            double p_i, double sum_p_over_set, double xi, double rho) {
    return xi * compute_vli(distortion, s_fov, y_dof, k_dof, p_i, sum_p_over_set) +
           rho * compute_ci(flow, s_fov, y_dof, k_dof, p_i, sum_p_over_set);
}

// Probability-weighted mean of per-member values; used for the expected
// viewport distortion D_t and the expected optical flow.
inline double probability_weighted_mean(const std::vector<double>& values,
                                        const std::vector<double>& probabilities) {
    if (values.size() != probabilities.size())
        throw std::invalid_argument("probability_weighted_mean: size mismatch");
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        num += probabilities[k] * values[k];
        den += probabilities[k];
    }
    if (!(den > 0)) throw std::invalid_argument("probability_weighted_mean: zero probability mass");
    return num / den;
}

// Phi_t = D_t / (s_fov (1 - k_dof y_dof))
inline double quality_loss(double expected_distortion, double s_fov, int y_dof, double k_dof) {
    const double shrink = detail::shrink_factor(s_fov, y_dof, k_dof);
    if (!(shrink > 0)) throw std::invalid_argument("quality_loss: degenerate shrink factor");
    return expected_distortion / shrink;
}

}  // namespace tscc
