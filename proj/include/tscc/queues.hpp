#pragma once

#include <cmath>
#include <stdexcept>

namespace tscc {

// Occupancies live in [0,1]. Clamping is reported, not raised: a run must
// survive traces that break the model's assumptions mid-flight.
struct QueueState {
    double qp = 0.5;  // packet queue occupancy
    double qs = 0.0;  // sickness queue occupancy
};

struct PacketQueueUpdate {
    double qp = 0.0;
    bool stalled = false;  // unclamped value went below 0
};

struct SicknessQueueUpdate {
    double qs = 0.0;
    bool overflowed = false;  // unclamped value reached 1
};

namespace detail {
inline double shrink_factor(double s_fov, int y_dof, double k_dof) {
    return s_fov * (1.0 - k_dof * y_dof);
}
inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }
}  // namespace detail

// qp' = qp + (T/Cp) * (1 - s_fov(1-k_dof*y_dof) * gamma / Bt)
// The queue drains when the download of the viewport (gamma megabits,
// reduced by FoV shrink and DoF blur) takes longer than the chunk duration.
inline PacketQueueUpdate update_packet_queue(double qp_prev, double T, double cp, double s_fov,
                                             int y_dof, double k_dof, double gamma_mbit,
                                             double bt_mbps) {
    if (!(bt_mbps > 0)) throw std::invalid_argument("update_packet_queue: Bt must be > 0");
    if (!(gamma_mbit >= 0)) throw std::invalid_argument("update_packet_queue: gamma must be >= 0");
    if (!(detail::shrink_factor(s_fov, y_dof, k_dof) >= 0))
        throw std::invalid_argument("update_packet_queue: negative shrink factor");
    const double raw =
        qp_prev + (T / cp) * (1.0 - detail::shrink_factor(s_fov, y_dof, k_dof) * gamma_mbit / bt_mbps);
    PacketQueueUpdate out;
    out.stalled = raw < 0.0;
    out.qp = detail::clamp01(raw);
    return out;
}

// Bandwidth budget in integer bw_unit steps for one slot:
//   sum x*b <= Bt * (Cp*(qp - lambda) + T) / (s_fov(1-k_dof*y_dof) * T)
// Keeping the spend within this bound keeps qp at or above lambda. The raw
// bound is rounded to the nearest unit and floored at zero.
inline long long bandwidth_budget(double qp_prev, double bt_mbps, double T, double cp, double lambda,
                                  double s_fov, int y_dof, double k_dof, double bw_unit_mbit) {
    if (!(bt_mbps > 0)) throw std::invalid_argument("bandwidth_budget: Bt must be > 0");
    if (!(bw_unit_mbit > 0)) throw std::invalid_argument("bandwidth_budget: bw_unit must be > 0");
    if (!(detail::shrink_factor(s_fov, y_dof, k_dof) > 0))
        throw std::invalid_argument("bandwidth_budget: degenerate shrink factor");
    const double raw = bt_mbps * (cp * (qp_prev - lambda) + T) /
                       (detail::shrink_factor(s_fov, y_dof, k_dof) * T);
    const long long units = std::llround(raw / bw_unit_mbit);
    return units < 0 ? 0 : units;
}

// Unrounded form of the same bound, used by reporting and tests.
inline double bandwidth_budget_raw(double qp_prev, double bt_mbps, double T, double cp, double lambda,
                                   double s_fov, int y_dof, double k_dof) {
    return bt_mbps * (cp * (qp_prev - lambda) + T) / (detail::shrink_factor(s_fov, y_dof, k_dof) * T);
}

// qs' = qs + [ (|omega| / (100*sqrt(2)) + expected_flow) * s_fov(1-k_dof*y_dof) - Omega ] / Cs
// The rotation term normalizes a (100,100) deg/s head speed to exactly 1.
// expected_flow is the probability-weighted mean flow of the chosen
// assignment, computed by the caller.
inline SicknessQueueUpdate update_sickness_queue(double qs_prev, double omega_y_deg_s,
                                                 double omega_p_deg_s, double expected_flow,
                                                 double s_fov, int y_dof, double k_dof, double cs,
                                                 double omega_drain) {
    if (!(cs > 0)) throw std::invalid_argument("update_sickness_queue: Cs must be > 0");
    const double rotation =
        std::sqrt(omega_y_deg_s * omega_y_deg_s + omega_p_deg_s * omega_p_deg_s) /
        (100.0 * std::sqrt(2.0));
    const double stimulus =
        (rotation + expected_flow) * detail::shrink_factor(s_fov, y_dof, k_dof) - omega_drain;
    const double raw = qs_prev + stimulus / cs;
    SicknessQueueUpdate out;
    out.overflowed = raw >= 1.0;
    out.qs = detail::clamp01(raw);
    return out;
}

}  // namespace tscc
