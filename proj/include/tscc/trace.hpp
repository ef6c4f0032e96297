#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscc/viewport.hpp"

namespace tscc {

// Per-second available bandwidth in Mbps.
struct BandwidthTrace {
    std::vector<double> mbps;

    double mean() const {
        double sum = 0.0;
        for (double v : mbps) sum += v;
        return mbps.empty() ? 0.0 : sum / static_cast<double>(mbps.size());
    }

    void scale_to_mean(double target_mbps) {
        if (!(target_mbps > 0)) throw std::invalid_argument("bandwidth: scale target must be > 0");
        const double m = mean();
        if (!(m > 0)) throw std::invalid_argument("bandwidth: cannot scale an empty trace");
        for (double& v : mbps) v *= target_mbps / m;
    }
};

// Per-second head poses. Rotation is the forward finite difference, with the
// yaw step taken on the shortest arc; the last sample has zero rotation.
struct HeadTrace {
    std::vector<Pose> poses;

    Rotation rotation_at(size_t t, double T = 1.0) const {
        if (t + 1 >= poses.size()) return Rotation{};
        const Pose& a = poses[t];
        const Pose& b = poses[t + 1];
        return Rotation{detail::yaw_arc(a.yaw_deg, b.yaw_deg) / T,
                        (b.pitch_deg - a.pitch_deg) / T};
    }
};

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("trace: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

}  // namespace detail

// CSV "second,mbps". A non-numeric first row is treated as a header.
inline BandwidthTrace load_bandwidth_trace(const std::string& path,
                                           std::optional<double> scale_to_mean = std::nullopt) {
    BandwidthTrace trace;
    const auto rows = detail::read_csv(path);
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 2)
            throw std::invalid_argument("bandwidth: row " + std::to_string(r + 1) + " needs second,mbps");
        double second, mbps;
        if (!detail::parse_double(rows[r][0], second) || !detail::parse_double(rows[r][1], mbps)) {
            if (r == 0) continue;  // header
            throw std::invalid_argument("bandwidth: row " + std::to_string(r + 1) + " is not numeric");
        }
        if (!(mbps > 0))
            throw std::invalid_argument("bandwidth: non-positive entry at row " + std::to_string(r + 1));
        trace.mbps.push_back(mbps);
    }
    if (trace.mbps.empty()) throw std::invalid_argument("bandwidth: no samples in " + path);
    if (scale_to_mean) trace.scale_to_mean(*scale_to_mean);
    return trace;
}

// CSV "second,yaw_deg,pitch_deg".
inline HeadTrace load_head_trace(const std::string& path) {
    HeadTrace trace;
    const auto rows = detail::read_csv(path);
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 3)
            throw std::invalid_argument("head: row " + std::to_string(r + 1) +
                                        " needs second,yaw_deg,pitch_deg");
        double second, yaw, pitch;
        if (!detail::parse_double(rows[r][0], second) || !detail::parse_double(rows[r][1], yaw) ||
            !detail::parse_double(rows[r][2], pitch)) {
            if (r == 0) continue;  // header
            throw std::invalid_argument("head: row " + std::to_string(r + 1) + " is not numeric");
        }
        if (pitch < -90.0 || pitch > 90.0)
            throw std::invalid_argument("head: pitch outside [-90,90] at row " + std::to_string(r + 1));
        trace.poses.push_back(Pose::normalized(yaw, pitch));
    }
    if (trace.poses.empty()) throw std::invalid_argument("head: no samples in " + path);
    return trace;
}

// --------------------------- synthetic traces ------------------------------

enum class BandwidthModel { constant, walk };

struct BandwidthSynthSpec {
    BandwidthModel model = BandwidthModel::constant;
    double mean_mbps = 8.0;
    double amplitude_mbps = 2.0;  // walk step bound
};

inline BandwidthTrace synthesize_bandwidth_trace(const BandwidthSynthSpec& spec, std::uint64_t seed,
                                                 int length) {
    if (length < 1) throw std::invalid_argument("bandwidth: length must be >= 1");
    if (!(spec.mean_mbps > 0)) throw std::invalid_argument("bandwidth: mean must be > 0");
    BandwidthTrace trace;
    trace.mbps.reserve(static_cast<size_t>(length));
    if (spec.model == BandwidthModel::constant) {
        trace.mbps.assign(static_cast<size_t>(length), spec.mean_mbps);
        return trace;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> step(-spec.amplitude_mbps, spec.amplitude_mbps);
    const double floor_mbps = std::max(0.25, spec.mean_mbps * 0.25);
    const double ceil_mbps = spec.mean_mbps * 2.5;
    double v = spec.mean_mbps;
    for (int t = 0; t < length; ++t) {
        trace.mbps.push_back(v);
        v += step(rng);
        if (v < floor_mbps) v = floor_mbps;
        if (v > ceil_mbps) v = ceil_mbps;
    }
    trace.scale_to_mean(spec.mean_mbps);
    return trace;
}

enum class HeadModel { static_pose, sinusoid, random_walk };

struct HeadSynthSpec {
    HeadModel model = HeadModel::static_pose;
    double yaw0_deg = 0.0;
    double pitch0_deg = 0.0;
    double yaw_amplitude_deg = 30.0;    // sinusoid
    double pitch_amplitude_deg = 10.0;  // sinusoid
    double period_s = 20.0;             // sinusoid
    double max_speed_deg_s = 100.0;     // keeps the normalized rotation term <= 1
};

inline HeadTrace synthesize_head_trace(const HeadSynthSpec& spec, std::uint64_t seed, int length) {
    if (length < 1) throw std::invalid_argument("head: length must be >= 1");
    if (!(spec.max_speed_deg_s > 0)) throw std::invalid_argument("head: max_speed must be > 0");
    HeadTrace trace;
    trace.poses.reserve(static_cast<size_t>(length));
    switch (spec.model) {
        case HeadModel::static_pose: {
            trace.poses.assign(static_cast<size_t>(length),
                               Pose::normalized(spec.yaw0_deg, spec.pitch0_deg));
            break;
        }
        case HeadModel::sinusoid: {
            if (!(spec.period_s > 0)) throw std::invalid_argument("head: period must be > 0");
            const double peak = 2.0 * M_PI * std::max(spec.yaw_amplitude_deg, spec.pitch_amplitude_deg) /
                                spec.period_s;
            if (peak > spec.max_speed_deg_s)
                throw std::invalid_argument("head: sinusoid exceeds max_speed; increase the period");
            for (int t = 0; t < length; ++t) {
                const double phase = 2.0 * M_PI * t / spec.period_s;
                trace.poses.push_back(
                    Pose::normalized(spec.yaw0_deg + spec.yaw_amplitude_deg * std::sin(phase),
                                     spec.pitch0_deg + spec.pitch_amplitude_deg * std::sin(phase)));
            }
            break;
        }
        case HeadModel::random_walk: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> impulse(-1.0, 1.0);
            double yaw = spec.yaw0_deg, pitch = spec.pitch0_deg;
            double vy = 0.0, vp = 0.0;
            for (int t = 0; t < length; ++t) {
                trace.poses.push_back(Pose::normalized(yaw, pitch));
                vy = 0.8 * vy + 0.35 * spec.max_speed_deg_s * impulse(rng);
                vp = 0.8 * vp + 0.15 * spec.max_speed_deg_s * impulse(rng);
                const double cap_y = spec.max_speed_deg_s;
                const double cap_p = spec.max_speed_deg_s;
                if (vy > cap_y) vy = cap_y;
                if (vy < -cap_y) vy = -cap_y;
                if (vp > cap_p) vp = cap_p;
                if (vp < -cap_p) vp = -cap_p;
                yaw += vy;
                pitch += vp;
                if (pitch > 60.0) {  // stay off the poles, as real viewers do
                    pitch = 60.0;
                    vp = -std::abs(vp) * 0.5;
                }
                if (pitch < -60.0) {
                    pitch = -60.0;
                    vp = std::abs(vp) * 0.5;
                }
            }
            break;
        }
    }
    return trace;
}

}  // namespace tscc
