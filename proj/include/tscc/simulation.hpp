#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscc/controller.hpp"
#include "tscc/trace.hpp"

namespace tscc {

enum class Algo { etscaa, greedy, uniform, probdash };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::etscaa: return "etscaa";
        case Algo::greedy: return "greedy";
        case Algo::uniform: return "uniform";
        case Algo::probdash: return "probdash";
    }
    return "?";
}

inline Algo parse_algo(const std::string& s) {
    if (s == "etscaa") return Algo::etscaa;
    if (s == "greedy") return Algo::greedy;
    if (s == "uniform") return Algo::uniform;
    if (s == "probdash") return Algo::probdash;
    throw std::invalid_argument("unknown algorithm: " + s);
}

struct SlotReport {
    int t = 0;
    double bt_mbps = 0.0;
    double s_fov = 1.0;
    int y_dof = 0;
    std::map<int, int> level_histogram;
    double total_bitrate_mbit = 0.0;
    double phi = 0.0;
    double qp = 0.0;  // after the slot's update
    double qs = 0.0;
    double weighted_ssim = 0.0;
    double total_cost = 0.0;  // xi*phi + rho*qs
    bool stalled = false;
    bool overflowed = false;
    bool degraded = false;
};

struct RunReport {
    Algo algo = Algo::etscaa;
    int slots = 0;
    std::uint64_t seed = 0;
    Config config;
    double chunk_duration_s = 1.0;
    int rows = 0, cols = 0, levels = 0, chunks = 0;
    bool meta_recycled = false;
    std::vector<SlotReport> slot_reports;

    double total_cost_sum = 0.0;
    double mean_total_cost = 0.0;
    double mean_phi = 0.0;
    double mean_weighted_ssim = 0.0;
    double mean_bitrate_mbit = 0.0;
    double final_qp = 0.0;
    double final_qs = 0.0;
    int stall_count = 0;
    int overflow_count = 0;
    int degraded_count = 0;
};

// Discrete-time trace replay. At slot t the controller fetches the next
// chunk using the predicted viewport; the committed decision then drives the
// packet queue (gamma = committed bitrate) and the sickness queue (expected
// flow of the committed assignment under the current head rotation).
inline RunReport run_simulation(const VideoMeta& meta, const BandwidthTrace& bandwidth,
                                const HeadTrace& head, const Config& config, Algo algo, int slots,
                                std::uint64_t seed = 0) {
    config.validate();
    validate_metadata(meta);
    if (slots < 1) throw std::invalid_argument("run_simulation: slots must be >= 1");
    if (static_cast<int>(bandwidth.mbps.size()) < slots)
        throw std::invalid_argument("run_simulation: bandwidth trace shorter than the run");
    if (static_cast<int>(head.poses.size()) < slots)
        throw std::invalid_argument("run_simulation: head trace shorter than the run");

    RunReport report;
    report.algo = algo;
    report.slots = slots;
    report.seed = seed;
    report.config = config;
    report.chunk_duration_s = meta.chunk_duration_s;
    report.rows = meta.grid.rows;
    report.cols = meta.grid.cols;
    report.levels = meta.level_count();
    report.chunks = meta.chunk_count();
    report.meta_recycled = slots + 1 > meta.chunk_count();

    const double T = meta.chunk_duration_s;
    SystemState state;
    state.qp = config.qp_init;
    state.qs = config.qs_init;
    state.gamma_mbit = config.gamma_init_mbit;

    for (int t = 1; t <= slots; ++t) {
        state.pose = head.poses[static_cast<size_t>(t - 1)];
        state.rot = head.rotation_at(static_cast<size_t>(t - 1), T);
        const double bt = bandwidth.mbps[static_cast<size_t>(t - 1)];
        const ChunkMeta& chunk_cur = meta.chunk_cyclic(t);
        const ChunkMeta& chunk_next = meta.chunk_cyclic(t + 1);

        Decision d;
        switch (algo) {
            case Algo::etscaa:
                d = etscaa_step(state, meta.grid, chunk_cur, chunk_next, T, bt, config);
                break;
            case Algo::greedy:
                d = baseline_greedy_step(state, meta.grid, chunk_cur, chunk_next, T, bt, config);
                break;
            case Algo::uniform:
                d = baseline_uniform_step(state, meta.grid, chunk_cur, chunk_next, T, bt, config);
                break;
            case Algo::probdash:
                d = baseline_probdash_step(state, meta.grid, chunk_cur, chunk_next, T, bt, config);
                break;
        }

        const auto pq = update_packet_queue(state.qp, T, config.cp_seconds, d.s_fov, d.y_dof,
                                            config.k_dof, d.assignment.total_bitrate_mbit, bt);
        const auto sq = update_sickness_queue(state.qs, state.rot.omega_y_deg_s,
                                              state.rot.omega_p_deg_s, d.expected_flow, d.s_fov,
                                              d.y_dof, config.k_dof, config.cs_capacity, config.omega);
        state.qp = pq.qp;
        state.qs = sq.qs;
        state.gamma_mbit = d.assignment.total_bitrate_mbit;

        SlotReport slot;
        slot.t = t;
        slot.bt_mbps = bt;
        slot.s_fov = d.s_fov;
        slot.y_dof = d.y_dof;
        for (int lvl : d.assignment.levels) ++slot.level_histogram[lvl];
        slot.total_bitrate_mbit = d.assignment.total_bitrate_mbit;
        slot.phi = d.phi;
        slot.qp = state.qp;
        slot.qs = state.qs;
        slot.weighted_ssim = weighted_ssim(d.assignment, chunk_next, d.probabilities);
        slot.total_cost = config.xi * slot.phi + config.rho * slot.qs;
        slot.stalled = pq.stalled;
        slot.overflowed = sq.overflowed;
        slot.degraded = d.degraded;
        report.slot_reports.push_back(std::move(slot));
    }

    for (const SlotReport& s : report.slot_reports) {
        report.total_cost_sum += s.total_cost;
        report.mean_phi += s.phi;
        report.mean_weighted_ssim += s.weighted_ssim;
        report.mean_bitrate_mbit += s.total_bitrate_mbit;
        report.stall_count += s.stalled ? 1 : 0;
        report.overflow_count += s.overflowed ? 1 : 0;
        report.degraded_count += s.degraded ? 1 : 0;
    }
    report.mean_total_cost = report.total_cost_sum / slots;
    report.mean_phi /= slots;
    report.mean_weighted_ssim /= slots;
    report.mean_bitrate_mbit /= slots;
    report.final_qp = state.qp;
    report.final_qs = state.qs;
    return report;
}

// ------------------------------ reporting ----------------------------------

namespace detail {
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string histogram_string(const std::map<int, int>& hist) {
    std::string out;
    for (const auto& [level, count] : hist) {
        if (!out.empty()) out += ';';
        out += std::to_string(level) + ":" + std::to_string(count);
    }
    return out;
}
}  // namespace detail

inline void write_slots_csv(const RunReport& report, std::ostream& out) {
    out << "t,bt_mbps,s_fov,y_dof,levels,total_bitrate_mbit,phi,qp,qs,weighted_ssim,total_cost,"
           "stalled,overflowed,degraded\n";
    for (const SlotReport& s : report.slot_reports) {
        out << s.t << ',' << detail::fmt_double(s.bt_mbps) << ',' << detail::fmt_double(s.s_fov) << ','
            << s.y_dof << ',' << detail::histogram_string(s.level_histogram) << ','
            << detail::fmt_double(s.total_bitrate_mbit) << ',' << detail::fmt_double(s.phi) << ','
            << detail::fmt_double(s.qp) << ',' << detail::fmt_double(s.qs) << ','
            << detail::fmt_double(s.weighted_ssim) << ',' << detail::fmt_double(s.total_cost) << ','
            << (s.stalled ? 1 : 0) << ',' << (s.overflowed ? 1 : 0) << ',' << (s.degraded ? 1 : 0)
            << '\n';
    }
}

inline nlohmann::ordered_json config_to_json(const Config& c) {
    return nlohmann::ordered_json{{"cp_seconds", c.cp_seconds},
                                  {"cs_capacity", c.cs_capacity},
                                  {"lambda_target", c.lambda_target},
                                  {"omega", c.omega},
                                  {"k_dof", c.k_dof},
                                  {"xi", c.xi},
                                  {"rho", c.rho},
                                  {"epsilon", c.epsilon},
                                  {"alpha", c.alpha},
                                  {"nsl_capacity", c.nsl_capacity},
                                  {"sfov_ladder", c.sfov_ladder},
                                  {"sigma_y_deg", c.sigma_y_deg},
                                  {"sigma_p_deg", c.sigma_p_deg},
                                  {"gamma_init_mbit", c.gamma_init_mbit},
                                  {"bw_unit_mbit", c.bw_unit_mbit},
                                  {"viewport_w_deg", c.viewport_w_deg},
                                  {"viewport_h_deg", c.viewport_h_deg},
                                  {"qp_init", c.qp_init},
                                  {"qs_init", c.qs_init}};
}

inline Config config_from_json(const nlohmann::json& j) {
    Config c;
    c.cp_seconds = j.at("cp_seconds").get<double>();
    c.cs_capacity = j.at("cs_capacity").get<double>();
    c.lambda_target = j.at("lambda_target").get<double>();
    c.omega = j.at("omega").get<double>();
    c.k_dof = j.at("k_dof").get<double>();
    c.xi = j.at("xi").get<double>();
    c.rho = j.at("rho").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.alpha = j.at("alpha").get<int>();
    c.nsl_capacity = j.at("nsl_capacity").get<int>();
    c.sfov_ladder = j.at("sfov_ladder").get<std::vector<double>>();
    c.sigma_y_deg = j.at("sigma_y_deg").get<double>();
    c.sigma_p_deg = j.at("sigma_p_deg").get<double>();
    c.gamma_init_mbit = j.at("gamma_init_mbit").get<double>();
    c.bw_unit_mbit = j.at("bw_unit_mbit").get<double>();
    c.viewport_w_deg = j.at("viewport_w_deg").get<double>();
    c.viewport_h_deg = j.at("viewport_h_deg").get<double>();
    c.qp_init = j.at("qp_init").get<double>();
    c.qs_init = j.at("qs_init").get<double>();
    return c;
}

inline nlohmann::ordered_json summary_to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["algo"] = algo_name(r.algo);
    j["slots"] = r.slots;
    j["seed"] = r.seed;
    j["video"] = {{"chunk_duration_s", r.chunk_duration_s}, {"rows", r.rows},     {"cols", r.cols},
                  {"levels", r.levels},                     {"chunks", r.chunks},
                  {"recycled", r.meta_recycled}};
    j["config"] = config_to_json(r.config);
    j["aggregates"] = {{"total_cost_sum", r.total_cost_sum},
                       {"mean_total_cost", r.mean_total_cost},
                       {"mean_phi", r.mean_phi},
                       {"mean_weighted_ssim", r.mean_weighted_ssim},
                       {"mean_bitrate_mbit", r.mean_bitrate_mbit},
                       {"final_qp", r.final_qp},
                       {"final_qs", r.final_qs},
                       {"stall_count", r.stall_count},
                       {"overflow_count", r.overflow_count},
                       {"degraded_count", r.degraded_count}};
    return j;
}

}  // namespace tscc
