#include <doctest.h>

#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "tscc/simulation.hpp"

using namespace tscc;

namespace {

BandwidthTrace constant_bw(double mbps, int n) {
    BandwidthTrace t;
    t.mbps.assign(static_cast<size_t>(n), mbps);
    return t;
}

HeadTrace fixture_head(int n) {
    HeadTrace t;
    t.poses.assign(static_cast<size_t>(n), Pose::normalized(90.0, -30.0));
    return t;
}

}  // namespace

TEST_CASE("single-slot run reproduces the worked decision") {
    const VideoMeta meta = fixtures::example_meta();
    const Config cfg = fixtures::example_config();
    RunReport r = run_simulation(meta, constant_bw(8.0, 2), fixture_head(2), cfg, Algo::etscaa, 1);
    REQUIRE(r.slot_reports.size() == 1);
    const SlotReport& s = r.slot_reports[0];
    CHECK(s.s_fov == 0.7);
    CHECK(s.y_dof == 0);
    CHECK(s.level_histogram == std::map<int, int>{{4, 4}});
    CHECK(s.phi == doctest::Approx(1.25 / 0.7).epsilon(1e-12));
    CHECK(s.total_cost == doctest::Approx(cfg.xi * s.phi + cfg.rho * s.qs).epsilon(1e-12));
    // Committed ssim: all members at level 4, d = 1.25.
    CHECK(s.weighted_ssim == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("identical runs produce identical reports") {
    const VideoMeta meta = synthesize_metadata({6, 6, 8, 5, 3});
    Config cfg;
    BandwidthSynthSpec bw_spec{BandwidthModel::walk, 6.0, 2.0};
    HeadSynthSpec head_spec;
    head_spec.model = HeadModel::random_walk;
    auto bw = synthesize_bandwidth_trace(bw_spec, 77, 30);
    auto head = synthesize_head_trace(head_spec, 77, 30);

    RunReport a = run_simulation(meta, bw, head, cfg, Algo::etscaa, 30, 77);
    RunReport b = run_simulation(meta, bw, head, cfg, Algo::etscaa, 30, 77);

    std::ostringstream csv_a, csv_b;
    write_slots_csv(a, csv_a);
    write_slots_csv(b, csv_b);
    CHECK(csv_a.str() == csv_b.str());
    CHECK(summary_to_json(a).dump(2) == summary_to_json(b).dump(2));
}

TEST_CASE("sickness occupancy never falls while the stimulus exceeds the drain") {
    // Constant high flow and steady rotation with the greedy baseline.
    VideoMeta meta = fixtures::example_meta();
    Config cfg = fixtures::example_config();
    cfg.qs_init = 0.0;
    HeadTrace head;
    for (int t = 0; t < 21; ++t) head.poses.push_back(Pose::normalized(90.0 + 10.0 * t, -30.0));
    RunReport r = run_simulation(meta, constant_bw(8.0, 20), head, cfg, Algo::greedy, 20);
    double prev = 0.0;
    for (const SlotReport& s : r.slot_reports) {
        // rotation term ~ 10/141 plus flow well above Omega = 0.05
        CHECK(s.qs >= prev - 1e-15);
        prev = s.qs;
    }
    CHECK(r.final_qs > 0.0);
}

TEST_CASE("aggregates recompute from the slot reports") {
    const VideoMeta meta = synthesize_metadata({4, 6, 8, 5, 11});
    Config cfg;
    auto bw = synthesize_bandwidth_trace({BandwidthModel::walk, 7.0, 2.0}, 5, 25);
    HeadSynthSpec hs;
    hs.model = HeadModel::sinusoid;
    hs.yaw_amplitude_deg = 60;
    hs.period_s = 15;
    auto head = synthesize_head_trace(hs, 5, 25);
    RunReport r = run_simulation(meta, bw, head, cfg, Algo::etscaa, 25);

    double cost = 0, phi = 0, ssim = 0;
    for (const SlotReport& s : r.slot_reports) {
        cost += s.total_cost;
        phi += s.phi;
        ssim += s.weighted_ssim;
        CHECK(s.total_cost == doctest::Approx(cfg.xi * s.phi + cfg.rho * s.qs).epsilon(1e-12));
    }
    CHECK(r.total_cost_sum == doctest::Approx(cost).epsilon(1e-12));
    CHECK(r.mean_phi == doctest::Approx(phi / 25).epsilon(1e-12));
    CHECK(r.mean_weighted_ssim == doctest::Approx(ssim / 25).epsilon(1e-12));
    CHECK(r.final_qs == r.slot_reports.back().qs);
    CHECK(r.meta_recycled);  // 25 slots over 4 chunks
}

TEST_CASE("every committed decision respects the realized bandwidth bound") {
    const VideoMeta meta = synthesize_metadata({8, 6, 8, 5, 23});
    Config cfg;
    auto bw = synthesize_bandwidth_trace({BandwidthModel::walk, 5.0, 2.0}, 31, 40);
    auto head = synthesize_head_trace({HeadModel::random_walk}, 31, 40);
    RunReport r = run_simulation(meta, bw, head, cfg, Algo::etscaa, 40);
    double qp_prev = cfg.qp_init;
    for (const SlotReport& s : r.slot_reports) {
        if (!s.degraded) {
            const double raw = bandwidth_budget_raw(qp_prev, s.bt_mbps, 1.0, cfg.cp_seconds,
                                                    cfg.lambda_target, s.s_fov, s.y_dof, cfg.k_dof);
            CHECK(s.total_bitrate_mbit <= raw + cfg.bw_unit_mbit / 2 + 1e-9);
        }
        int fetched = 0;
        for (const auto& [lvl, count] : s.level_histogram) fetched += count;
        CHECK(fetched > 0);  // one level per fetched tile
        qp_prev = s.qp;
    }
}

TEST_CASE("trace underrun is rejected") {
    const VideoMeta meta = fixtures::example_meta();
    const Config cfg = fixtures::example_config();
    CHECK_THROWS_AS(run_simulation(meta, constant_bw(8.0, 5), fixture_head(20), cfg, Algo::etscaa, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_simulation(meta, constant_bw(8.0, 20), fixture_head(5), cfg, Algo::etscaa, 10),
                    std::invalid_argument);
}

TEST_CASE("config echo round-trips through json") {
    Config c = fixtures::example_config();
    Config back = config_from_json(config_to_json(c));
    CHECK(back.cp_seconds == c.cp_seconds);
    CHECK(back.cs_capacity == c.cs_capacity);
    CHECK(back.lambda_target == c.lambda_target);
    CHECK(back.omega == c.omega);
    CHECK(back.k_dof == c.k_dof);
    CHECK(back.xi == c.xi);
    CHECK(back.rho == c.rho);
    CHECK(back.epsilon == c.epsilon);
    CHECK(back.alpha == c.alpha);
    CHECK(back.nsl_capacity == c.nsl_capacity);
    CHECK(back.sfov_ladder == c.sfov_ladder);
    CHECK(back.sigma_y_deg == c.sigma_y_deg);
    CHECK(back.bw_unit_mbit == c.bw_unit_mbit);
    CHECK(back.qp_init == c.qp_init);
    CHECK(back.qs_init == c.qs_init);
}

TEST_CASE("replaying the echoed configuration reproduces the run") {
    const VideoMeta meta = synthesize_metadata({3, 6, 8, 5, 19});
    Config cfg;
    cfg.rho = 1.5;
    cfg.epsilon = 0.03;
    auto bw = synthesize_bandwidth_trace({BandwidthModel::walk, 5.0, 1.0}, 21, 15);
    auto head = synthesize_head_trace({HeadModel::random_walk}, 21, 15);

    RunReport first = run_simulation(meta, bw, head, cfg, Algo::etscaa, 15, 21);
    Config replay_cfg = config_from_json(config_to_json(first.config));
    RunReport replay = run_simulation(meta, bw, head, replay_cfg, Algo::etscaa, 15, 21);
    CHECK(summary_to_json(first).dump() == summary_to_json(replay).dump());
}

TEST_CASE("a still head watching flowless content lets the sickness queue drain") {
    VideoMeta meta = fixtures::example_meta();
    for (auto& chunk : meta.chunks)
        for (auto& tile : chunk.tiles)
            for (auto& level : tile) level.flow = 0.0;
    Config cfg = fixtures::example_config();
    cfg.qs_init = 0.01;
    HeadSynthSpec hs;  // static pose at the fixture center
    hs.yaw0_deg = 90;
    hs.pitch0_deg = -30;
    auto head = synthesize_head_trace(hs, 0, 21);
    RunReport r = run_simulation(meta, constant_bw(8.0, 20), head, cfg, Algo::etscaa, 20);
    double prev = cfg.qs_init;
    for (const SlotReport& s : r.slot_reports) {
        CHECK(s.qs < prev);
        prev = s.qs;
    }
    CHECK(r.final_qs == doctest::Approx(0.01 - 20 * 0.00005).epsilon(1e-9));
}

TEST_CASE("shared metadata supports concurrent runs") {
    const VideoMeta meta = synthesize_metadata({10, 6, 8, 5, 77});
    Config cfg;
    auto bw = synthesize_bandwidth_trace({BandwidthModel::walk, 6.0, 2.0}, 11, 30);
    auto head = synthesize_head_trace({HeadModel::random_walk}, 11, 31);

    const RunReport serial_e = run_simulation(meta, bw, head, cfg, Algo::etscaa, 30);
    const RunReport serial_g = run_simulation(meta, bw, head, cfg, Algo::greedy, 30);

    RunReport parallel_e, parallel_g;
    std::thread te([&] { parallel_e = run_simulation(meta, bw, head, cfg, Algo::etscaa, 30); });
    std::thread tg([&] { parallel_g = run_simulation(meta, bw, head, cfg, Algo::greedy, 30); });
    te.join();
    tg.join();

    CHECK(summary_to_json(parallel_e).dump() == summary_to_json(serial_e).dump());
    CHECK(summary_to_json(parallel_g).dump() == summary_to_json(serial_g).dump());
}

TEST_CASE("algorithm names parse both ways") {
    CHECK(parse_algo("etscaa") == Algo::etscaa);
    CHECK(parse_algo("greedy") == Algo::greedy);
    CHECK(parse_algo("uniform") == Algo::uniform);
    CHECK(parse_algo("probdash") == Algo::probdash);
    CHECK(std::string(algo_name(Algo::probdash)) == "probdash");
    CHECK_THROWS_AS(parse_algo("bola"), std::invalid_argument);
}
