// tscc-sim: trace-driven simulator for cybersickness-aware tile streaming.
//
//   tscc-sim gen-metadata --chunks 30 --rows 6 --cols 8 --levels 5 --seed 1 --out meta.json
//   tscc-sim simulate --metadata meta.json --bandwidth synthetic:walk:mean=6,amp=2 \
//       --head synthetic:walk --algo etscaa --slots 120 --seed 7 --out runs/demo
//   tscc-sim sweep --bandwidth-means 3..11 --algos etscaa,greedy --seeds 20 --out runs/sweep
//   tscc-sim verify
//
// Exit codes: 0 on success, 2 on validation errors.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tscc/tscc.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

std::map<std::string, std::string> parse_kv(const std::string& s) {
    std::map<std::string, std::string> out;
    if (s.empty()) return out;
    for (const std::string& item : split(s, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

// "<file>" or "synthetic:constant:8" / "synthetic:walk:mean=8,amp=2"
tscc::BandwidthTrace resolve_bandwidth(const std::string& spec, std::uint64_t seed, int length) {
    if (spec.rfind("synthetic:", 0) != 0) return tscc::load_bandwidth_trace(spec);
    const auto parts = split(spec, ':');
    if (parts.size() < 2) throw std::invalid_argument("bad bandwidth spec: " + spec);
    const std::string model = parts.size() > 1 ? parts[1] : "";
    const std::string args = parts.size() > 2 ? parts[2] : "";
    tscc::BandwidthSynthSpec s;
    if (model == "constant") {
        s.model = tscc::BandwidthModel::constant;
        if (!args.empty() && args.find('=') == std::string::npos)
            s.mean_mbps = std::stod(args);
        else
            s.mean_mbps = kv_num(parse_kv(args), "mean", s.mean_mbps);
    } else if (model == "walk") {
        s.model = tscc::BandwidthModel::walk;
        auto kv = parse_kv(args);
        s.mean_mbps = kv_num(kv, "mean", s.mean_mbps);
        s.amplitude_mbps = kv_num(kv, "amp", s.amplitude_mbps);
    } else {
        throw std::invalid_argument("unknown bandwidth model: " + model);
    }
    return tscc::synthesize_bandwidth_trace(s, seed, length);
}

// "<file>" or "synthetic:static:yaw=90,pitch=-30" /
// "synthetic:sinusoid:amp=30,period=20,pitch-amp=10" / "synthetic:walk:max-speed=80"
tscc::HeadTrace resolve_head(const std::string& spec, std::uint64_t seed, int length) {
    if (spec.rfind("synthetic:", 0) != 0) return tscc::load_head_trace(spec);
    const auto parts = split(spec, ':');
    if (parts.size() < 2) throw std::invalid_argument("bad head spec: " + spec);
    const std::string model = parts[1];
    auto kv = parse_kv(parts.size() > 2 ? parts[2] : "");
    tscc::HeadSynthSpec s;
    s.yaw0_deg = kv_num(kv, "yaw0", kv_num(kv, "yaw", 0.0));
    s.pitch0_deg = kv_num(kv, "pitch0", kv_num(kv, "pitch", 0.0));
    s.max_speed_deg_s = kv_num(kv, "max-speed", 100.0);
    if (model == "static") {
        s.model = tscc::HeadModel::static_pose;
    } else if (model == "sinusoid") {
        s.model = tscc::HeadModel::sinusoid;
        s.yaw_amplitude_deg = kv_num(kv, "amp", 30.0);
        s.pitch_amplitude_deg = kv_num(kv, "pitch-amp", 10.0);
        s.period_s = kv_num(kv, "period", 20.0);
    } else if (model == "walk") {
        s.model = tscc::HeadModel::random_walk;
    } else {
        throw std::invalid_argument("unknown head model: " + model);
    }
    return tscc::synthesize_head_trace(s, seed, length);
}

// "3..11" (inclusive, step 1) or "3,5,7".
std::vector<double> parse_means(const std::string& s) {
    std::vector<double> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const double lo = std::stod(s.substr(0, dots));
        const double hi = std::stod(s.substr(dots + 2));
        for (double v = lo; v <= hi + 1e-9; v += 1.0) out.push_back(v);
    } else {
        for (const std::string& part : split(s, ',')) out.push_back(std::stod(part));
    }
    if (out.empty()) throw std::invalid_argument("no bandwidth means in: " + s);
    return out;
}

struct ConfigFlags {
    double xi = -1, rho = -1, epsilon = -1, cp = -1, cs = -1, omega = -1, lambda = -1, kdof = -1;
    int alpha = -1, nsl = -1;
    std::string ladder;
    double sigma_y = -1, sigma_p = -1, viewport_w = -1, viewport_h = -1, bw_unit = -1;
    double qp_init = -1, qs_init = -1, gamma_init = -1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--xi", xi, "weight of video quality loss");
        cmd->add_option("--rho", rho, "weight of sickness occupancy");
        cmd->add_option("--epsilon", epsilon, "tile trimming probability threshold");
        cmd->add_option("--alpha", alpha, "local search revisit limit");
        cmd->add_option("--nsl-size", nsl, "neighbor search list capacity");
        cmd->add_option("--cp", cp, "packet queue capacity (seconds)");
        cmd->add_option("--cs", cs, "sickness queue capacity");
        cmd->add_option("--omega", omega, "sickness drain per slot");
        cmd->add_option("--lambda", lambda, "target packet queue occupancy");
        cmd->add_option("--kdof", kdof, "DoF blur bandwidth/stimulus cut");
        cmd->add_option("--sfov-ladder", ladder, "comma list of FoV ratios, descending");
        cmd->add_option("--sigma-y", sigma_y, "yaw prediction spread (deg)");
        cmd->add_option("--sigma-p", sigma_p, "pitch prediction spread (deg)");
        cmd->add_option("--viewport-w", viewport_w, "viewport width (deg)");
        cmd->add_option("--viewport-h", viewport_h, "viewport height (deg)");
        cmd->add_option("--bw-unit", bw_unit, "budget quantization unit (Mbit)");
        cmd->add_option("--qp-init", qp_init, "initial packet queue occupancy");
        cmd->add_option("--qs-init", qs_init, "initial sickness queue occupancy");
        cmd->add_option("--gamma-init", gamma_init, "assumed first-slot viewport bandwidth (Mbit)");
    }

    tscc::Config resolve() const {
        tscc::Config c;
        if (xi >= 0) c.xi = xi;
        if (rho >= 0) c.rho = rho;
        if (epsilon >= 0) c.epsilon = epsilon;
        if (alpha >= 0) c.alpha = alpha;
        if (nsl >= 0) c.nsl_capacity = nsl;
        if (cp >= 0) c.cp_seconds = cp;
        if (cs >= 0) c.cs_capacity = cs;
        if (omega >= 0) c.omega = omega;
        if (lambda >= 0) c.lambda_target = lambda;
        if (kdof >= 0) c.k_dof = kdof;
        if (!ladder.empty()) {
            c.sfov_ladder.clear();
            for (const std::string& part : split(ladder, ',')) c.sfov_ladder.push_back(std::stod(part));
        }
        if (sigma_y >= 0) c.sigma_y_deg = sigma_y;
        if (sigma_p >= 0) c.sigma_p_deg = sigma_p;
        if (viewport_w >= 0) c.viewport_w_deg = viewport_w;
        if (viewport_h >= 0) c.viewport_h_deg = viewport_h;
        if (bw_unit >= 0) c.bw_unit_mbit = bw_unit;
        if (qp_init >= 0) c.qp_init = qp_init;
        if (qs_init >= 0) c.qs_init = qs_init;
        if (gamma_init >= 0) c.gamma_init_mbit = gamma_init;
        c.validate();
        return c;
    }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << content;
}

int cmd_gen_metadata(const tscc::SynthSpec& spec, double chunk_duration, const std::string& out_path) {
    tscc::VideoMeta meta = tscc::synthesize_metadata(spec);
    meta.chunk_duration_s = chunk_duration;
    tscc::validate_metadata(meta);
    tscc::save_metadata(meta, out_path);
    std::cout << "wrote " << out_path << " (" << meta.chunk_count() << " chunks, "
              << meta.tile_count() << " tiles, " << meta.level_count() << " levels)\n";
    return 0;
}

int cmd_simulate(const std::string& metadata_path, const std::string& bandwidth_spec,
                 const std::string& head_spec, const std::string& algo_name_str, int slots,
                 std::uint64_t seed, double scale_mean, const ConfigFlags& flags,
                 const std::string& out_dir) {
    const tscc::Config config = flags.resolve();
    const tscc::Algo algo = tscc::parse_algo(algo_name_str);
    tscc::VideoMeta meta = tscc::load_metadata(metadata_path);

    tscc::BandwidthTrace bw = resolve_bandwidth(bandwidth_spec, seed, slots);
    if (scale_mean > 0) bw.scale_to_mean(scale_mean);
    tscc::HeadTrace head = resolve_head(head_spec, seed + 1, slots + 1);

    tscc::RunReport report = tscc::run_simulation(meta, bw, head, config, algo, slots, seed);

    ordered_json summary = tscc::summary_to_json(report);
    summary["inputs"] = {{"metadata", metadata_path},
                         {"bandwidth", bandwidth_spec},
                         {"head", head_spec},
                         {"scale_bandwidth_mean", scale_mean},
                         {"bandwidth_mean_mbps", bw.mean()}};

    fs::create_directories(out_dir);
    std::ostringstream csv;
    tscc::write_slots_csv(report, csv);
    write_file(fs::path(out_dir) / "slots.csv", csv.str());
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

    std::cout << algo_name_str << ": mean cost " << report.mean_total_cost << ", mean ssim "
              << report.mean_weighted_ssim << ", final qs " << report.final_qs << ", stalls "
              << report.stall_count << "\n";
    return 0;
}

int cmd_sweep(const std::string& metadata_path, const std::string& means_spec,
              const std::string& algos_spec, const std::string& head_spec, int seeds, int slots,
              const ConfigFlags& flags, const std::string& out_dir) {
    const tscc::Config config = flags.resolve();
    const std::vector<double> means = parse_means(means_spec);
    std::vector<tscc::Algo> algos;
    for (const std::string& name : split(algos_spec, ',')) algos.push_back(tscc::parse_algo(name));
    if (seeds < 1) throw std::invalid_argument("sweep: --seeds must be >= 1");

    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "algo,bandwidth_mean_mbps,seed,mean_total_cost,mean_phi,mean_weighted_ssim,final_qs,"
           "stall_count,overflow_count,degraded_count\n";

    struct Acc {
        double cost = 0, phi = 0, ssim = 0, qs = 0;
        int n = 0;
    };
    std::map<std::pair<std::string, double>, Acc> by_cell;

    for (int seed = 1; seed <= seeds; ++seed) {
        tscc::VideoMeta meta =
            metadata_path.empty()
                ? tscc::synthesize_metadata({40, 6, 8, 5, static_cast<std::uint64_t>(seed) * 1000})
                : tscc::load_metadata(metadata_path);
        for (double mean : means) {
            tscc::BandwidthTrace bw = tscc::synthesize_bandwidth_trace(
                {tscc::BandwidthModel::walk, mean, mean / 4.0}, static_cast<std::uint64_t>(seed), slots);
            tscc::HeadTrace head =
                resolve_head(head_spec, static_cast<std::uint64_t>(seed) + 500, slots + 1);
            for (tscc::Algo algo : algos) {
                tscc::RunReport r = tscc::run_simulation(meta, bw, head, config, algo, slots,
                                                         static_cast<std::uint64_t>(seed));
                csv << tscc::algo_name(algo) << ',' << mean << ',' << seed << ','
                    << r.mean_total_cost << ',' << r.mean_phi << ',' << r.mean_weighted_ssim << ','
                    << r.final_qs << ',' << r.stall_count << ',' << r.overflow_count << ','
                    << r.degraded_count << '\n';
                Acc& acc = by_cell[{tscc::algo_name(algo), mean}];
                acc.cost += r.mean_total_cost;
                acc.phi += r.mean_phi;
                acc.ssim += r.mean_weighted_ssim;
                acc.qs += r.final_qs;
                ++acc.n;
            }
        }
    }
    write_file(fs::path(out_dir) / "sweep.csv", csv.str());

    ordered_json agg = ordered_json::array();
    for (const auto& [key, acc] : by_cell)
        agg.push_back({{"algo", key.first},
                       {"bandwidth_mean_mbps", key.second},
                       {"runs", acc.n},
                       {"mean_total_cost", acc.cost / acc.n},
                       {"mean_phi", acc.phi / acc.n},
                       {"mean_weighted_ssim", acc.ssim / acc.n},
                       {"mean_final_qs", acc.qs / acc.n}});
    write_file(fs::path(out_dir) / "sweep_summary.json", agg.dump(2) + "\n");
    std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << " ("
              << seeds * static_cast<int>(means.size()) * static_cast<int>(algos.size())
              << " runs)\n";
    return 0;
}

int cmd_verify(int instances, std::uint64_t seed) {
    int failures = 0;
    std::mt19937_64 rng(seed);

    // DP against full enumeration on random small instances.
    {
        int mismatches = 0;
        for (int rep = 0; rep < instances; ++rep) {
            const int n = 1 + static_cast<int>(rng() % 6);
            const int levels = 1 + static_cast<int>(rng() % 4);
            tscc::LevelTables t;
            std::vector<int> tiles;
            t.tau.resize(n);
            t.bitrate_units.resize(n);
            t.bitrate_mbit.resize(n);
            for (int k = 0; k < n; ++k) {
                tiles.push_back(k + 1);
                long long units = static_cast<long long>(rng() % 4);
                for (int j = 0; j < levels; ++j) {
                    t.tau[k].push_back(static_cast<double>(rng() % 4096) / 256.0);
                    t.bitrate_units[k].push_back(units);
                    t.bitrate_mbit[k].push_back(static_cast<double>(units) * 0.1);
                    units += 1 + static_cast<long long>(rng() % 3);
                }
            }
            const long long budget = static_cast<long long>(rng() % 31);
            auto dp = tscc::assign_quality_dp(tiles, budget, t);
            auto oracle = tscc::exhaustive_assignment(tiles, budget, t);
            if (dp.feasible != oracle.feasible ||
                (dp.feasible && dp.assignment.levels != oracle.assignment.levels))
                ++mismatches;
        }
        std::cout << (mismatches == 0 ? "PASS" : "FAIL") << " dp-vs-enumeration: " << mismatches
                  << " mismatches over " << instances << " instances\n";
        failures += mismatches == 0 ? 0 : 1;
    }

    // Online objective against the per-slot offline optimum and the bound.
    {
        int violations = 0, dominance = 0, checked = 0;
        for (int rep = 0; rep < instances / 2; ++rep) {
            tscc::VideoMeta meta = tscc::synthesize_metadata({2, 3, 4, 3, rng()});
            tscc::Config cfg;
            cfg.sfov_ladder = {1.0, 0.85, 0.7};
            cfg.viewport_w_deg = 100;
            cfg.viewport_h_deg = 80;
            cfg.sigma_y_deg = 4;
            cfg.sigma_p_deg = 4;
            tscc::SystemState st;
            st.qp = 0.55 + static_cast<double>(rng() % 40) / 100.0;
            st.qs = static_cast<double>(rng() % 100) / 100.0;
            st.pose = tscc::Pose::normalized(static_cast<double>(rng() % 360),
                                             -20.0 + static_cast<double>(rng() % 40));
            st.rot = tscc::Rotation{static_cast<double>(rng() % 80) - 40.0,
                                    static_cast<double>(rng() % 30) - 15.0};
            const double bt = 2.0 + static_cast<double>(rng() % 80) / 10.0;
            tscc::Decision online =
                tscc::etscaa_step(st, meta.grid, meta.chunks[0], meta.chunks[1], 1.0, bt, cfg);
            if (online.degraded) continue;
            tscc::OracleStepResult offline =
                tscc::exhaustive_step(st, meta.grid, meta.chunks[0], meta.chunks[1], 1.0, bt, cfg);
            if (!offline.feasible) continue;
            ++checked;
            if (offline.objective > online.objective_value + 1e-12) ++dominance;
            if (online.objective_value / offline.objective >
                tscc::competitive_bound(meta, cfg) + 1e-12)
                ++violations;
        }
        std::cout << (dominance == 0 ? "PASS" : "FAIL") << " oracle-dominance: " << dominance
                  << " violations over " << checked << " slots\n";
        std::cout << (violations == 0 ? "PASS" : "FAIL") << " competitive-bound: " << violations
                  << " violations over " << checked << " slots\n";
        failures += (dominance == 0 ? 0 : 1) + (violations == 0 ? 0 : 1);
    }

    std::cout << (failures == 0 ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-driven simulator for cybersickness-aware tile-based 360 streaming"};
    app.require_subcommand(1);

    // gen-metadata
    auto* gen = app.add_subcommand("gen-metadata", "synthesize a video metadata file");
    tscc::SynthSpec synth;
    double chunk_duration = 1.0;
    std::string gen_out = "metadata.json";
    gen->add_option("--chunks", synth.chunks, "number of chunks")->default_val(30);
    gen->add_option("--rows", synth.rows, "tile rows")->default_val(6);
    gen->add_option("--cols", synth.cols, "tile columns")->default_val(8);
    gen->add_option("--levels", synth.levels, "quality levels")->default_val(5);
    gen->add_option("--seed", synth.seed, "generator seed")->default_val(1);
    gen->add_option("--chunk-duration", chunk_duration, "chunk duration in seconds")->default_val(1.0);
    gen->add_option("--out", gen_out, "output path")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one trace-driven simulation");
    std::string metadata_path, bandwidth_spec, head_spec, algo = "etscaa", out_dir = "run";
    int slots = 100;
    std::uint64_t seed = 1;
    double scale_mean = -1;
    ConfigFlags sim_flags;
    sim->add_option("--metadata", metadata_path, "metadata json file")->required();
    sim->add_option("--bandwidth", bandwidth_spec, "trace csv or synthetic:<model>:<params>")
        ->required();
    sim->add_option("--head", head_spec, "trace csv or synthetic:<model>:<params>")->required();
    sim->add_option("--algo", algo, "etscaa|greedy|uniform|probdash")->default_val("etscaa");
    sim->add_option("--slots", slots, "number of time slots")->default_val(100);
    sim->add_option("--seed", seed, "seed for synthetic traces")->default_val(1);
    sim->add_option("--scale-bandwidth-mean", scale_mean, "rescale the trace to this mean (Mbps)");
    sim->add_option("--out", out_dir, "output directory")->required();
    sim_flags.add_to(sim);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "bandwidth-mean x algorithm x seed grid");
    std::string sweep_metadata, means_spec = "3..11", algos_spec = "etscaa,greedy,uniform,probdash";
    std::string sweep_head = "synthetic:walk:max-speed=60";
    std::string sweep_out = "sweep";
    int sweep_seeds = 20, sweep_slots = 90;
    ConfigFlags sweep_flags;
    sweep->add_option("--metadata", sweep_metadata,
                      "metadata json file (synthesized per seed when omitted)");
    sweep->add_option("--bandwidth-means", means_spec, "range a..b or comma list (Mbps)");
    sweep->add_option("--algos", algos_spec, "comma list of algorithms");
    sweep->add_option("--head", sweep_head, "head trace csv or synthetic:<model>:<params>");
    sweep->add_option("--seeds", sweep_seeds, "number of seeds")->default_val(20);
    sweep->add_option("--slots", sweep_slots, "slots per run")->default_val(90);
    sweep->add_option("--out", sweep_out, "output directory")->required();
    sweep_flags.add_to(sweep);

    // verify
    auto* verify = app.add_subcommand("verify", "run the reference-solver cross-checks");
    int verify_instances = 1000;
    std::uint64_t verify_seed = 2024;
    verify->add_option("--instances", verify_instances, "random instances per check")
        ->default_val(1000);
    verify->add_option("--seed", verify_seed, "random seed")->default_val(2024);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_metadata(synth, chunk_duration, gen_out);
        if (sim->parsed())
            return cmd_simulate(metadata_path, bandwidth_spec, head_spec, algo, slots, seed,
                                scale_mean, sim_flags, out_dir);
        if (sweep->parsed())
            return cmd_sweep(sweep_metadata, means_spec, algos_spec, sweep_head, sweep_seeds,
                             sweep_slots, sweep_flags, sweep_out);
        if (verify->parsed()) return cmd_verify(verify_instances, verify_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
