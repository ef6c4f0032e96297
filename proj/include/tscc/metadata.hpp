#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscc/grid.hpp"

namespace tscc {

// Per-(tile, level) encoding properties. Bitrate is megabits per chunk, so
// with 1-second chunks it reads directly as Mbps. Distortion is the
// reciprocal of SSIM, hence >= 1. Flow is a normalized optical-flow
// magnitude in [0, 1].
struct TileMeta {
    double bitrate_mbit = 0.0;
    double distortion = 1.0;
    double flow = 0.0;

    double ssim() const { return 1.0 / distortion; }
};

// One temporal chunk: N tiles x L levels, indexed [tile-1][level-1].
struct ChunkMeta {
    std::vector<std::vector<TileMeta>> tiles;

    int tile_count() const { return static_cast<int>(tiles.size()); }
    int level_count() const { return tiles.empty() ? 0 : static_cast<int>(tiles[0].size()); }
    const TileMeta& at(int tile, int level) const { return tiles[tile - 1][level - 1]; }
    TileMeta& at(int tile, int level) { return tiles[tile - 1][level - 1]; }
};

struct VideoMeta {
    TileGrid grid;
    double chunk_duration_s = 1.0;
    std::vector<ChunkMeta> chunks;

    int tile_count() const { return grid.tile_count(); }
    int level_count() const { return chunks.empty() ? 0 : chunks[0].level_count(); }
    int chunk_count() const { return static_cast<int>(chunks.size()); }

    // Chunks recycle for runs longer than the video.
    const ChunkMeta& chunk_cyclic(int index_1based) const {
        return chunks[static_cast<size_t>((index_1based - 1) % chunk_count())];
    }
};

inline void validate_metadata(const VideoMeta& meta) {
    meta.grid.validate();
    if (!(meta.chunk_duration_s > 0)) throw std::invalid_argument("metadata: chunk duration must be > 0");
    if (meta.chunks.empty()) throw std::invalid_argument("metadata: at least one chunk required");
    const int n = meta.grid.tile_count();
    const int levels = meta.chunks[0].level_count();
    if (levels < 1) throw std::invalid_argument("metadata: at least one quality level required");
    for (int c = 1; c <= meta.chunk_count(); ++c) {
        const ChunkMeta& chunk = meta.chunks[c - 1];
        if (chunk.tile_count() != n)
            throw std::invalid_argument("metadata: chunk " + std::to_string(c) + " has wrong tile count");
        for (int i = 1; i <= n; ++i) {
            if (static_cast<int>(chunk.tiles[i - 1].size()) != levels)
                throw std::invalid_argument("metadata: chunk " + std::to_string(c) + " tile " +
                                            std::to_string(i) + " has wrong level count");
            for (int j = 1; j <= levels; ++j) {
                const TileMeta& t = chunk.at(i, j);
                const std::string where = " at chunk " + std::to_string(c) + " tile " + std::to_string(i) +
                                          " level " + std::to_string(j);
                if (!(t.bitrate_mbit >= 0)) throw std::invalid_argument("metadata: negative bitrate" + where);
                if (!(t.distortion >= 1.0)) throw std::invalid_argument("metadata: distortion < 1" + where);
                if (!(t.flow >= 0.0 && t.flow <= 1.0))
                    throw std::invalid_argument("metadata: flow outside [0,1]" + where);
                if (j > 1) {
                    const TileMeta& prev = chunk.at(i, j - 1);
                    if (!(t.bitrate_mbit > prev.bitrate_mbit))
                        throw std::invalid_argument("metadata: bitrate not strictly increasing" + where);
                    if (!(t.distortion < prev.distortion))
                        throw std::invalid_argument("metadata: distortion not strictly decreasing" + where);
                    if (!(t.flow >= prev.flow))
                        throw std::invalid_argument("metadata: flow decreasing" + where);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON file format
//
// {
//   "header": {"chunk_duration_s": 1.0, "rows": 6, "cols": 8, "levels": 5},
//   "records": [
//     {"chunk": 1, "tile": 1, "level": 1,
//      "bitrate_mbit": 0.04, "distortion": 1.25, "flow": 0.1},
//     ...
//   ]
// }
//
// All indices are 1-based. Every (chunk, tile, level) triple must appear
// exactly once; the chunk count is inferred from the largest chunk index.
// ---------------------------------------------------------------------------

inline VideoMeta metadata_from_json(const nlohmann::json& doc) {
    if (!doc.contains("header") || !doc.contains("records"))
        throw std::invalid_argument("metadata: missing header or records");
    const auto& h = doc.at("header");
    VideoMeta meta;
    meta.chunk_duration_s = h.at("chunk_duration_s").get<double>();
    meta.grid.rows = h.at("rows").get<int>();
    meta.grid.cols = h.at("cols").get<int>();
    meta.grid.validate();
    const int levels = h.at("levels").get<int>();
    if (levels < 1) throw std::invalid_argument("metadata: levels must be >= 1");
    const int n = meta.grid.tile_count();

    int max_chunk = 0;
    for (const auto& r : doc.at("records")) max_chunk = std::max(max_chunk, r.at("chunk").get<int>());
    if (max_chunk < 1) throw std::invalid_argument("metadata: no records");

    meta.chunks.resize(max_chunk);
    std::vector<char> seen(static_cast<size_t>(max_chunk) * n * levels, 0);
    for (auto& chunk : meta.chunks)
        chunk.tiles.assign(n, std::vector<TileMeta>(static_cast<size_t>(levels)));

    for (const auto& r : doc.at("records")) {
        const int c = r.at("chunk").get<int>();
        const int i = r.at("tile").get<int>();
        const int j = r.at("level").get<int>();
        if (c < 1 || c > max_chunk || i < 1 || i > n || j < 1 || j > levels)
            throw std::invalid_argument("metadata: record indices out of range (chunk " + std::to_string(c) +
                                        " tile " + std::to_string(i) + " level " + std::to_string(j) + ")");
        size_t key = (static_cast<size_t>(c - 1) * n + (i - 1)) * levels + (j - 1);
        if (seen[key])
            throw std::invalid_argument("metadata: duplicate record (chunk " + std::to_string(c) + " tile " +
                                        std::to_string(i) + " level " + std::to_string(j) + ")");
        seen[key] = 1;
        TileMeta& t = meta.chunks[c - 1].at(i, j);
        t.bitrate_mbit = r.at("bitrate_mbit").get<double>();
        t.distortion = r.at("distortion").get<double>();
        t.flow = r.at("flow").get<double>();
    }
    for (size_t k = 0; k < seen.size(); ++k)
        if (!seen[k]) throw std::invalid_argument("metadata: missing records (incomplete tile/level table)");

    validate_metadata(meta);
    return meta;
}

inline VideoMeta load_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("metadata: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("metadata: parse failure in " + path + ": " + e.what());
    }
    return metadata_from_json(doc);
}

inline nlohmann::ordered_json metadata_to_json(const VideoMeta& meta) {
    nlohmann::ordered_json doc;
    doc["header"] = {{"chunk_duration_s", meta.chunk_duration_s},
                     {"rows", meta.grid.rows},
                     {"cols", meta.grid.cols},
                     {"levels", meta.level_count()}};
    auto& records = doc["records"];
    records = nlohmann::ordered_json::array();
    for (int c = 1; c <= meta.chunk_count(); ++c)
        for (int i = 1; i <= meta.tile_count(); ++i)
            for (int j = 1; j <= meta.level_count(); ++j) {
                const TileMeta& t = meta.chunks[c - 1].at(i, j);
                records.push_back({{"chunk", c},
                                   {"tile", i},
                                   {"level", j},
                                   {"bitrate_mbit", t.bitrate_mbit},
                                   {"distortion", t.distortion},
                                   {"flow", t.flow}});
            }
    return doc;
}

inline void save_metadata(const VideoMeta& meta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("metadata: cannot write " + path);
    out << metadata_to_json(meta).dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic metadata generator
//
// Stands in for a real CRF-ladder encoder pipeline. Calibration:
//   - bitrate ladder: each CRF-5 step roughly doubles the bitrate; the
//     per-tile step factor is drawn from [1.9, 2.1], giving a level-L/level-1
//     ratio of about 13-19x for L=5 (within the 8-32x range seen for
//     CRF 43 -> 23 H.264 encodes).
//   - top-level bitrate per tile is ~0.4-0.7 Mbit, i.e. ~20-35 Mbps for a
//     full 6x8 sphere, matching 4K 360 content.
//   - SSIM: level j has ssim = 1 - complexity * drop[j], with drop
//     {0.20, 0.10, 0.045, 0.012, 0.007} for the five CRF steps (interpolated
//     for other L) and per-tile complexity in [0.8, 1.2]. Low CRF levels are
//     heavily degraded; the top two levels are visually close.
//   - optical flow: flow scale peaks at the equator rows (moving content
//     concentrates there) and the top level carries a large flow jump (full
//     spatial detail). Chunk-level intensity ramps up across ten-chunk
//     scenes and resets at cuts, so upcoming chunks usually carry more flow
//     than the current one.
// ---------------------------------------------------------------------------

struct SynthSpec {
    int chunks = 1;
    int rows = 6;
    int cols = 8;
    int levels = 5;
    std::uint64_t seed = 0;
};

namespace detail {

// Cumulative SSIM drop per level, top level last. Anchor values are for the
// 5-step CRF ladder; other ladder sizes interpolate on the same curve.
inline std::vector<double> ssim_drop_curve(int levels) {
    static const double anchor[5] = {0.20, 0.10, 0.045, 0.012, 0.007};
    std::vector<double> out(static_cast<size_t>(levels));
    if (levels == 1) {
        out[0] = anchor[4];
        return out;
    }
    for (int j = 0; j < levels; ++j) {
        double x = 4.0 * j / (levels - 1);  // position on the 5-anchor curve
        int k = std::min(3, static_cast<int>(std::floor(x)));
        double f = x - k;
        out[static_cast<size_t>(j)] = anchor[k] * (1 - f) + anchor[k + 1] * f;
    }
    return out;
}

// Flow fraction of the per-tile flow scale at each level. Mid levels grow
// slowly; the top level carries the full-detail jump.
inline std::vector<double> flow_curve(int levels) {
    std::vector<double> out(static_cast<size_t>(levels));
    if (levels == 1) {
        out[0] = 0.5;
        return out;
    }
    for (int j = 0; j < levels; ++j) {
        double x = static_cast<double>(j) / (levels - 1);
        out[static_cast<size_t>(j)] = 0.10 + 0.06 * x;  // shallow ramp
    }
    out[static_cast<size_t>(levels - 1)] = 0.85;  // full-detail level
    return out;
}

}  // namespace detail

inline VideoMeta synthesize_metadata(const SynthSpec& spec) {
    if (spec.chunks < 1 || spec.rows < 1 || spec.cols < 1 || spec.levels < 1)
        throw std::invalid_argument("synthesize_metadata: dimensions must be positive");

    VideoMeta meta;
    meta.grid.rows = spec.rows;
    meta.grid.cols = spec.cols;
    meta.chunk_duration_s = 1.0;
    meta.chunks.resize(static_cast<size_t>(spec.chunks));

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const int n = meta.grid.tile_count();
    const auto drop = detail::ssim_drop_curve(spec.levels);
    const auto fcurve = detail::flow_curve(spec.levels);

    // Per-tile statics: base bitrate, ladder step, flow scale, complexity.
    std::vector<double> top_bitrate(static_cast<size_t>(n));
    std::vector<double> step_factor(static_cast<size_t>(n));
    std::vector<double> flow_scale(static_cast<size_t>(n));
    std::vector<double> complexity(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const int row = meta.grid.row_of(i);
        const double pitch_center =
            meta.grid.row_pitch_max(row) - meta.grid.tile_height_deg() / 2.0;
        const double equator = std::cos(pitch_center * M_PI / 180.0);  // 1 at equator, 0 at poles
        flow_scale[i - 1] = 0.15 + 0.75 * equator * equator + 0.10 * uni(rng);
        if (flow_scale[i - 1] > 1.0) flow_scale[i - 1] = 1.0;
        complexity[i - 1] = 0.8 + 0.4 * (0.5 * equator + 0.5 * uni(rng));
        top_bitrate[i - 1] = (0.40 + 0.30 * uni(rng)) * (0.7 + 0.3 * equator);
        step_factor[i - 1] = 1.9 + 0.2 * uni(rng);
    }

    for (int c = 1; c <= spec.chunks; ++c) {
        ChunkMeta& chunk = meta.chunks[c - 1];
        chunk.tiles.assign(n, std::vector<TileMeta>(static_cast<size_t>(spec.levels)));
        // Action builds over a ten-chunk scene, then cuts to the next one.
        const double scene = 0.50 + 0.50 * ((c - 1) % 10) / 9.0 + 0.05 * uni(rng);
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= spec.levels; ++j) {
                TileMeta& t = chunk.at(i, j);
                t.bitrate_mbit =
                    top_bitrate[i - 1] / std::pow(step_factor[i - 1], spec.levels - j);
                double ssim = 1.0 - complexity[i - 1] * drop[static_cast<size_t>(j - 1)];
                t.distortion = 1.0 / ssim;
                double f = flow_scale[i - 1] * scene * fcurve[static_cast<size_t>(j - 1)];
                t.flow = std::min(1.0, std::max(0.0, f));
            }
            // Flow must be non-decreasing in level even after clamping.
            for (int j = 2; j <= spec.levels; ++j)
                chunk.at(i, j).flow = std::max(chunk.at(i, j).flow, chunk.at(i, j - 1).flow);
        }
    }

    validate_metadata(meta);
    return meta;
}

}  // namespace tscc
