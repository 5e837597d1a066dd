#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "co4/overload_sim.hpp"

namespace co4 {

/// Full experiment description: a grid of (s_r, s_c) cells, the seed list,
/// and the shared stream/track/agent parameters.
struct ExperimentConfig {
    std::vector<std::pair<int, int>> grid; // (s_r, s_c)
    std::vector<std::uint64_t> seeds;
    StreamConfig stream;                   // s_r filled per cell
    TrackParams track;
    AgentConfig agent;                     // variant/s_c filled per run
    std::string out_dir;                   // empty means caller decides
};

/// Strict JSON loader: unknown keys, missing keys, and out-of-range values
/// are ConfigErrors naming the offending key. The grid is given as a fixed
/// s_c plus either gamma_targets (s_r = round(s_c / gamma)) or s_r_values.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// FNV-1a over the canonical serialized form of every semantic field
/// (out_dir excluded); changes iff the experiment itself changes.
std::string config_hash(const ExperimentConfig& cfg);

struct EpisodeRecord {
    AgentVariant variant;
    int s_r;
    int s_c;
    EpisodeMetrics metrics;
    GateStats gate;
};

struct CellReport {
    int s_r = 0;
    int s_c = 0;
    double gamma = 0.0;
    int seed_count = 0;
    int co4_wins = 0; // paired seeds where Co4 drift < Baseline drift
    double baseline_mean_drift = 0.0;
    double baseline_stddev_drift = 0.0;
    double co4_mean_drift = 0.0;
    double co4_stddev_drift = 0.0;
    double baseline_mean_off_track = 0.0;
    double co4_mean_off_track = 0.0;
    double co4_mean_effective_s_r = 0.0;
    double co4_mean_recall = 0.0;
    double co4_mean_retention = 0.0;
};

struct RunReport {
    std::string version;
    std::string config_hash;
    std::string timestamp; // isolated so determinism checks can ignore it
    std::vector<std::uint64_t> seeds;
    std::vector<EpisodeRecord> episodes;
    std::vector<CellReport> cells;
};

/// Runs paired Baseline/Co4 episodes for every cell and seed. Cells and
/// seeds may run on up to `parallel` worker threads; results are identical
/// to serial execution. When out_dir is non-empty, writes one trajectory
/// CSV per episode plus report.json.
RunReport run_grid(const ExperimentConfig& cfg, int parallel = 1);

/// Report serialization used for report.json (timestamp included).
std::string report_to_json(const RunReport& report);

/// Trajectory CSV with header step,position,centerline,attended_count,
/// effective_s_r and %.17g formatting, so equal runs are byte-identical.
std::string trajectory_csv(const EpisodeResult& episode, const TrackEnv& env);

std::string trajectory_filename(AgentVariant variant, int s_r, int s_c,
                                std::uint64_t seed);

} // namespace co4
