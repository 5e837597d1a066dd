#include "co4/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "co4/version.hpp"

namespace co4 {

namespace {

using nlohmann::json;

std::string joined(const std::string& scope, const std::string& key) {
    return scope.empty() ? key : scope + "." + key;
}

const json& require_key(const json& obj, const std::string& scope,
                        const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError("config: missing key \"" + joined(scope, key) + "\"");
    }
    return *it;
}

void reject_unknown(const json& obj, const std::string& scope,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ConfigError("config: unknown key \"" +
                              joined(scope, it.key()) + "\"");
        }
    }
}

double number_at(const json& obj, const std::string& scope, const char* key) {
    const json& v = require_key(obj, scope, key);
    if (!v.is_number()) {
        throw ConfigError("config: \"" + joined(scope, key) +
                          "\" must be a number");
    }
    return v.get<double>();
}

int int_at(const json& obj, const std::string& scope, const char* key) {
    const json& v = require_key(obj, scope, key);
    if (!v.is_number_integer()) {
        throw ConfigError("config: \"" + joined(scope, key) +
                          "\" must be an integer");
    }
    return v.get<int>();
}

[[noreturn]] void out_of_range(const std::string& scope, const char* key,
                               const char* what) {
    throw ConfigError("config: \"" + joined(scope, key) + "\" " + what);
}

std::vector<std::pair<int, int>> parse_grid(const json& grid) {
    reject_unknown(grid, "grid", {"s_c", "gamma_targets", "s_r_values"});
    const int s_c = int_at(grid, "grid", "s_c");
    if (s_c < 1) out_of_range("grid", "s_c", "must be >= 1");

    const bool has_gamma = grid.contains("gamma_targets");
    const bool has_sr = grid.contains("s_r_values");
    if (has_gamma == has_sr) {
        throw ConfigError("config: \"grid\" needs exactly one of "
                          "\"gamma_targets\" or \"s_r_values\"");
    }

    std::vector<std::pair<int, int>> cells;
    if (has_gamma) {
        const json& targets = grid["gamma_targets"];
        if (!targets.is_array() || targets.empty()) {
            out_of_range("grid", "gamma_targets", "must be a non-empty array");
        }
        for (const json& g : targets) {
            if (!g.is_number() || !(g.get<double>() > 0.0)) {
                out_of_range("grid", "gamma_targets", "entries must be > 0");
            }
            const int s_r =
                static_cast<int>(std::llround(s_c / g.get<double>()));
            if (s_r < 1) {
                out_of_range("grid", "gamma_targets",
                             "implies s_r < 1 for the given s_c");
            }
            cells.emplace_back(s_r, s_c);
        }
    } else {
        const json& values = grid["s_r_values"];
        if (!values.is_array() || values.empty()) {
            out_of_range("grid", "s_r_values", "must be a non-empty array");
        }
        for (const json& v : values) {
            if (!v.is_number_integer() || v.get<int>() < 1) {
                out_of_range("grid", "s_r_values", "entries must be >= 1");
            }
            cells.emplace_back(v.get<int>(), s_c);
        }
    }
    return cells;
}

json semantic_json(const ExperimentConfig& cfg) {
    json j;
    json grid = json::array();
    for (const auto& [s_r, s_c] : cfg.grid) grid.push_back({s_r, s_c});
    j["grid"] = grid;
    j["seeds"] = cfg.seeds;
    j["stream"] = {{"rho", cfg.stream.rho},
                   {"obs_noise", cfg.stream.obs_noise},
                   {"distractor_scale", cfg.stream.distractor_scale}};
    j["track"] = {{"horizon", cfg.track.horizon},
                  {"half_width", cfg.track.half_width},
                  {"amplitude", cfg.track.amplitude},
                  {"period_steps", cfg.track.period_steps}};
    j["agent"] = {{"controller_gain", cfg.agent.controller_gain},
                  {"belief_gain", cfg.agent.belief_gain},
                  {"pi_min", cfg.agent.pi_min},
                  {"retain_threshold", cfg.agent.retain_threshold},
                  {"regime", to_string(cfg.agent.regime)},
                  {"interaction_scale", cfg.agent.interaction_scale},
                  {"readout_bias", cfg.agent.readout_bias},
                  {"salience_gain", cfg.agent.salience_gain},
                  {"feedback_lambda", cfg.agent.feedback_lambda}};
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("output directory not writable: " +
                                 dir.string() + " (" + ec.message() + ")");
    }
    const std::filesystem::path probe = dir / ".write_probe";
    std::ofstream out(probe);
    if (!out) {
        throw std::runtime_error("output directory not writable: " +
                                 dir.string());
    }
    out.close();
    std::filesystem::remove(probe, ec);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    out << text;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: root must be an object");
    reject_unknown(root, "",
                   {"grid", "seeds", "stream", "track", "agent", "out_dir"});

    ExperimentConfig cfg;
    cfg.grid = parse_grid(require_key(root, "", "grid"));

    const json& seeds = require_key(root, "", "seeds");
    if (!seeds.is_array() || seeds.empty()) {
        throw ConfigError("config: \"seeds\" must be a non-empty array");
    }
    for (const json& s : seeds) {
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
            throw ConfigError("config: \"seeds\" entries must be integers >= 0");
        }
        cfg.seeds.push_back(s.get<std::uint64_t>());
    }

    const json& stream = require_key(root, "", "stream");
    reject_unknown(stream, "stream", {"rho", "obs_noise", "distractor_scale"});
    cfg.stream.rho = number_at(stream, "stream", "rho");
    if (!(cfg.stream.rho > 0.0 && cfg.stream.rho <= 1.0)) {
        out_of_range("stream", "rho", "must lie in (0,1]");
    }
    cfg.stream.obs_noise = number_at(stream, "stream", "obs_noise");
    if (!(cfg.stream.obs_noise >= 0.0)) {
        out_of_range("stream", "obs_noise", "must be >= 0");
    }
    cfg.stream.distractor_scale =
        number_at(stream, "stream", "distractor_scale");
    if (!(cfg.stream.distractor_scale >= 0.0)) {
        out_of_range("stream", "distractor_scale", "must be >= 0");
    }
    for (const auto& [s_r, s_c] : cfg.grid) {
        (void)s_c;
        if (cfg.stream.rho * s_r < 1.0) {
            out_of_range("stream", "rho",
                         "gives an expected relevant count below 1 for the "
                         "smallest grid s_r");
        }
    }

    const json& track = require_key(root, "", "track");
    reject_unknown(track, "track",
                   {"horizon", "half_width", "amplitude", "period_steps"});
    cfg.track.horizon = int_at(track, "track", "horizon");
    if (cfg.track.horizon < 0) out_of_range("track", "horizon", "must be >= 0");
    cfg.track.half_width = number_at(track, "track", "half_width");
    if (!(cfg.track.half_width > 0.0)) {
        out_of_range("track", "half_width", "must be > 0");
    }
    cfg.track.amplitude = number_at(track, "track", "amplitude");
    if (!(cfg.track.amplitude >= 0.0)) {
        out_of_range("track", "amplitude", "must be >= 0");
    }
    cfg.track.period_steps = number_at(track, "track", "period_steps");
    if (!(cfg.track.period_steps > 0.0)) {
        out_of_range("track", "period_steps", "must be > 0");
    }

    const json& agent = require_key(root, "", "agent");
    reject_unknown(agent, "agent",
                   {"controller_gain", "belief_gain", "pi_min",
                    "retain_threshold", "regime", "interaction_scale",
                    "readout_bias", "salience_gain", "feedback_lambda"});
    cfg.agent.controller_gain = number_at(agent, "agent", "controller_gain");
    cfg.agent.belief_gain = number_at(agent, "agent", "belief_gain");
    cfg.agent.pi_min = number_at(agent, "agent", "pi_min");
    cfg.agent.retain_threshold = number_at(agent, "agent", "retain_threshold");
    const json& regime = require_key(agent, "agent", "regime");
    if (!regime.is_string()) {
        out_of_range("agent", "regime", "must be a string");
    }
    try {
        cfg.agent.regime =
            mental_state_from_string(regime.get<std::string>());
    } catch (const DomainError&) {
        out_of_range("agent", "regime",
                     "must be one of sw_sleep, wakefulness, rem_sleep, "
                     "awake_thought");
    }
    cfg.agent.interaction_scale =
        number_at(agent, "agent", "interaction_scale");
    cfg.agent.readout_bias = number_at(agent, "agent", "readout_bias");
    cfg.agent.salience_gain = number_at(agent, "agent", "salience_gain");
    cfg.agent.feedback_lambda = number_at(agent, "agent", "feedback_lambda");
    cfg.agent.s_c = cfg.grid.front().second;
    try {
        validate_agent(cfg.agent);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (root.contains("out_dir")) {
        const json& od = root["out_dir"];
        if (!od.is_string()) out_of_range("", "out_dir", "must be a string");
        cfg.out_dir = od.get<std::string>();
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string canonical = semantic_json(cfg).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string trajectory_filename(AgentVariant variant, int s_r, int s_c,
                                std::uint64_t seed) {
    std::ostringstream name;
    name << "traj_" << to_string(variant) << "_sr" << s_r << "_sc" << s_c
         << "_seed" << seed << ".csv";
    return name.str();
}

std::string trajectory_csv(const EpisodeResult& episode,
                           const TrackEnv& env) {
    std::string out = "step,position,centerline,attended_count,effective_s_r\n";
    for (std::size_t t = 0; t < episode.trajectory.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(episode.trajectory[t]);
        out += ',';
        out += format_double(env.centerline[t]);
        out += ',';
        out += std::to_string(episode.attended_counts[t]);
        out += ',';
        out += format_double(episode.effective_per_step[t]);
        out += '\n';
    }
    return out;
}

RunReport run_grid(const ExperimentConfig& cfg, int parallel) {
    if (cfg.grid.empty()) throw ConfigError("config: empty grid");
    if (cfg.seeds.empty()) throw ConfigError("config: empty seed list");

    const bool write_outputs = !cfg.out_dir.empty();
    const std::filesystem::path out_dir(cfg.out_dir);
    if (write_outputs) ensure_writable_dir(out_dir);

    const TrackEnv env = make_track(cfg.track);

    struct Job {
        std::size_t cell;
        std::size_t seed_idx;
        AgentVariant variant;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            jobs.push_back({c, s, AgentVariant::Baseline});
            jobs.push_back({c, s, AgentVariant::Co4});
        }
    }

    std::vector<EpisodeResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                const Job& job = jobs[j];
                StreamConfig stream = cfg.stream;
                stream.s_r = cfg.grid[job.cell].first;
                AgentConfig agent = cfg.agent;
                agent.s_c = cfg.grid[job.cell].second;
                agent.variant = job.variant;
                results[j] =
                    run_episode(env, agent, stream, cfg.seeds[job.seed_idx]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_threads =
        std::max(1, std::min<int>(parallel, static_cast<int>(jobs.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    RunReport report;
    report.version = kVersion;
    report.config_hash = config_hash(cfg);
    report.timestamp = utc_timestamp();
    report.seeds = cfg.seeds;

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        report.episodes.push_back({job.variant, cfg.grid[job.cell].first,
                                   cfg.grid[job.cell].second,
                                   results[j].metrics, results[j].gate});
    }

    for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
        CellReport cell;
        cell.s_r = cfg.grid[c].first;
        cell.s_c = cfg.grid[c].second;
        cell.gamma = overload_ratio(cell.s_c, cell.s_r).gamma;
        cell.seed_count = static_cast<int>(cfg.seeds.size());

        std::vector<double> base_drift, co4_drift;
        double base_off = 0.0, co4_off = 0.0, co4_eff = 0.0;
        double co4_recall = 0.0, co4_retention = 0.0;
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            const std::size_t base_idx = (c * cfg.seeds.size() + s) * 2;
            const EpisodeResult& base = results[base_idx];
            const EpisodeResult& co4 = results[base_idx + 1];
            base_drift.push_back(base.metrics.rms_drift);
            co4_drift.push_back(co4.metrics.rms_drift);
            base_off += base.metrics.off_track_steps;
            co4_off += co4.metrics.off_track_steps;
            co4_eff += co4.metrics.effective_s_r;
            co4_recall += co4.gate.relevant_recall;
            co4_retention += co4.gate.distractor_retention;
            if (co4.metrics.rms_drift < base.metrics.rms_drift) {
                ++cell.co4_wins;
            }
        }
        const double n = static_cast<double>(cfg.seeds.size());
        cell.baseline_mean_drift = mean_of(base_drift);
        cell.baseline_stddev_drift = sample_stddev(base_drift);
        cell.co4_mean_drift = mean_of(co4_drift);
        cell.co4_stddev_drift = sample_stddev(co4_drift);
        cell.baseline_mean_off_track = base_off / n;
        cell.co4_mean_off_track = co4_off / n;
        cell.co4_mean_effective_s_r = co4_eff / n;
        cell.co4_mean_recall = co4_recall / n;
        cell.co4_mean_retention = co4_retention / n;
        report.cells.push_back(cell);
    }

    if (write_outputs) {
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const Job& job = jobs[j];
            const std::string name =
                trajectory_filename(job.variant, cfg.grid[job.cell].first,
                                    cfg.grid[job.cell].second,
                                    cfg.seeds[job.seed_idx]);
            write_file(out_dir / name, trajectory_csv(results[j], env));
        }
        write_file(out_dir / "report.json", report_to_json(report));
    }
    return report;
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["provenance"] = {{"version", report.version},
                       {"config_hash", report.config_hash},
                       {"timestamp", report.timestamp},
                       {"seeds", report.seeds}};
    json episodes = json::array();
    for (const EpisodeRecord& e : report.episodes) {
        episodes.push_back(
            {{"variant", to_string(e.variant)},
             {"s_r", e.s_r},
             {"s_c", e.s_c},
             {"seed", e.metrics.seed},
             {"gamma", e.metrics.gamma},
             {"rms_drift", e.metrics.rms_drift},
             {"off_track_steps", e.metrics.off_track_steps},
             {"effective_s_r", e.metrics.effective_s_r},
             {"relevant_recall", e.gate.relevant_recall},
             {"distractor_retention", e.gate.distractor_retention},
             {"burn_in_steps", e.gate.burn_in_steps}});
    }
    j["episodes"] = episodes;
    json cells = json::array();
    for (const CellReport& c : report.cells) {
        cells.push_back({{"s_r", c.s_r},
                         {"s_c", c.s_c},
                         {"gamma", c.gamma},
                         {"seed_count", c.seed_count},
                         {"co4_wins", c.co4_wins},
                         {"baseline_mean_drift", c.baseline_mean_drift},
                         {"baseline_stddev_drift", c.baseline_stddev_drift},
                         {"co4_mean_drift", c.co4_mean_drift},
                         {"co4_stddev_drift", c.co4_stddev_drift},
                         {"baseline_mean_off_track", c.baseline_mean_off_track},
                         {"co4_mean_off_track", c.co4_mean_off_track},
                         {"co4_mean_effective_s_r", c.co4_mean_effective_s_r},
                         {"co4_mean_recall", c.co4_mean_recall},
                         {"co4_mean_retention", c.co4_mean_retention}});
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

} // namespace co4
