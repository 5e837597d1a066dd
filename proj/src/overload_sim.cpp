#include "co4/overload_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace co4 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct DistractorChannel {
    double offset;
    double amplitude;
    double omega;
    double phase;
};

// Per-channel structured-noise parameters, a pure function of the stream
// seed and channel id so they stay fixed across the episode and never
// consume from the per-step draw sequence.
DistractorChannel distractor_channel(std::uint64_t stream_seed, int channel,
                                     double scale) {
    Rng ch(Rng::mix(stream_seed, 0x8F3A95D1C45B6E27ULL + channel));
    DistractorChannel out;
    const double sign = ch.uniform() < 0.5 ? -1.0 : 1.0;
    out.offset = sign * scale * (0.65 + 0.40 * ch.uniform());
    out.amplitude = scale * (0.35 + 0.20 * ch.uniform());
    out.omega = 0.005 + 0.045 * ch.uniform();
    out.phase = kTwoPi * ch.uniform();
    return out;
}

std::vector<int> top_indices_by(const std::vector<double>& score,
                                const std::vector<int>& candidates,
                                std::size_t budget) {
    std::vector<int> order(candidates);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return score[a] > score[b];
    });
    if (order.size() > budget) order.resize(budget);
    return order;
}

Mat payload_column(const std::vector<Signal>& signals,
                   const std::vector<int>& picked) {
    std::vector<double> vals;
    vals.reserve(picked.size());
    for (int idx : picked) vals.push_back(signals[idx].payload);
    return Mat(picked.size(), 1, std::move(vals));
}

Mat salience_query(const AgentConfig& cfg) {
    std::vector<double> q(kSignalDim, 0.0);
    q[4] = cfg.salience_gain;
    return Mat(1, kSignalDim, std::move(q));
}

StepOutcome baseline_step(const AgentState& state,
                          const std::vector<Signal>& signals,
                          const AgentConfig& cfg) {
    std::vector<double> salience(signals.size());
    std::vector<int> all(signals.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < signals.size(); ++i) {
        salience[i] = std::fabs(signals[i].payload);
    }
    StepOutcome out(state.belief);
    out.attended = top_indices_by(salience, all,
                                  static_cast<std::size_t>(cfg.s_c));
    out.retained_above_threshold = static_cast<int>(signals.size());
    out.effective_rate = static_cast<double>(signals.size()); // no gate

    std::vector<Vec> key_rows;
    key_rows.reserve(out.attended.size());
    for (int idx : out.attended) key_rows.push_back(signals[idx].features);
    const AttentionInputs in(salience_query(cfg), Mat::from_rows(key_rows),
                             payload_column(signals, out.attended));
    out.estimate = baseline_attention(in)(0, 0);

    // Eq.-3 style smoothing of the running estimate; not used for control.
    out.belief = update_belief_baseline(
        state.belief, Vec{out.estimate - state.belief.mu[0]}, Vec{1.0});
    out.action = cfg.controller_gain * (out.estimate - state.position);
    return out;
}

StepOutcome co4_step(const AgentState& state,
                     const std::vector<Signal>& signals,
                     const AgentConfig& cfg) {
    const double mu = state.belief.mu[0];
    const Vec context = assemble_context(
        ContextAssembly(belief_context(mu), Vec::zeros(kSignalDim),
                        cfg.feedback_lambda));

    std::vector<Vec> evidence;
    evidence.reserve(signals.size());
    for (const Signal& s : signals) evidence.push_back(s.features);

    const TransferConfig transfer = make_transfer_config(cfg);
    const RegimeParams regime = regime_preset(cfg.regime);
    const PrecisionMatrix pm =
        active_precision(evidence, {context}, transfer, regime, cfg.pi_min);

    std::vector<double> score(signals.size());
    std::vector<int> above;
    for (std::size_t i = 0; i < signals.size(); ++i) {
        score[i] = pm(i, 0);
        if (score[i] >= cfg.retain_threshold) {
            above.push_back(static_cast<int>(i));
        }
    }

    StepOutcome out(state.belief);
    out.retained_above_threshold = static_cast<int>(above.size());
    out.effective_rate = effective_rate(pm, cfg.retain_threshold,
                                        static_cast<double>(signals.size()));
    out.attended = top_indices_by(score, above,
                                  static_cast<std::size_t>(cfg.s_c));

    if (out.attended.empty()) {
        // Nothing coherent this step: fall back to the prediction. The
        // belief stays put, so a transient all-incoherent burst does not
        // move the hypothesis the gate is anchored to.
        out.estimate = mu;
        out.action = cfg.controller_gain * (mu - state.position);
        return out;
    }

    std::vector<Vec> key_rows;
    std::vector<double> pi_vals;
    std::vector<double> err_vals;
    key_rows.reserve(out.attended.size());
    for (int idx : out.attended) {
        key_rows.push_back(signals[idx].features);
        pi_vals.push_back(score[idx]);
        err_vals.push_back(signals[idx].payload - mu);
    }
    const std::size_t m = out.attended.size();
    const PrecisionMatrix pi_attended(Mat(1, m, pi_vals), cfg.pi_min);

    const AttentionInputs in(salience_query(cfg), Mat::from_rows(key_rows),
                             payload_column(signals, out.attended));
    out.estimate = gated_attention(in, pi_attended)(0, 0);
    out.belief = update_belief_active(state.belief, Mat(1, m, err_vals),
                                      pi_attended);
    out.action = cfg.controller_gain * (out.estimate - state.position);
    return out;
}

} // namespace

void validate_stream(const StreamConfig& cfg) {
    if (cfg.s_r < 1) throw DomainError("stream.s_r must be >= 1");
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) {
        throw DomainError("stream.rho must lie in (0,1]");
    }
    if (cfg.rho * cfg.s_r < 1.0) {
        throw DomainError(
            "stream.rho: expected relevant count rho*s_r must be >= 1");
    }
    if (!(cfg.obs_noise >= 0.0) || !std::isfinite(cfg.obs_noise)) {
        throw DomainError("stream.obs_noise must be >= 0");
    }
    if (!(cfg.distractor_scale >= 0.0) ||
        !std::isfinite(cfg.distractor_scale)) {
        throw DomainError("stream.distractor_scale must be >= 0");
    }
}

void validate_track(const TrackEnv& env) {
    if (env.horizon < 0) throw DomainError("track.horizon must be >= 0");
    if (env.centerline.size() < static_cast<std::size_t>(env.horizon)) {
        throw DimensionError("track.centerline shorter than horizon");
    }
    if (!(env.half_width > 0.0)) {
        throw DomainError("track.half_width must be positive");
    }
    for (double c : env.centerline) {
        if (!std::isfinite(c)) throw DomainError("track.centerline: non-finite");
    }
}

TrackEnv make_track(const TrackParams& params) {
    if (params.horizon < 0) throw DomainError("track.horizon must be >= 0");
    if (!(params.half_width > 0.0)) {
        throw DomainError("track.half_width must be positive");
    }
    if (!(params.period_steps > 0.0)) {
        throw DomainError("track.period_steps must be positive");
    }
    if (!(params.amplitude >= 0.0)) {
        throw DomainError("track.amplitude must be >= 0");
    }
    TrackEnv env;
    env.horizon = params.horizon;
    env.half_width = params.half_width;
    env.centerline.resize(params.horizon);
    double peak = 0.0;
    for (int t = 0; t < params.horizon; ++t) {
        const double u = kTwoPi * t / params.period_steps;
        env.centerline[t] = std::sin(u) + 0.35 * std::sin(3.0 * u + 1.7);
        peak = std::max(peak, std::fabs(env.centerline[t] - env.centerline[0]));
    }
    if (params.horizon > 0) {
        const double base = env.centerline[0];
        const double gain = peak > 0.0 ? params.amplitude / peak : 0.0;
        for (double& c : env.centerline) c = (c - base) * gain;
    }
    return env;
}

const char* to_string(AgentVariant variant) noexcept {
    return variant == AgentVariant::Baseline ? "baseline" : "co4";
}

AgentVariant agent_variant_from_string(std::string_view name) {
    if (name == "baseline") return AgentVariant::Baseline;
    if (name == "co4") return AgentVariant::Co4;
    throw DomainError("unknown agent variant: " + std::string(name));
}

void validate_agent(const AgentConfig& cfg) {
    if (cfg.s_c < 1) throw DomainError("agent.s_c must be >= 1");
    if (!(cfg.controller_gain > 0.0)) {
        throw DomainError("agent.controller_gain must be positive");
    }
    if (!(cfg.belief_gain > 0.0)) {
        throw DomainError("agent.belief_gain must be positive");
    }
    if (!(cfg.pi_min > 0.0 && cfg.pi_min < 1.0)) {
        throw DomainError("agent.pi_min must lie in (0,1)");
    }
    if (cfg.retain_threshold < cfg.pi_min || cfg.retain_threshold > 1.0) {
        throw DomainError("agent.retain_threshold must lie in [pi_min, 1]");
    }
    if (!(cfg.interaction_scale > 0.0)) {
        throw DomainError("agent.interaction_scale must be positive");
    }
    if (!(cfg.readout_bias >= 0.0)) {
        throw DomainError("agent.readout_bias must be >= 0");
    }
    if (!(cfg.salience_gain >= 0.0)) {
        throw DomainError("agent.salience_gain must be >= 0");
    }
    if (!(cfg.feedback_lambda >= 0.0)) {
        throw DomainError("agent.feedback_lambda must be >= 0");
    }
    regime_preset(cfg.regime); // throws on unknown
}

Vec encode_signal_features(double payload, int channel, int n_channels) {
    const double id = kTwoPi * channel / std::max(1, n_channels);
    return Vec{std::cos(kPayloadAngle1 * payload),
               std::sin(kPayloadAngle1 * payload),
               std::cos(kPayloadAngle2 * payload),
               std::sin(kPayloadAngle2 * payload),
               std::fabs(payload),
               1.0,
               std::cos(id),
               std::sin(id)};
}

Vec belief_context(double mu) {
    return Vec{std::cos(kPayloadAngle1 * mu),
               std::sin(kPayloadAngle1 * mu),
               std::cos(kPayloadAngle2 * mu),
               std::sin(kPayloadAngle2 * mu),
               0.0,
               1.0,
               0.0,
               0.0};
}

TransferConfig make_transfer_config(const AgentConfig& cfg) {
    std::vector<double> w(kSignalDim, 0.0);
    w[5] = cfg.readout_bias;
    return TransferConfig(Vec(w), Vec(w), cfg.interaction_scale);
}

OverloadRatio overload_ratio(double s_c, double s_r) {
    if (!(s_c > 0.0) || !(s_r > 0.0)) {
        throw DomainError("overload_ratio: rates must be positive");
    }
    const double gamma = s_c / s_r;
    return OverloadRatio{gamma, gamma >= 1.0};
}

std::vector<Signal> generate_signals(int step, const TrackEnv& env,
                                     const StreamConfig& cfg, Rng& rng) {
    validate_stream(cfg);
    if (step < 0 || step >= env.horizon) {
        throw DomainError("generate_signals: step outside horizon");
    }
    const int n_rel = static_cast<int>(std::llround(cfg.rho * cfg.s_r));
    const double truth = env.centerline[step];

    std::vector<Signal> signals;
    signals.reserve(cfg.s_r);
    for (int k = 0; k < cfg.s_r; ++k) {
        Signal s;
        s.channel = k;
        if (k < n_rel) {
            s.is_relevant = true;
            s.payload = truth + cfg.obs_noise * rng.normal();
        } else {
            const DistractorChannel ch =
                distractor_channel(rng.seed(), k, cfg.distractor_scale);
            s.is_relevant = false;
            s.payload = ch.offset +
                        ch.amplitude * std::sin(ch.omega * step + ch.phase);
        }
        s.features = encode_signal_features(s.payload, k, cfg.s_r);
        signals.push_back(std::move(s));
    }
    rng.shuffle(signals);
    return signals;
}

StepOutcome agent_step(const AgentState& state,
                       const std::vector<Signal>& signals,
                       const AgentConfig& cfg) {
    if (signals.empty()) throw DomainError("agent_step: empty signal list");
    validate_agent(cfg);
    return cfg.variant == AgentVariant::Baseline
               ? baseline_step(state, signals, cfg)
               : co4_step(state, signals, cfg);
}

EpisodeResult run_episode(const TrackEnv& env, const AgentConfig& agent,
                          const StreamConfig& stream, std::uint64_t seed) {
    validate_track(env);
    validate_stream(stream);
    validate_agent(agent);

    EpisodeResult result;
    result.metrics.seed = seed;
    result.metrics.gamma = overload_ratio(agent.s_c, stream.s_r).gamma;
    result.gate.burn_in_steps = kGateBurnInSteps;
    if (env.horizon == 0) return result;

    Rng rng(seed);
    const double start = env.centerline[0];
    // The per-pair learning rate normalizes by the stream size, so the total
    // update gain tracks the relevant fraction rather than the raw rate.
    AgentState state{start,
                     BeliefState(Vec{start}, agent.belief_gain / stream.s_r)};

    result.trajectory.reserve(env.horizon);
    result.attended_counts.reserve(env.horizon);
    result.effective_per_step.reserve(env.horizon);

    double eff_sum = 0.0;
    double recall_sum = 0.0;
    int recall_steps = 0;
    double retention_sum = 0.0;
    int retention_steps = 0;

    for (int t = 0; t < env.horizon; ++t) {
        const std::vector<Signal> signals =
            generate_signals(t, env, stream, rng);
        StepOutcome out = agent_step(state, signals, agent);
        state.position += out.action;
        state.belief = out.belief;

        result.trajectory.push_back(state.position);
        result.attended_counts.push_back(
            static_cast<int>(out.attended.size()));
        result.effective_per_step.push_back(out.effective_rate);
        eff_sum += out.effective_rate;

        if (std::fabs(state.position - env.centerline[t]) > env.half_width) {
            ++result.metrics.off_track_steps;
        }

        if (t >= kGateBurnInSteps) {
            int rel_present = 0, dis_present = 0;
            for (const Signal& s : signals) {
                (s.is_relevant ? rel_present : dis_present)++;
            }
            int rel_attended = 0, dis_attended = 0;
            for (int idx : out.attended) {
                (signals[idx].is_relevant ? rel_attended : dis_attended)++;
            }
            if (rel_present > 0) {
                recall_sum += static_cast<double>(rel_attended) / rel_present;
                ++recall_steps;
            }
            if (dis_present > 0) {
                retention_sum +=
                    static_cast<double>(dis_attended) / dis_present;
                ++retention_steps;
            }
        }
    }

    result.metrics.rms_drift = drift_metric(
        result.trajectory,
        std::vector<double>(env.centerline.begin(),
                            env.centerline.begin() + env.horizon));
    result.metrics.effective_s_r = eff_sum / env.horizon;
    result.gate.relevant_recall =
        recall_steps > 0 ? recall_sum / recall_steps : 0.0;
    result.gate.distractor_retention =
        retention_steps > 0 ? retention_sum / retention_steps : 0.0;
    return result;
}

double drift_metric(const std::vector<double>& trajectory,
                    const std::vector<double>& centerline) {
    return rms(Vec(trajectory), Vec(centerline));
}

} // namespace co4
