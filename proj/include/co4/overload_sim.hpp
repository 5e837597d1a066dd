#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "co4/attention.hpp"
#include "co4/precision.hpp"

namespace co4 {

/// Incoming mixed stream: s_r signals per step, a rho fraction of them
/// carrying noisy lane-offset readings, the rest structured distractors.
struct StreamConfig {
    int s_r = 1;
    double rho = 1.0;
    double obs_noise = 0.0;
    double distractor_scale = 0.0;
};

void validate_stream(const StreamConfig& cfg);

/// Lane-following environment: lateral centerline offsets per step.
struct TrackEnv {
    std::vector<double> centerline;
    double half_width = 1.0;
    int horizon = 0;
};

void validate_track(const TrackEnv& env);

struct TrackParams {
    int horizon = 2000;
    double half_width = 3.0;
    double amplitude = 1.2;   // peak lateral excursion, meters
    double period_steps = 400.0;
};

/// Two-harmonic curving centerline, rescaled so the peak excursion equals
/// amplitude and the track starts at offset 0.
TrackEnv make_track(const TrackParams& params);

/// One stream element. is_relevant is ground truth for metrics only; agents
/// never read it.
struct Signal {
    Vec features;
    bool is_relevant = false;
    double payload = 0.0;
    int channel = 0;
};

enum class AgentVariant { Baseline, Co4 };

const char* to_string(AgentVariant variant) noexcept;
AgentVariant agent_variant_from_string(std::string_view name);

struct AgentConfig {
    AgentVariant variant = AgentVariant::Baseline;
    int s_c = 1;                     // attention budget, signals per step
    double controller_gain = 0.5;
    double belief_gain = 1.5;        // learning_rate = belief_gain / s_r
    double pi_min = 0.05;
    double retain_threshold = 0.96;
    MentalState regime = MentalState::AwakeThought;
    double interaction_scale = 2.9;
    double readout_bias = 0.9;
    double salience_gain = 1.0;      // baseline |payload| logit weight
    double feedback_lambda = 0.0;
};

void validate_agent(const AgentConfig& cfg);

/// Signal feature layout shared by the stream and both agents:
/// [cos(a1 p), sin(a1 p), cos(a2 p), sin(a2 p), |p|, 1, cos(id), sin(id)].
/// Payloads are encoded on two incommensurate circles; with the belief
/// encoded the same way, the MOD interaction term reads
/// cos(a1 (p - mu)) + cos(a2 (p - mu)) + 1, which peaks only near p = mu
/// inside the reachable payload span.
inline constexpr std::size_t kSignalDim = 8;
inline constexpr double kPayloadAngle1 = 2.0; // rad per meter
inline constexpr double kPayloadAngle2 = 3.1;

Vec encode_signal_features(double payload, int channel, int n_channels);
Vec belief_context(double mu);
TransferConfig make_transfer_config(const AgentConfig& cfg);

/// Mind-reality ratio gamma = s_c / s_r; gamma >= 1 is synchrony, below 1
/// is overload.
struct OverloadRatio {
    double gamma;
    bool synchrony;
};

OverloadRatio overload_ratio(double s_c, double s_r);

/// One step's worth of signals: round(rho*s_r) relevant readings of the
/// current centerline offset plus structured distractors, shuffled. The
/// distractor channels run slow per-channel sinusoids around a DC offset,
/// derived from the stream seed so paired agents see identical streams.
std::vector<Signal> generate_signals(int step, const TrackEnv& env,
                                     const StreamConfig& cfg, Rng& rng);

struct AgentState {
    double position;
    BeliefState belief;
};

struct StepOutcome {
    double action = 0.0;              // steering delta
    std::vector<int> attended;        // indices into the signal list
    int retained_above_threshold = 0; // pre-budget count (gate only)
    double effective_rate = 0.0;      // post-gate signals this step
    double estimate = 0.0;
    BeliefState belief;               // updated belief

    explicit StepOutcome(BeliefState b) : belief(std::move(b)) {}
};

/// Pure agent policy. Baseline ranks by |payload| salience and attends the
/// top s_c with plain attention; Co4 scores every signal's coherence with
/// the current belief, keeps the top s_c above retain_threshold for gated
/// attention, and runs the precision-weighted belief update over every
/// signal, so floored pairs still pull a biased belief back toward
/// contradicting evidence. If nothing clears the gate, Co4 steers toward
/// its own prediction.
StepOutcome agent_step(const AgentState& state,
                       const std::vector<Signal>& signals,
                       const AgentConfig& cfg);

struct EpisodeMetrics {
    double gamma = 0.0;
    double rms_drift = 0.0;
    int off_track_steps = 0;
    double effective_s_r = 0.0;       // mean post-gate signals per step
    std::uint64_t seed = 0;
};

/// Attended-set quality against ground-truth labels, averaged over steps
/// after burn_in_steps. Reported for both variants, asserted for Co4.
struct GateStats {
    double relevant_recall = 0.0;
    double distractor_retention = 0.0;
    int burn_in_steps = 0;
};

struct EpisodeResult {
    EpisodeMetrics metrics;
    std::vector<double> trajectory;
    std::vector<int> attended_counts;       // per step
    std::vector<double> effective_per_step; // per step, post-gate rate
    GateStats gate;
};

inline constexpr int kGateBurnInSteps = 200;

/// Deterministic episode: same seed, same everything. Baseline and Co4
/// agents consume identical streams for a given seed.
EpisodeResult run_episode(const TrackEnv& env, const AgentConfig& agent,
                          const StreamConfig& stream, std::uint64_t seed);

/// rms(trajectory, centerline); lengths must match.
double drift_metric(const std::vector<double>& trajectory,
                    const std::vector<double>& centerline);

} // namespace co4
