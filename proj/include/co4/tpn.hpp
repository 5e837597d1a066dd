#pragma once

#include <string_view>

#include "co4/numerics.hpp"

namespace co4 {

/// Processing regime of a two-point unit, set by the relative strength of
/// the evidence (R) and context (C) streams.
enum class MentalState { SWSleep, Wakefulness, REMSleep, AwakeThought };

const char* to_string(MentalState state) noexcept;
MentalState mental_state_from_string(std::string_view name);

/// Gain configuration for one mental-state regime. Construction enforces
/// the per-state constraints:
///   SWSleep       c_gain == 0 (context has no effect)
///   Wakefulness   r_gain >= 0.7 and c_gain in [0.3, 0.7)
///   REMSleep      c_gain >= 0.7 and r_gain <= 0.3
///   AwakeThought  r_gain >= 0.7 and c_gain >= 0.7
struct RegimeParams {
    MentalState state;
    double r_gain;
    double c_gain;

    RegimeParams(MentalState state, double r_gain, double c_gain);
};

/// Default gain ladder per state (moderate-to-high for wakefulness,
/// high-to-maximal for awake thought).
RegimeParams regime_preset(MentalState state);

/// Readout weights for the two streams and the scale of their
/// multiplicative interaction. w_r and w_c must match the evidence/context
/// dimension d.
struct TransferConfig {
    Vec w_r;
    Vec w_c;
    double interaction_scale;

    TransferConfig(Vec w_r, Vec w_c, double interaction_scale);
};

/// Integrated evidence drive: r_gain * (w_r . R) / d.
double f_r(const Vec& evidence, const TransferConfig& cfg,
           const RegimeParams& regime);

/// Integrated contextual drive: c_gain * (w_c . C) / d.
double f_c(const Vec& context, const TransferConfig& cfg,
           const RegimeParams& regime);

/// Multiplicative cooperation of the two streams:
/// interaction_scale * r_gain * c_gain * (R . C) / d.
double g_interact(const Vec& evidence, const Vec& context,
                  const TransferConfig& cfg, const RegimeParams& regime);

/// Modulation transfer MOD(R, C) = f_r + f_c + g. Unbounded; clamping to a
/// precision happens downstream.
double mod_transfer(const Vec& evidence, const Vec& context,
                    const TransferConfig& cfg, const RegimeParams& regime);

/// Map observed stream strengths in [0,1] onto a mental state. Total on
/// [0,1]^2 with disjoint preimages; the unclassified middle region defaults
/// to Wakefulness.
MentalState classify_regime(double r_strength, double c_strength);

} // namespace co4
