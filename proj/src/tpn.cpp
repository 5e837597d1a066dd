#include "co4/tpn.hpp"

#include <cmath>
#include <string>

namespace co4 {

const char* to_string(MentalState state) noexcept {
    switch (state) {
        case MentalState::SWSleep: return "sw_sleep";
        case MentalState::Wakefulness: return "wakefulness";
        case MentalState::REMSleep: return "rem_sleep";
        case MentalState::AwakeThought: return "awake_thought";
    }
    return "unknown";
}

MentalState mental_state_from_string(std::string_view name) {
    if (name == "sw_sleep") return MentalState::SWSleep;
    if (name == "wakefulness") return MentalState::Wakefulness;
    if (name == "rem_sleep") return MentalState::REMSleep;
    if (name == "awake_thought") return MentalState::AwakeThought;
    throw DomainError("unknown mental state: " + std::string(name));
}

RegimeParams::RegimeParams(MentalState state, double r_gain, double c_gain)
    : state(state), r_gain(r_gain), c_gain(c_gain) {
    if (!(r_gain >= 0.0 && r_gain <= 1.0) ||
        !(c_gain >= 0.0 && c_gain <= 1.0)) {
        throw DomainError("RegimeParams: gains must lie in [0,1]");
    }
    const char* violated = nullptr;
    switch (state) {
        case MentalState::SWSleep:
            if (c_gain != 0.0) violated = "SWSleep requires c_gain == 0";
            break;
        case MentalState::Wakefulness:
            if (!(r_gain >= 0.7 && c_gain >= 0.3 && c_gain < 0.7))
                violated = "Wakefulness requires r_gain >= 0.7, c_gain in [0.3, 0.7)";
            break;
        case MentalState::REMSleep:
            if (!(c_gain >= 0.7 && r_gain <= 0.3))
                violated = "REMSleep requires c_gain >= 0.7, r_gain <= 0.3";
            break;
        case MentalState::AwakeThought:
            if (!(r_gain >= 0.7 && c_gain >= 0.7))
                violated = "AwakeThought requires r_gain >= 0.7, c_gain >= 0.7";
            break;
    }
    if (violated) throw DomainError(std::string("RegimeParams: ") + violated);
}

RegimeParams regime_preset(MentalState state) {
    switch (state) {
        case MentalState::SWSleep:
            return RegimeParams(state, 0.9, 0.0);
        case MentalState::Wakefulness:
            return RegimeParams(state, 0.9, 0.5);
        case MentalState::REMSleep:
            return RegimeParams(state, 0.2, 0.9);
        case MentalState::AwakeThought:
            return RegimeParams(state, 0.95, 0.95);
    }
    throw DomainError("regime_preset: unknown state");
}

TransferConfig::TransferConfig(Vec w_r, Vec w_c, double interaction_scale)
    : w_r(std::move(w_r)), w_c(std::move(w_c)),
      interaction_scale(interaction_scale) {
    if (this->w_r.size() != this->w_c.size()) {
        throw DimensionError("TransferConfig: w_r and w_c sizes differ");
    }
    if (this->w_r.empty()) {
        throw DimensionError("TransferConfig: weights must be non-empty");
    }
    if (!(interaction_scale > 0.0) || !std::isfinite(interaction_scale)) {
        throw DomainError("TransferConfig: interaction_scale must be positive");
    }
}

double f_r(const Vec& evidence, const TransferConfig& cfg,
           const RegimeParams& regime) {
    if (evidence.size() != cfg.w_r.size()) {
        throw DimensionError("f_r: evidence dimension mismatch");
    }
    return regime.r_gain * dot(cfg.w_r, evidence) /
           static_cast<double>(evidence.size());
}

double f_c(const Vec& context, const TransferConfig& cfg,
           const RegimeParams& regime) {
    if (context.size() != cfg.w_c.size()) {
        throw DimensionError("f_c: context dimension mismatch");
    }
    return regime.c_gain * dot(cfg.w_c, context) /
           static_cast<double>(context.size());
}

double g_interact(const Vec& evidence, const Vec& context,
                  const TransferConfig& cfg, const RegimeParams& regime) {
    if (evidence.size() != context.size()) {
        throw DimensionError("g_interact: stream dimension mismatch");
    }
    if (evidence.size() != cfg.w_r.size()) {
        throw DimensionError("g_interact: config dimension mismatch");
    }
    return cfg.interaction_scale * regime.r_gain * regime.c_gain *
           dot(evidence, context) / static_cast<double>(evidence.size());
}

double mod_transfer(const Vec& evidence, const Vec& context,
                    const TransferConfig& cfg, const RegimeParams& regime) {
    return f_r(evidence, cfg, regime) + f_c(context, cfg, regime) +
           g_interact(evidence, context, cfg, regime);
}

MentalState classify_regime(double r_strength, double c_strength) {
    if (!(r_strength >= 0.0 && r_strength <= 1.0) ||
        !(c_strength >= 0.0 && c_strength <= 1.0)) {
        throw DomainError("classify_regime: strengths must lie in [0,1]");
    }
    if (c_strength < 0.3) return MentalState::SWSleep;
    if (c_strength >= 0.7 && r_strength <= 0.3) return MentalState::REMSleep;
    if (r_strength >= 0.7 && c_strength >= 0.7) {
        return MentalState::AwakeThought;
    }
    // r >= 0.7 with moderate c, plus the unclassified middle region.
    return MentalState::Wakefulness;
}

} // namespace co4
