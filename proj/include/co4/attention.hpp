#pragma once

#include "co4/numerics.hpp"
#include "co4/precision.hpp"

namespace co4 {

/// Query/key/value triple. Q is n x d, K is m x d, V is m x d_v.
struct AttentionInputs {
    Mat q;
    Mat k;
    Mat v;

    AttentionInputs(Mat q, Mat k, Mat v);
};

/// Internal state mu with the update proportionality constant made explicit.
struct BeliefState {
    Vec mu;
    double learning_rate;

    BeliefState(Vec mu, double learning_rate);
};

/// Row-stochastic attention weights softmax(Q K^T / sqrt(d)).
Mat baseline_attention_weights(const AttentionInputs& in);

/// Scaled dot-product attention: softmax(Q K^T / sqrt(d)) V.
Mat baseline_attention(const AttentionInputs& in);

/// Weights of the coherence-gated variant. Precision enters as a log-domain
/// bias on the pre-softmax logits (softmax(Q K^T / sqrt(d) + ln pi)), so
/// gating happens before the attention competition and each row still sums
/// to 1. A constant precision row shifts all logits equally and reproduces
/// the baseline exactly.
Mat gated_attention_weights(const AttentionInputs& in,
                            const PrecisionMatrix& pi);

Mat gated_attention(const AttentionInputs& in, const PrecisionMatrix& pi);

/// Per-channel update: delta mu_i = learning_rate * sum_j pi_ij * e_ij.
/// errors and pi are n x m; mu has n entries.
BeliefState update_belief_active(const BeliefState& b, const Mat& errors,
                                 const PrecisionMatrix& pi);

/// Scalar-state update: one delta = learning_rate * sum_i pi_i * e_i,
/// applied to every entry of mu. Precisions must be positive.
BeliefState update_belief_baseline(const BeliefState& b, const Vec& errors,
                                   const Vec& precisions);

struct AttentionGradients {
    Mat d_q;
    Mat d_k;
    Mat d_v;
};

/// Analytic gradients of sum(upstream * gated_attention(in, pi)) with
/// respect to Q, K, V. upstream is n x d_v.
AttentionGradients gated_attention_grad(const AttentionInputs& in,
                                        const PrecisionMatrix& pi,
                                        const Mat& upstream);

} // namespace co4
