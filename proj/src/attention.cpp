#include "co4/attention.hpp"

#include <cmath>

namespace co4 {

namespace {

// softmax(Q K^T / sqrt(d) + log_bias) row by row; log_bias may be null.
Mat attention_weights_impl(const AttentionInputs& in, const Mat* log_bias) {
    const std::size_t n = in.q.rows();
    const std::size_t m = in.k.rows();
    const std::size_t d = in.q.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<double> weights(n * m);
    std::vector<double> logits(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += in.q(i, k) * in.k(j, k);
            logits[j] = acc * scale;
            if (log_bias) logits[j] += (*log_bias)(i, j);
        }
        const Vec row = softmax_row(Vec(logits));
        for (std::size_t j = 0; j < m; ++j) weights[i * m + j] = row[j];
    }
    return Mat(n, m, std::move(weights));
}

Mat apply_values(const Mat& weights, const Mat& v) {
    const std::size_t n = weights.rows();
    const std::size_t m = weights.cols();
    const std::size_t dv = v.cols();
    std::vector<double> out(n * dv, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double w = weights(i, j);
            for (std::size_t c = 0; c < dv; ++c) {
                out[i * dv + c] += w * v(j, c);
            }
        }
    }
    return Mat(n, dv, std::move(out));
}

Mat log_of(const PrecisionMatrix& pi) {
    std::vector<double> out(pi.rows() * pi.cols());
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            out[i * pi.cols() + j] = std::log(pi(i, j));
        }
    }
    return Mat(pi.rows(), pi.cols(), std::move(out));
}

void check_gate_dims(const AttentionInputs& in, const PrecisionMatrix& pi) {
    if (pi.rows() != in.q.rows() || pi.cols() != in.k.rows()) {
        throw DimensionError("gated_attention: precision shape mismatch");
    }
}

} // namespace

AttentionInputs::AttentionInputs(Mat q, Mat k, Mat v)
    : q(std::move(q)), k(std::move(k)), v(std::move(v)) {
    if (this->q.rows() == 0 || this->k.rows() == 0 || this->q.cols() == 0) {
        throw DimensionError("AttentionInputs: empty operand");
    }
    if (this->q.cols() != this->k.cols()) {
        throw DimensionError("AttentionInputs: Q and K dimension mismatch");
    }
    if (this->k.rows() != this->v.rows()) {
        throw DimensionError("AttentionInputs: K and V row count mismatch");
    }
    if (this->v.cols() == 0) {
        throw DimensionError("AttentionInputs: V has no columns");
    }
}

BeliefState::BeliefState(Vec mu, double learning_rate)
    : mu(std::move(mu)), learning_rate(learning_rate) {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw DomainError("BeliefState: learning_rate must be positive");
    }
}

Mat baseline_attention_weights(const AttentionInputs& in) {
    return attention_weights_impl(in, nullptr);
}

Mat baseline_attention(const AttentionInputs& in) {
    return apply_values(baseline_attention_weights(in), in.v);
}

Mat gated_attention_weights(const AttentionInputs& in,
                            const PrecisionMatrix& pi) {
    check_gate_dims(in, pi);
    const Mat bias = log_of(pi);
    return attention_weights_impl(in, &bias);
}

Mat gated_attention(const AttentionInputs& in, const PrecisionMatrix& pi) {
    return apply_values(gated_attention_weights(in, pi), in.v);
}

BeliefState update_belief_active(const BeliefState& b, const Mat& errors,
                                 const PrecisionMatrix& pi) {
    if (errors.rows() != pi.rows() || errors.cols() != pi.cols()) {
        throw DimensionError("update_belief_active: error shape mismatch");
    }
    if (errors.rows() != b.mu.size()) {
        throw DimensionError("update_belief_active: belief length mismatch");
    }
    std::vector<double> mu(b.mu.begin(), b.mu.end());
    for (std::size_t i = 0; i < errors.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < errors.cols(); ++j) {
            acc += pi(i, j) * errors(i, j);
        }
        mu[i] += b.learning_rate * acc;
    }
    return BeliefState(Vec(std::move(mu)), b.learning_rate);
}

BeliefState update_belief_baseline(const BeliefState& b, const Vec& errors,
                                   const Vec& precisions) {
    if (errors.size() != precisions.size()) {
        throw DimensionError("update_belief_baseline: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(precisions[i] > 0.0)) {
            throw DomainError("update_belief_baseline: precision must be positive");
        }
        acc += precisions[i] * errors[i];
    }
    const double delta = b.learning_rate * acc;
    std::vector<double> mu(b.mu.begin(), b.mu.end());
    for (double& x : mu) x += delta;
    return BeliefState(Vec(std::move(mu)), b.learning_rate);
}

AttentionGradients gated_attention_grad(const AttentionInputs& in,
                                        const PrecisionMatrix& pi,
                                        const Mat& upstream) {
    check_gate_dims(in, pi);
    const std::size_t n = in.q.rows();
    const std::size_t m = in.k.rows();
    const std::size_t d = in.q.cols();
    const std::size_t dv = in.v.cols();
    if (upstream.rows() != n || upstream.cols() != dv) {
        throw DimensionError("gated_attention_grad: upstream shape mismatch");
    }

    const Mat a = gated_attention_weights(in, pi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    // dL/dV_jc = sum_i a_ij * u_ic
    std::vector<double> dv_vals(m * dv, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double w = a(i, j);
            for (std::size_t c = 0; c < dv; ++c) {
                dv_vals[j * dv + c] += w * upstream(i, c);
            }
        }
    }

    // dL/da_ij = u_i . v_j, then through the softmax Jacobian:
    // dL/ds_ij = a_ij * (g_ij - sum_k a_ik g_ik)
    std::vector<double> ds(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        double row_inner = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double g = 0.0;
            for (std::size_t c = 0; c < dv; ++c) {
                g += upstream(i, c) * in.v(j, c);
            }
            ds[i * m + j] = g;
            row_inner += a(i, j) * g;
        }
        for (std::size_t j = 0; j < m; ++j) {
            ds[i * m + j] = a(i, j) * (ds[i * m + j] - row_inner);
        }
    }

    // Logits s_ij = (Q_i . K_j) * scale + ln pi_ij; the bias is constant.
    std::vector<double> dq_vals(n * d, 0.0);
    std::vector<double> dk_vals(m * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double s = ds[i * m + j] * scale;
            for (std::size_t k = 0; k < d; ++k) {
                dq_vals[i * d + k] += s * in.k(j, k);
                dk_vals[j * d + k] += s * in.q(i, k);
            }
        }
    }

    return AttentionGradients{Mat(n, d, std::move(dq_vals)),
                              Mat(m, d, std::move(dk_vals)),
                              Mat(m, dv, std::move(dv_vals))};
}

} // namespace co4
