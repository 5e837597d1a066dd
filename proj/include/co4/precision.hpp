#pragma once

#include <vector>

#include "co4/numerics.hpp"
#include "co4/tpn.hpp"

namespace co4 {

/// Internal context plus feedback scaled by lambda. lambda defaults to 0
/// upstream (feedback channel present but inert).
struct ContextAssembly {
    Vec c_internal;
    Vec feedback;
    double lambda;

    ContextAssembly(Vec c_internal, Vec feedback, double lambda);
};

/// c_internal + lambda * feedback, elementwise.
Vec assemble_context(const ContextAssembly& assembly);

/// Pairwise active precisions pi_ij, every entry clamped to [pi_min, 1].
/// Rows index evidence, columns index context sources. pi_min is the floor
/// that keeps low-coherence pairs from being silenced entirely (it also
/// keeps log-domain gating finite). Note the naming split: pi_min is a
/// precision floor, while prediction errors are written e_ij throughout.
class PrecisionMatrix {
public:
    PrecisionMatrix(Mat values, double pi_min);

    const Mat& values() const noexcept { return values_; }
    double pi_min() const noexcept { return pi_min_; }
    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(i, j);
    }

private:
    Mat values_;
    double pi_min_;
};

/// pi_ij = min(1, max(pi_min, MOD(R_i, C_j))) for every (evidence, context)
/// pair. pi_min must lie in (0, 1).
PrecisionMatrix active_precision(const std::vector<Vec>& evidence,
                                 const std::vector<Vec>& contexts,
                                 const TransferConfig& cfg,
                                 const RegimeParams& regime, double pi_min);

/// Classical precision as inverse variance, elementwise. All variances must
/// be positive.
Vec baseline_precision(const Vec& variances);

/// Post-gate signal rate: s_r_raw scaled by the fraction of evidence rows
/// whose best pairwise precision clears retain_threshold. The threshold must
/// lie in [pi_min, 1].
double effective_rate(const PrecisionMatrix& pi, double retain_threshold,
                      double s_r_raw);

} // namespace co4
