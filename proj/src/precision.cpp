#include "co4/precision.hpp"

#include <algorithm>
#include <cmath>

namespace co4 {

ContextAssembly::ContextAssembly(Vec c_internal, Vec feedback, double lambda)
    : c_internal(std::move(c_internal)), feedback(std::move(feedback)),
      lambda(lambda) {
    if (this->c_internal.size() != this->feedback.size()) {
        throw DimensionError("ContextAssembly: feedback dimension mismatch");
    }
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw DomainError("ContextAssembly: lambda must be finite and >= 0");
    }
}

Vec assemble_context(const ContextAssembly& assembly) {
    std::vector<double> out(assembly.c_internal.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = assembly.c_internal[j] + assembly.lambda * assembly.feedback[j];
    }
    return Vec(std::move(out));
}

PrecisionMatrix::PrecisionMatrix(Mat values, double pi_min)
    : values_(std::move(values)), pi_min_(pi_min) {
    if (!(pi_min > 0.0 && pi_min < 1.0)) {
        throw DomainError("PrecisionMatrix: pi_min must lie in (0,1)");
    }
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw DimensionError("PrecisionMatrix: empty matrix");
    }
    for (double v : values_.values()) {
        if (v < pi_min_ || v > 1.0) {
            throw DomainError("PrecisionMatrix: entry outside [pi_min, 1]");
        }
    }
}

PrecisionMatrix active_precision(const std::vector<Vec>& evidence,
                                 const std::vector<Vec>& contexts,
                                 const TransferConfig& cfg,
                                 const RegimeParams& regime, double pi_min) {
    if (!(pi_min > 0.0 && pi_min < 1.0)) {
        throw DomainError("active_precision: pi_min must lie in (0,1)");
    }
    if (evidence.empty() || contexts.empty()) {
        throw DimensionError("active_precision: empty evidence or context set");
    }
    const std::size_t n = evidence.size();
    const std::size_t m = contexts.size();
    std::vector<double> values(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double mod =
                mod_transfer(evidence[i], contexts[j], cfg, regime);
            values[i * m + j] = std::min(1.0, std::max(pi_min, mod));
        }
    }
    return PrecisionMatrix(Mat(n, m, std::move(values)), pi_min);
}

Vec baseline_precision(const Vec& variances) {
    std::vector<double> out(variances.size());
    for (std::size_t i = 0; i < variances.size(); ++i) {
        if (!(variances[i] > 0.0)) {
            throw DomainError("baseline_precision: variance must be positive");
        }
        out[i] = 1.0 / variances[i];
    }
    return Vec(std::move(out));
}

double effective_rate(const PrecisionMatrix& pi, double retain_threshold,
                      double s_r_raw) {
    if (retain_threshold < pi.pi_min() || retain_threshold > 1.0) {
        throw DomainError("effective_rate: threshold outside [pi_min, 1]");
    }
    const std::size_t n = pi.rows();
    std::size_t retained = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = 0.0;
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            best = std::max(best, pi(i, j));
        }
        if (best >= retain_threshold) ++retained;
    }
    return s_r_raw * static_cast<double>(retained) / static_cast<double>(n);
}

} // namespace co4
