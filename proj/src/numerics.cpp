#include "co4/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace co4 {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError(std::string(what) + ": non-finite entry");
        }
    }
}

} // namespace

Vec::Vec(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "Vec");
}

Vec::Vec(std::initializer_list<double> values) : values_(values) {
    require_finite(values_, "Vec");
}

Vec Vec::zeros(std::size_t n) {
    return Vec(std::vector<double>(n, 0.0));
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ * cols_ != values_.size()) {
        throw DimensionError("Mat: rows*cols does not match value count");
    }
    require_finite(values_, "Mat");
}

Mat Mat::zeros(std::size_t rows, std::size_t cols) {
    return Mat(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) return Mat();
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (const Vec& r : rows) {
        if (r.size() != cols) {
            throw DimensionError("Mat::from_rows: ragged rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return Mat(rows.size(), cols, std::move(values));
}

Vec Mat::row(std::size_t i) const {
    return Vec(std::vector<double>(values_.begin() + i * cols_,
                                   values_.begin() + (i + 1) * cols_));
}

std::uint64_t Rng::next_u64() noexcept {
    // SplitMix64: output is a pure function of (seed, counter).
    std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw DomainError("Rng::below: n must be positive");
    return next_u64() % n;
}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vec softmax_row(const Vec& v) {
    if (v.empty()) throw DimensionError("softmax_row: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        denom += out[i];
    }
    for (double& x : out) x /= denom;
    return Vec(std::move(out));
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h) {
    if (!(h > 0.0)) throw DomainError("fd_gradient: step must be positive");
    std::vector<double> grad(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double xk = probe[k];
        probe[k] = xk + h;
        const double fp = f(Vec(probe));
        probe[k] = xk - h;
        const double fm = f(Vec(probe));
        probe[k] = xk;
        grad[k] = (fp - fm) / (2.0 * h);
    }
    return Vec(std::move(grad));
}

double rms(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("rms: length mismatch");
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace co4
