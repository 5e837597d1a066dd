#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include "co4/errors.hpp"

namespace co4 {

/// Dense real vector. Constructors reject non-finite entries, so a Vec
/// always holds finite values.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::vector<double> values);
    Vec(std::initializer_list<double> values);

    static Vec zeros(std::size_t n);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

private:
    std::vector<double> values_;
};

/// Row-major dense real matrix with the same finiteness guarantee as Vec.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Mat zeros(std::size_t rows, std::size_t cols);
    static Mat from_rows(const std::vector<Vec>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const {
        return values_[i * cols_ + j];
    }
    Vec row(std::size_t i) const;
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Counter-based deterministic generator (SplitMix64 over seed and call
/// counter). Equal seeds give bit-equal u64 draw sequences on every platform;
/// state is just (seed, counter), so streams are cheap to fork via mix().
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform double in [0, 1).
    double uniform() noexcept;
    /// Standard normal via Box-Muller on two uniform draws.
    double normal() noexcept;
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& xs) {
        if (xs.size() < 2) return;
        for (std::size_t i = xs.size() - 1; i > 0; --i) {
            std::swap(xs[i], xs[below(i + 1)]);
        }
    }

    std::uint64_t seed() const noexcept { return seed_; }

    /// Derive an independent stream key from two values (for per-channel
    /// sub-streams that must not consume from the parent sequence).
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
};

/// Numerically stable softmax (max-subtraction). Output is positive and
/// sums to 1. Empty input is a dimension error.
Vec softmax_row(const Vec& v);

/// Central-difference gradient oracle: (f(x+h e_k) - f(x-h e_k)) / (2h).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h);

/// sqrt(mean((a_k - b_k)^2)); zero iff a == b. Lengths must match.
double rms(const Vec& a, const Vec& b);

double dot(const Vec& a, const Vec& b);

} // namespace co4
