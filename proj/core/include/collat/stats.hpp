#pragma once

#include <cstdint>
#include <span>

namespace collat {

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Mean and variance accumulator with an order-deterministic pairwise merge.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Sample variance; throws StatisticsError when fewer than two samples.
    double variance() const;
    double se() const;
    double max_abs() const { return max_abs_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double max_abs_ = 0.0;
};

/// Adds per-path samples; with antithetic pairing each consecutive pair contributes its
/// average, so the standard error accounts for the pair correlation.
void add_paths(RunningStats& stats, std::span<const double> per_path, bool antithetic);

McEstimate make_estimate(const RunningStats& stats, std::size_t n_paths, std::uint64_t seed);

}  // namespace collat
