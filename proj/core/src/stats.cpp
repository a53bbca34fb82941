#include "collat/stats.hpp"

#include <cmath>

#include "collat/errors.hpp"

namespace collat {

void RunningStats::add(double x) {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    max_abs_ = std::max(max_abs_, std::abs(x));
}

void RunningStats::merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    double na = static_cast<double>(n_);
    double nb = static_cast<double>(other.n_);
    double delta = other.mean_ - mean_;
    double n = na + nb;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    n_ += other.n_;
    max_abs_ = std::max(max_abs_, other.max_abs_);
}

double RunningStats::variance() const {
    if (n_ < 2) throw StatisticsError("need at least two samples for a variance");
    return m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::se() const { return std::sqrt(variance() / static_cast<double>(n_)); }

void add_paths(RunningStats& stats, std::span<const double> per_path, bool antithetic) {
    if (!antithetic) {
        for (double x : per_path) stats.add(x);
        return;
    }
    std::size_t i = 0;
    for (; i + 1 < per_path.size(); i += 2) stats.add(0.5 * (per_path[i] + per_path[i + 1]));
    if (i < per_path.size()) stats.add(per_path[i]);
}

McEstimate make_estimate(const RunningStats& stats, std::size_t n_paths, std::uint64_t seed) {
    return McEstimate{stats.mean(), stats.se(), n_paths, seed};
}

}  // namespace collat
