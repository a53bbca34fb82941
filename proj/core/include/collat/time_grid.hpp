#pragma once

#include <optional>
#include <vector>

namespace collat {

/// Strictly increasing simulation times starting at 0.
class TimeGrid {
public:
    /// Times closer than this are treated as the same grid point.
    static constexpr double tolerance = 1e-9;

    explicit TimeGrid(std::vector<double> times);

    /// Uniform base step (ceil(horizon * steps_per_year) steps) refined with every event
    /// time in (0, horizon]; events snap onto base points closer than `tolerance`.
    static TimeGrid uniform_with_events(double horizon, double steps_per_year,
                                        const std::vector<double>& events = {});

    std::size_t size() const { return times_.size(); }
    std::size_t steps() const { return times_.size() - 1; }
    double operator[](std::size_t k) const { return times_[k]; }
    double dt(std::size_t k) const { return times_[k + 1] - times_[k]; }
    double horizon() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }

    std::optional<std::size_t> find(double t) const;
    /// Throws ValidationError naming `what` when t is not a grid point.
    std::size_t index_of(double t, const char* what = "event") const;

    bool operator==(const TimeGrid& other) const = default;

private:
    std::vector<double> times_;
};

/// Margin times t_0 = start, start + 1/per_year, ..., always ending at `end`.
std::vector<double> periodic_times(double start, double end, double per_year);

}  // namespace collat
