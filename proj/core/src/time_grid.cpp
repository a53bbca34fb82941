#include "collat/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collat/errors.hpp"

namespace collat {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw ValidationError("time grid needs at least two points");
    if (times_.front() != 0.0) throw ValidationError("time grid must start at 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw ValidationError("time grid must be strictly increasing");
}

TimeGrid TimeGrid::uniform_with_events(double horizon, double steps_per_year,
                                       const std::vector<double>& events) {
    if (!(horizon > 0.0)) throw ValidationError("grid horizon must be positive");
    if (!(steps_per_year > 0.0)) throw ValidationError("steps per year must be positive");
    auto n = static_cast<std::size_t>(std::ceil(horizon * steps_per_year - 1e-9));
    n = std::max<std::size_t>(n, 1);
    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k <= n; ++k) times[k] = horizon * static_cast<double>(k) / static_cast<double>(n);
    times[n] = horizon;

    for (double e : events) {
        if (e <= tolerance || e > horizon + tolerance) continue;
        auto it = std::lower_bound(times.begin(), times.end(), e);
        if (it != times.end() && std::abs(*it - e) <= tolerance) {
            if (it != times.end() - 1) *it = e;
            continue;
        }
        if (it != times.begin() && std::abs(*(it - 1) - e) <= tolerance) {
            if (it - 1 != times.begin()) *(it - 1) = e;
            continue;
        }
        times.insert(it, e);
    }
    return TimeGrid(std::move(times));
}

std::optional<std::size_t> TimeGrid::find(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tolerance);
    if (it != times_.end() && std::abs(*it - t) <= tolerance)
        return static_cast<std::size_t>(it - times_.begin());
    return std::nullopt;
}

std::size_t TimeGrid::index_of(double t, const char* what) const {
    if (auto k = find(t)) return *k;
    throw ValidationError(std::string(what) + " time " + std::to_string(t) + " is not on the simulation grid");
}

std::vector<double> periodic_times(double start, double end, double per_year) {
    if (!(end > start)) throw ValidationError("margin schedule needs end > start");
    if (!(per_year > 0.0)) throw ValidationError("margin frequency must be positive");
    std::vector<double> out{start};
    for (std::size_t i = 1;; ++i) {
        double t = start + static_cast<double>(i) / per_year;
        if (t >= end - TimeGrid::tolerance) break;
        out.push_back(t);
    }
    out.push_back(end);
    return out;
}

}  // namespace collat
