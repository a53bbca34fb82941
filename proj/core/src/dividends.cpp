#include "collat/dividends.hpp"

#include <algorithm>
#include <cmath>

#include "collat/errors.hpp"
#include "quadrature.hpp"

namespace collat {

void DividendSchedule::validate() const {
    for (std::size_t i = 0; i < cash.size(); ++i) {
        const CashDividend& d = cash[i];
        if (!(d.time > 0.0)) throw ValidationError("cash dividend times must be > 0");
        if (i > 0 && !(d.time > cash[i - 1].time))
            throw ValidationError("cash dividend times must be strictly increasing");
        if (!std::isfinite(d.amount) || !std::isfinite(d.proportion))
            throw ValidationError("cash dividend amounts must be finite");
        if (d.proportion < 0.0 || d.proportion >= 1.0)
            throw ValidationError("cash dividend proportion must lie in [0, 1)");
    }
    if (horizon < 0.0) throw ValidationError("dividend horizon must be >= 0");
}

bool DividendSchedule::has_proportional() const {
    return std::any_of(proportional.rates().begin(), proportional.rates().end(),
                       [](double q) { return q != 0.0; });
}

bool DividendSchedule::deterministic_cash() const {
    return std::all_of(cash.begin(), cash.end(), [](const CashDividend& d) { return d.proportion == 0.0; });
}

double DividendSchedule::effective_horizon() const {
    if (horizon > 0.0) return horizon;
    return cash.empty() ? 0.0 : cash.back().time;
}

std::vector<double> DividendSchedule::event_times() const {
    std::vector<double> out;
    for (const CashDividend& d : cash) out.push_back(d.time);
    return out;
}

double realized_cash(const CashDividend& d, double pre_value) {
    return std::min(d.amount + d.proportion * pre_value, pre_value);
}

namespace {

std::vector<std::ptrdiff_t> cash_index_by_step(const DividendSchedule& schedule, const TimeGrid& grid) {
    std::vector<std::ptrdiff_t> idx(grid.size(), -1);
    for (std::size_t i = 0; i < schedule.cash.size(); ++i) {
        if (schedule.cash[i].time > grid.horizon() + TimeGrid::tolerance) continue;
        idx[grid.index_of(schedule.cash[i].time, "cash dividend")] = static_cast<std::ptrdiff_t>(i);
    }
    return idx;
}

double paid_amount(const DividendSchedule& schedule, std::span<const double> paid, std::size_t i) {
    if (!paid.empty()) return paid[i];
    if (schedule.cash[i].proportion != 0.0)
        throw UnsupportedError("random cash amounts need the realized amounts of the path");
    return schedule.cash[i].amount;
}

void check_path(const TimeGrid& grid, std::span<const double> path) {
    if (path.size() != grid.size()) throw ValidationError("path length must match the grid");
}

}  // namespace

std::vector<double> cumulative_dividend(const DividendSchedule& schedule, const TimeGrid& grid,
                                        std::span<const double> path, std::span<const double> paid) {
    check_path(grid, path);
    auto idx = cash_index_by_step(schedule, grid);
    std::vector<double> d(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double step = path[k] * schedule.proportional.integral(grid[k], grid[k + 1]);
        if (idx[k + 1] >= 0) step += paid_amount(schedule, paid, static_cast<std::size_t>(idx[k + 1]));
        d[k + 1] = d[k] + step;
    }
    return d;
}

double pv_future_dividends(const DividendSchedule& schedule, const RateCurve& discount, double t,
                           double T, const std::function<double(double)>& expected_spot) {
    if (t < 0.0 || T < t) throw DomainError("dividend PV needs 0 <= t <= T");
    double pv = 0.0;
    for (std::size_t i = 0; i < schedule.cash.size(); ++i) {
        const CashDividend& d = schedule.cash[i];
        if (d.time <= t || d.time > T) continue;
        if (d.proportion != 0.0) throw UnsupportedError("dividend PV of random cash amounts");
        pv += discount_factor(discount, t, d.time) * d.amount;
    }
    if (!schedule.has_proportional() || T == t) return pv;
    if (!expected_spot) throw ValidationError("proportional dividends need an expected-spot rule");

    std::vector<double> knots = schedule.proportional.pillars();
    knots.insert(knots.end(), discount.pillars().begin(), discount.pillars().end());
    for (const CashDividend& d : schedule.cash) knots.push_back(d.time);
    double integral = detail::integrate(
        [&](double u) { return discount_factor(discount, t, u) * schedule.proportional.rate(u) * expected_spot(u); },
        t, T, std::move(knots));
    return pv + integral;
}

double inner_spot(const NonNegAssetSpec& spec, const RateCurve& discount) {
    spec.schedule.validate();
    if (spec.schedule.has_proportional() || !spec.schedule.deterministic_cash())
        throw HypothesisError("non-negative construction needs deterministic cash dividends only");
    double s_star = spec.spot - pv_future_dividends(spec.schedule, discount, 0.0,
                                                    spec.schedule.effective_horizon());
    if (!(s_star > 0.0)) throw HypothesisError("inner spot S0* must be positive");
    return s_star;
}

std::vector<double> build_nonneg_asset(const NonNegAssetSpec& spec, const RateCurve& discount,
                                       const TimeGrid& grid, std::span<const double> martingale,
                                       std::size_t n_paths) {
    double s_star = inner_spot(spec, discount);
    const std::size_t n = grid.size();
    if (martingale.size() != n_paths * n) throw ValidationError("martingale block has the wrong size");
    double horizon = spec.schedule.effective_horizon();

    std::vector<double> scale(n);
    std::vector<double> vd(n);
    for (std::size_t k = 0; k < n; ++k) {
        scale[k] = s_star * bank_account(discount, grid[k]);
        vd[k] = grid[k] < horizon ? pv_future_dividends(spec.schedule, discount, grid[k], horizon) : 0.0;
    }
    std::vector<double> out(n_paths * n);
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t k = 0; k < n; ++k) out[p * n + k] = scale[k] * martingale[p * n + k] + vd[k];
    return out;
}

std::vector<double> total_return(const DividendSchedule& schedule, const TimeGrid& grid,
                                 std::span<const double> path, std::span<const double> paid) {
    check_path(grid, path);
    if (schedule.has_proportional()) throw UnsupportedError("total return needs lump dividends only");
    auto idx = cash_index_by_step(schedule, grid);
    std::vector<double> out(grid.size());
    double factor = 1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (idx[k] >= 0) {
            double s = path[k];
            if (!(s > 0.0)) throw DomainError("total return needs a positive asset at dividend times");
            factor *= (s + paid_amount(schedule, paid, static_cast<std::size_t>(idx[k]))) / s;
        }
        out[k] = path[k] * factor;
    }
    return out;
}

std::vector<double> total_return_recursive(const DividendSchedule& schedule, const TimeGrid& grid,
                                           std::span<const double> path, std::span<const double> paid) {
    check_path(grid, path);
    if (schedule.has_proportional()) throw UnsupportedError("total return needs lump dividends only");
    auto idx = cash_index_by_step(schedule, grid);
    std::vector<double> out(grid.size());
    double holding = 1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (idx[k] >= 0) {
            // reinvest the dividend received on the current holding at the ex-dividend price
            double cash = holding * paid_amount(schedule, paid, static_cast<std::size_t>(idx[k]));
            if (!(path[k] > 0.0)) throw DomainError("total return needs a positive asset at dividend times");
            holding += cash / path[k];
        }
        out[k] = holding * path[k];
    }
    return out;
}

}  // namespace collat
