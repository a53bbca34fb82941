#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "collat/curves.hpp"
#include "collat/time_grid.hpp"

namespace collat {

/// Lump dividend at `time`. The amount paid on a path is amount + proportion * S_pre,
/// capped at the pre-dividend value S_pre so the asset never goes negative.
struct CashDividend {
    double time = 0.0;
    double amount = 0.0;
    double proportion = 0.0;

    bool operator==(const CashDividend& other) const = default;
};

struct DividendSchedule {
    RateCurve proportional;  // q
    std::vector<CashDividend> cash;
    double horizon = 0.0;    // T-hat; 0 means "last cash time"

    void validate() const;
    bool has_proportional() const;
    bool has_cash() const { return !cash.empty(); }
    bool deterministic_cash() const;
    double effective_horizon() const;
    std::vector<double> event_times() const;

    bool operator==(const DividendSchedule& other) const = default;
};

/// Amount actually paid given the pre-dividend asset value.
double realized_cash(const CashDividend& d, double pre_value);

/// D at every grid time: left-point rule for q S du plus the lump payments.
/// `paid` holds the realized amount per cash dividend; empty means the declared amounts.
std::vector<double> cumulative_dividend(const DividendSchedule& schedule, const TimeGrid& grid,
                                        std::span<const double> path,
                                        std::span<const double> paid = {});

/// V^D_t(T): discounted cash amounts in (t, T] plus the integral of P q E[S_u].
/// `expected_spot(u)` supplies E_t[S_u]; it is only called when q is non-zero.
double pv_future_dividends(const DividendSchedule& schedule, const RateCurve& discount, double t,
                           double T, const std::function<double(double)>& expected_spot = {});

struct NonNegAssetSpec {
    double spot = 0.0;
    DividendSchedule schedule;  // cash only, deterministic amounts
    std::string martingale_driver;
};

/// S0* = S0 - V^D_0(T-hat). Throws HypothesisError when it is not positive.
double inner_spot(const NonNegAssetSpec& spec, const RateCurve& discount);

/// S_t = S0* B_t M_t + V^D_t(T-hat) for a row-major block of martingale paths
/// (n_paths x grid.size()), with deterministic B from `discount`.
std::vector<double> build_nonneg_asset(const NonNegAssetSpec& spec, const RateCurve& discount,
                                       const TimeGrid& grid, std::span<const double> martingale,
                                       std::size_t n_paths);

/// S^TR_t = S_t prod_{tau_i <= t} (S_tau + phi_i)/S_tau, cash dividends only.
std::vector<double> total_return(const DividendSchedule& schedule, const TimeGrid& grid,
                                 std::span<const double> path, std::span<const double> paid = {});

/// Same portfolio evaluated by rebalancing the holding at each dividend.
std::vector<double> total_return_recursive(const DividendSchedule& schedule, const TimeGrid& grid,
                                           std::span<const double> path,
                                           std::span<const double> paid = {});

}  // namespace collat
