#pragma once

#include <span>
#include <string>
#include <vector>

#include "collat/curves.hpp"

namespace collat {

/// Cash collateral agreement. Re-hypothecation is always assumed.
struct CsaSpec {
    std::string currency;           // g
    RateCurve remuneration;         // c^g
    RateCurve haircut;              // alpha, a deterministic curve
    std::vector<double> margin_times;  // t_0 < ... < t_N, ignored when continuous
    bool continuous = false;        // margin at every grid point

    /// Throws ValidationError when alpha < 0 somewhere or the margin times are not increasing.
    void validate() const;

    bool operator==(const CsaSpec& other) const = default;
};

/// Flows are cash received by the holder of the collateral account.
struct CollateralLedger {
    std::vector<double> times;
    std::vector<double> account;     // C_{t_i} after the call
    std::vector<double> posting;     // opening C_0, then C_i - C_{i-1}(1 + c_{i-1} dt_i)
    std::vector<double> accrual;     // c_{i-1} C_{i-1} dt_i (0 at t_0); simple compounding
    double closing = 0.0;            // unwind flow at t_N
    std::vector<double> variation_margin;  // futures only: f_i - f_{i-1}
};

/// Margin calls to the target (1 + alpha_{t_i}) mark_i fx_i, where mark_i and fx_i are the
/// left-limit values at t_i. `fx` (X^{fg}) may be empty when g equals the cash-flow currency.
CollateralLedger evolve_collateral(const CsaSpec& csa, std::span<const double> times,
                                   std::span<const double> marks, std::span<const double> fx = {});

/// Sum over i >= 1 of (C_i - C_{i-1} - c_{i-1} C_{i-1} dt_i) / B_{t_i} with `bank` at margin times.
double discounted_collateral_flows(const CollateralLedger& ledger, std::span<const double> bank);

/// Futures account: C_i = C_{i-1}(1 + c dt) + (I_i - I_{i-1}) + (f_i - f_{i-1}), C_0 = I_0.
/// Investor flows are -I_0 at t_0 and -(I_i - I_{i-1}) afterwards; the closing flow is +C_N.
CollateralLedger futures_margin_account(std::span<const double> initial_margin,
                                        std::span<const double> quotes, const RateCurve& c,
                                        std::span<const double> times);

}  // namespace collat
