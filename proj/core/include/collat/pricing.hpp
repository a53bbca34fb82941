#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collat/curves.hpp"
#include "collat/dividends.hpp"

namespace collat {

using WarningSink = std::function<void(const std::string&)>;

/// Writes "warning: <message>" to stderr.
void stderr_warning_sink(const std::string& message);

/// F_t(T) = (S_t - sum P^mu_t(tau_i) phi_i) / P^mu_t(T), mu = r - q, cash amounts deterministic.
/// A non-positive forward (cash dividends worth more than the spot) is reported through `warn`.
double forward_price(double spot, const DividendSchedule& schedule, const RateCurve& r, double t, double T,
                     const WarningSink& warn = stderr_warning_sink);

/// df * Black(F, K, sigma sqrt(T)); intrinsic value when sigma or T is zero.
double black_option(double forward, double strike, double sigma, double expiry, double df, bool call);

enum class ContractKind {
    EuropeanOption,
    CallStrip,
    ForwardContract,
    FxForward,
    Repo,
    SecuritiesLending,
    Futures,
    QuantoForward,
};

const char* to_string(ContractKind kind);
ContractKind contract_kind_from_string(const std::string& s);

struct ContractSpec {
    std::string id;
    ContractKind kind = ContractKind::EuropeanOption;
    std::string underlying;   // driver id
    std::string currency;     // cash-flow currency f ("" = domestic)
    double strike = 0.0;
    std::vector<double> fixings;  // empty: a single fixing at maturity
    double payment_lag = 0.0;
    bool call = true;
    double maturity = 0.0;
    double notional = 1.0;
    double delivery = 0.0;    // forward date U for repo / forwards (0 = maturity)

    void validate() const;
    std::vector<double> fixing_times() const;
    double forward_date() const { return delivery > 0.0 ? delivery : maturity; }

    bool operator==(const ContractSpec& other) const = default;
};

struct PriceReport {
    double value = 0.0;
    std::string currency;
    std::string method;  // "analytic" or "mc"
    std::optional<double> se;
    std::map<std::string, double> diagnostics;
};

struct ExpectedFlow {
    double time = 0.0;
    double amount = 0.0;
};

/// V_t = notional * sum_j P^z_t(T_j + delta) E[phi_{T_j}] with one expectation per fixing.
PriceReport csa_price(const ContractSpec& contract, const RateCurve& z, std::span<const double> expectations,
                      double t = 0.0);

/// F^f_t(U) = [V_t - sum_{t < T_i <= U} P^z_t(T_i) E[phi_i]] / P^z_t(U).
double collateralized_forward(double value, std::span<const ExpectedFlow> flows, const RateCurve& z, double t,
                              double U);

/// X^{xf}_t(U) = X^{xf}_t P^{xb}_t(U) / P^{fb}_t(U).
double fx_forward(double spot, const RateCurve& r_xb, const RateCurve& r_fb, double t, double U);

/// Quanto forward discounted on eta = r^{fb} - rho.
double quanto_forward(double value, std::span<const ExpectedFlow> dividends, const RateCurve& rho,
                      const RateCurve& r_fb, double t, double U);

struct RepoResult {
    double value = 0.0;     // spot-consistency right-hand side
    double forward = 0.0;   // F_t(U)
    double residual = 0.0;  // spot - value
};

/// Stock-driven repo with a single collateral share, cash margining at c and repo rate kappa.
/// `expectation` is B^c_t E[S_T/B^c_T + int dPi/B^c]; when absent it is computed from the
/// deterministic-rate forward so the residual measures internal consistency.
RepoResult repo_value_and_forward(double spot, const RateCurve& kappa, const RateCurve& c, const RateCurve& r,
                                  double alpha, std::span<const ExpectedFlow> coupons, double t, double T, double U,
                                  std::optional<double> expectation = std::nullopt);

/// [S_t - sum P^z phi] / P^z_t(U) with z from the securities-lending blend; proportional q is
/// carried as in forward_price.
double sec_lending_forward(double spot, const RateCurve& z, const DividendSchedule& dividends, double t, double U);

/// S_t e^{-int (q + ell)} / P_t(U), valid when collateral is remunerated at r.
double sec_lending_forward_proportional(double spot, const RateCurve& q, const RateCurve& ell, const RateCurve& r,
                                        double t, double U);

/// Futures price under deterministic rates: identical to forward_price.
double futures_price(double spot, const DividendSchedule& schedule, const RateCurve& r, double t, double T);

/// CSA mark of a European option on a lognormal underlying: P^z_t(T) Black(F_t(T; S), K, sigma).
class CsaEuropeanMark {
public:
    CsaEuropeanMark(const ContractSpec& contract, double sigma, RateCurve z, RateCurve r_num,
                    DividendSchedule dividends);
    double operator()(double t, double spot) const;
    double payoff(double spot) const;

private:
    ContractSpec contract_;
    double sigma_;
    RateCurve z_;
    RateCurve r_num_;
    DividendSchedule dividends_;
};

}  // namespace collat
