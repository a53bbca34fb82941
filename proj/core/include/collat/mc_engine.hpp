#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collat/collateral.hpp"
#include "collat/curves.hpp"
#include "collat/dividends.hpp"
#include "collat/models.hpp"
#include "collat/pricing.hpp"
#include "collat/stats.hpp"

namespace collat {

/// Relative floor added to statistical gates so that runs with (numerically) zero variance
/// are judged on floating-point noise rather than an exact zero.
inline constexpr double kMartingaleFloor = 1e-12;

struct NumeraireSpec {
    enum class Kind { Bank, Curve, Driver };
    Kind kind = Kind::Bank;
    std::string id;

    static NumeraireSpec bank() { return {}; }
    static NumeraireSpec curve(std::string id) { return {Kind::Curve, std::move(id)}; }
    static NumeraireSpec driver(std::string id) { return {Kind::Driver, std::move(id)}; }
};

/// G~_t = S_t/beta_t + dividends/beta_{u-} + covariation correction, row-major per path.
struct DeflatedGain {
    std::size_t n_paths = 0;
    std::size_t n_times = 0;
    bool antithetic = false;
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> deflated;
    std::vector<double> dividends;
    std::vector<double> covariation;

    double at(std::size_t p, std::size_t k) const { return value[p * n_times + k]; }
};

/// Gain of an asset driver with its own dividend schedule and realized cash amounts.
DeflatedGain deflated_gain(const PathSet& paths, const std::string& asset, const NumeraireSpec& numeraire,
                           const CurveSet& curves);

struct MartingaleRow {
    double time = 0.0;
    double drift = 0.0;
    double se = 0.0;
    bool pass = false;
};

struct MartingaleReport {
    std::vector<MartingaleRow> rows;
    std::size_t n_paths = 0;
    bool pass = false;
};

/// Streams G~_t - G~_0 statistics at fixed grid indices across path blocks.
class MartingaleAccumulator {
public:
    MartingaleAccumulator() = default;
    MartingaleAccumulator(const TimeGrid& grid, std::span<const double> times);

    void add(const DeflatedGain& gain);
    void merge(const MartingaleAccumulator& other);
    /// pass iff |drift| <= 3 SE + kMartingaleFloor max(1, |G~_0|) at every time.
    MartingaleReport finish() const;

private:
    std::vector<double> times_;
    std::vector<std::size_t> index_;
    std::vector<RunningStats> stats_;
    double g0_ = 0.0;
    std::size_t n_ = 0;
};

MartingaleReport martingale_diagnostic(const DeflatedGain& gain, const TimeGrid& grid, std::span<const double> times);

/// Buy-and-hold ledger of one share with dividends swept into the bank account; returns the
/// relative residual (Y~_t - phi0_0 - G~_t) / |G~_t| row-major per path.
std::vector<double> self_financing_replication(const PathSet& paths, const std::string& asset, const CurveSet& curves);

using MarkFunction = std::function<double(double t, double spot)>;

/// Curves and drivers a CSA valuation needs besides the CsaSpec.
struct CsaContext {
    RateCurve ell;                   // proportional dividend of the derivative
    std::optional<RateCurve> r_gb;   // collateral basis rate; absent: numeraire rate (single currency)
    std::string fx_driver;           // X^{gf} driver; empty when g equals the cash-flow currency
    double analytic = 0.0;           // analytic V_0 used by the P&L estimator
};

struct PriceMcAccumulator {
    RunningStats formula;    // (a)
    RunningStats pnl;        // (b)
    RunningStats residual;   // a - b - analytic - approximation term
    RunningStats approx;     // discrete-margination approximation term
    std::size_t n_paths = 0;

    void merge(const PriceMcAccumulator& other);
};

struct PriceMcResult {
    McEstimate price;     // (a)
    McEstimate pnl;       // (b), about 0
    McEstimate residual;  // with common random numbers, mean 0
    McEstimate approx;
    bool estimators_agree = false;  // |residual| <= 3 SE + 1e-9 |analytic|
};

/// Per-block evaluation of both CSA estimators for a European contract with marks from `mark`.
PriceMcAccumulator price_mc_block(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa,
                                  const MarkFunction& mark, const CsaContext& ctx);
PriceMcResult finish_price_mc(const PriceMcAccumulator& acc, double analytic, std::uint64_t seed);
PriceMcResult price_mc(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa, const MarkFunction& mark,
                       const CsaContext& ctx);

/// Bound on |E[(a)] - V_0| from marking collateral with a lag of up to one margin interval
/// plus one grid step: (ell_max + (1+alpha_max)|c - r_gb|_max) V_0 e^{|z-r| T}
/// (e^{|z| lag} - 1) T.
double margination_bias_bound(const CsaSpec& csa, const CsaContext& ctx, const RateCurve& z, const RateCurve& r_num,
                              double value, double maturity, const TimeGrid& grid);

/// Derivative gain V_t/B_t + int [ell V - X C (c - r_gb)]/B du with collateral at target.
DeflatedGain csa_deflated_gain(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa,
                               const MarkFunction& mark, const CsaContext& ctx);

enum class ForwardMode { TForward, RiskNeutral };

struct ForwardAccumulator {
    RunningStats t_forward;     // S_T / (B_T P_0(T))
    RunningStats risk_neutral;  // S_T
    RunningStats difference;    // S_T - S_T / (B_T P_0(T))
    RunningStats inv_bank;      // 1 / B_T
    double sum_s = 0.0, sum_inv_b = 0.0, sum_s_inv_b = 0.0;
    std::size_t n_paths = 0;

    void merge(const ForwardAccumulator& other);
    /// Sample covariance of (S_T, 1/B_T).
    double covariance() const;
};

ForwardAccumulator forward_block(const PathSet& paths, const std::string& asset, double T, double zcb);
McEstimate forward_mc(const PathSet& paths, const std::string& asset, double T, ForwardMode mode, double zcb);

struct ConvergenceRow {
    std::string label;
    double per_year = 0.0;  // 0 for continuous margining
    double bias = 0.0;      // mean (a) - analytic
    double bias_se = 0.0;
    double crn_bias = 0.0;  // mean (a_freq - a_continuous) on the same paths
    double crn_se = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  // coarse to fine, then continuous
    bool monotone = false;
};

struct MarginFrequency {
    std::string label;
    double per_year = 0.0;
    bool operator==(const MarginFrequency&) const = default;
};

/// Evaluates the formula estimator for every frequency and for continuous margining on the
/// same paths; monotone iff |crn_bias| is non-increasing from coarse to fine within one SE.
ConvergenceReport margination_convergence(const Simulator& sim, const SimulationConfig& cfg,
                                          const ContractSpec& contract, const CsaSpec& csa,
                                          const std::vector<MarginFrequency>& frequencies, const MarkFunction& mark,
                                          const CsaContext& ctx, double analytic);

struct PnlResult {
    McEstimate estimate;
    bool pass = false;
};

/// Mean discounted P&L with SE; pass iff |mean| <= 3 SE (+ floating floor `scale` 1e-12).
PnlResult pnl_zero_test(const RunningStats& stats, std::size_t n_paths, std::uint64_t seed, double scale = 1.0);
PnlResult pnl_zero_test(std::span<const double> legs, bool antithetic, std::uint64_t seed, double scale = 1.0);

struct RepoTerms {
    RateCurve kappa;
    RateCurve c;
    double alpha = 0.0;
    std::vector<double> margin_times;  // from 0 to maturity
};

/// Discounted P&L of the repo seller per path (one collateral share, cash margining to
/// (1+alpha) X_{t_i}, loan X_u = S_0/(1+alpha) B^kappa_u).
std::vector<double> repo_seller_pnl(const PathSet& paths, const std::string& asset, const RepoTerms& terms);

struct LendingTerms {
    RateCurve ell;
    RateCurve c;
    double alpha = 0.0;
    std::vector<double> margin_times;
};

/// Discounted P&L of the stock lender per path with cash collateral (1+alpha) S_{t_i-}.
std::vector<double> lender_pnl(const PathSet& paths, const std::string& asset, const LendingTerms& terms);

struct FuturesTerms {
    RateCurve c;
    double initial_margin = 0.0;  // flat initial margin
    std::vector<double> margin_times;
};

/// Discounted P&L of a long futures investor with quotes f_t = forward_price(S_t, ...).
std::vector<double> futures_investor_pnl(const PathSet& paths, const std::string& asset, const FuturesTerms& terms,
                                         const RateCurve& r, double maturity);

}  // namespace collat
