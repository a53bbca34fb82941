#include "collat/pricing.hpp"

#include <cmath>
#include <iostream>

#include "collat/errors.hpp"
#include "quadrature.hpp"

namespace collat {

void stderr_warning_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void check_cash(const DividendSchedule& s) {
    if (!s.deterministic_cash()) throw UnsupportedError("analytic forwards need deterministic cash dividend amounts");
}

// P^{r-q}_t(u)
double carry_df(const RateCurve& r, const RateCurve& q, double t, double u) {
    return std::exp(-(r.integral(t, u) - q.integral(t, u)));
}

}  // namespace

double forward_price(double spot, const DividendSchedule& schedule, const RateCurve& r, double t, double T,
                     const WarningSink& warn) {
    if (t < 0.0 || T < t) throw DomainError("forward needs 0 <= t <= T");
    check_cash(schedule);
    double pv = 0.0;
    for (const CashDividend& d : schedule.cash)
        if (d.time > t && d.time <= T) pv += carry_df(r, schedule.proportional, t, d.time) * d.amount;
    double fwd = (spot - pv) / carry_df(r, schedule.proportional, t, T);
    if (!(fwd > 0.0) && warn)
        warn("forward " + std::to_string(fwd) + " is not positive: cash dividends exceed the spot, so the asset "
             "cannot stay non-negative under this schedule");
    return fwd;
}

double black_option(double forward, double strike, double sigma, double expiry, double df, bool call) {
    if (!(forward > 0.0) || !(strike > 0.0) || !(df > 0.0) || sigma < 0.0 || expiry < 0.0)
        throw DomainError("black formula needs F, K, df > 0 and sigma, T >= 0");
    double sd = sigma * std::sqrt(expiry);
    if (sd == 0.0) return df * std::max(call ? forward - strike : strike - forward, 0.0);
    double d1 = std::log(forward / strike) / sd + 0.5 * sd;
    double d2 = d1 - sd;
    if (call) return df * (forward * normal_cdf(d1) - strike * normal_cdf(d2));
    return df * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
}

const char* to_string(ContractKind kind) {
    switch (kind) {
        case ContractKind::EuropeanOption: return "european-option";
        case ContractKind::CallStrip: return "call-strip";
        case ContractKind::ForwardContract: return "forward-contract";
        case ContractKind::FxForward: return "fx-forward";
        case ContractKind::Repo: return "repo";
        case ContractKind::SecuritiesLending: return "securities-lending";
        case ContractKind::Futures: return "futures";
        case ContractKind::QuantoForward: return "quanto-forward";
    }
    return "?";
}

ContractKind contract_kind_from_string(const std::string& s) {
    for (auto k : {ContractKind::EuropeanOption, ContractKind::CallStrip, ContractKind::ForwardContract,
                   ContractKind::FxForward, ContractKind::Repo, ContractKind::SecuritiesLending, ContractKind::Futures,
                   ContractKind::QuantoForward})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown contract kind '" + s + "'");
}

void ContractSpec::validate() const {
    auto fail = [this](const std::string& msg) { throw ValidationError("contract '" + id + "': " + msg); };
    if (!(maturity > 0.0)) fail("maturity must be > 0");
    if (payment_lag < 0.0) fail("payment lag must be >= 0");
    if (!std::isfinite(notional)) fail("notional must be finite");
    for (std::size_t i = 1; i < fixings.size(); ++i)
        if (!(fixings[i] > fixings[i - 1])) fail("fixings must be ascending");
    for (double f : fixing_times()) {
        if (f < 0.0) fail("fixings must be >= 0");
        if (f + payment_lag > maturity + 1e-12) fail("maturity must cover every fixing plus the payment lag");
    }
    if (kind == ContractKind::EuropeanOption && fixings.size() > 1) fail("a european option has one fixing");
    if (delivery < 0.0 || delivery > maturity + 1e-12) fail("delivery date must lie in (0, maturity]");
}

std::vector<double> ContractSpec::fixing_times() const {
    if (fixings.empty()) return {maturity};
    return fixings;
}

PriceReport csa_price(const ContractSpec& contract, const RateCurve& z, std::span<const double> expectations, double t) {
    contract.validate();
    auto fix = contract.fixing_times();
    if (expectations.size() != fix.size())
        throw ValidationError("contract '" + contract.id + "': one payoff expectation per fixing is required");
    PriceReport rep;
    rep.currency = contract.currency;
    rep.method = "analytic";
    for (std::size_t j = 0; j < fix.size(); ++j) {
        double pay = fix[j] + contract.payment_lag;
        if (pay <= t) continue;
        rep.value += discount_factor(z, t, pay) * expectations[j];
    }
    rep.value *= contract.notional;
    return rep;
}

double collateralized_forward(double value, std::span<const ExpectedFlow> flows, const RateCurve& z, double t, double U) {
    if (t < 0.0 || U < t) throw DomainError("forward needs 0 <= t <= U");
    double pv = 0.0;
    for (const ExpectedFlow& f : flows)
        if (f.time > t && f.time <= U) pv += discount_factor(z, t, f.time) * f.amount;
    return (value - pv) / discount_factor(z, t, U);
}

double fx_forward(double spot, const RateCurve& r_xb, const RateCurve& r_fb, double t, double U) {
    return spot * discount_factor(r_xb, t, U) / discount_factor(r_fb, t, U);
}

double quanto_forward(double value, std::span<const ExpectedFlow> dividends, const RateCurve& rho, const RateCurve& r_fb,
                      double t, double U) {
    return collateralized_forward(value, dividends, r_fb - rho, t, U);
}

RepoResult repo_value_and_forward(double spot, const RateCurve& kappa, const RateCurve& c, const RateCurve& r,
                                  double alpha, std::span<const ExpectedFlow> coupons, double t, double T, double U,
                                  std::optional<double> expectation) {
    if (alpha < 0.0) throw ValidationError("repo haircut alpha must be >= 0");
    if (t < 0.0 || U < t || T < U) throw DomainError("repo needs 0 <= t <= U <= T");
    const double loan = spot / (1.0 + alpha);

    // int_t^v P^c_t(u) {E[dPhi_u] + alpha X_u (c_u - r_u) du}, X_u = loan B^kappa_u / B^kappa_t
    auto carry = [&](double v) {
        double sum = 0.0;
        for (const ExpectedFlow& f : coupons)
            if (f.time > t && f.time <= v) sum += discount_factor(c, t, f.time) * f.amount;
        if (alpha != 0.0) {
            std::vector<double> knots = c.pillars();
            knots.insert(knots.end(), r.pillars().begin(), r.pillars().end());
            knots.insert(knots.end(), kappa.pillars().begin(), kappa.pillars().end());
            sum += detail::integrate(
                [&](double u) {
                    return discount_factor(c, t, u) * alpha * loan * std::exp(kappa.integral(t, u)) * (c.rate(u) - r.rate(u));
                },
                t, v, std::move(knots));
        }
        return sum;
    };
    auto forward_at = [&](double v) {
        double pc = discount_factor(c, t, v);
        return loan * (1.0 / discount_factor(kappa, t, v) + alpha / pc) - carry(v) / pc;
    };

    RepoResult out;
    out.forward = forward_at(U);
    double e = expectation ? *expectation : discount_factor(c, t, T) * forward_at(T) + carry(T);
    out.value = (1.0 + alpha) / (discount_factor(c, t, T) / discount_factor(kappa, t, T) + alpha) * e;
    out.residual = spot - out.value;
    return out;
}

double sec_lending_forward(double spot, const RateCurve& z, const DividendSchedule& dividends, double t, double U) {
    return forward_price(spot, dividends, z, t, U);
}

double sec_lending_forward_proportional(double spot, const RateCurve& q, const RateCurve& ell, const RateCurve& r,
                                        double t, double U) {
    return spot * std::exp(-(q.integral(t, U) + ell.integral(t, U))) / discount_factor(r, t, U);
}

double futures_price(double spot, const DividendSchedule& schedule, const RateCurve& r, double t, double T) {
    return forward_price(spot, schedule, r, t, T);
}

CsaEuropeanMark::CsaEuropeanMark(const ContractSpec& contract, double sigma, RateCurve z, RateCurve r_num,
                                 DividendSchedule dividends)
    : contract_(contract), sigma_(sigma), z_(std::move(z)), r_num_(std::move(r_num)), dividends_(std::move(dividends)) {
    contract_.validate();
    if (contract_.kind != ContractKind::EuropeanOption || contract_.payment_lag != 0.0)
        throw UnsupportedError("CSA marks are implemented for european options without payment lag");
    check_cash(dividends_);
}

double CsaEuropeanMark::payoff(double spot) const {
    double k = contract_.strike;
    return contract_.notional * std::max(contract_.call ? spot - k : k - spot, 0.0);
}

double CsaEuropeanMark::operator()(double t, double spot) const {
    const double T = contract_.maturity;
    if (t >= T) return payoff(spot);
    double fwd = forward_price(spot, dividends_, r_num_, t, T, {});
    double df = discount_factor(z_, t, T);
    if (!(fwd > 0.0)) return contract_.call ? 0.0 : contract_.notional * df * (contract_.strike - fwd);
    return contract_.notional * black_option(fwd, contract_.strike, sigma_, T - t, df, contract_.call);
}

}  // namespace collat
