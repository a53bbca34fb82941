#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "collat/errors.hpp"
#include "collat/mc_engine.hpp"
#include "collat/runner.hpp"

using namespace collat;
namespace fs = std::filesystem;

namespace {

// Pinned gates.
constexpr double kSeMultiple = 3.0;
constexpr std::size_t kPaths = 200000;
constexpr double kMartingaleSeconds = 30.0;
constexpr double kCsaSeconds = 60.0;
constexpr double kExactTol = 1e-12;
constexpr std::size_t kReplicationPaths = 1000;
constexpr std::size_t kNonNegPaths = 100000;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double x, double target, double se, double extra = 0.0) {
    return std::abs(x - target) <= kSeMultiple * se + extra;
}

// Independent closed forms for the oracles.
double ncdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double black_call(double F, double K, double vol_sqrt_t, double df) {
    double d1 = std::log(F / K) / vol_sqrt_t + 0.5 * vol_sqrt_t;
    return df * (F * ncdf(d1) - K * ncdf(d1 - vol_sqrt_t));
}

CurveSet flat_curves(double r) {
    CurveSet cs("EUR");
    cs.set("r", RateCurve::flat(r));
    return cs;
}

DriverSpec asset(const std::string& id, double s0, double sigma) {
    DriverSpec d;
    d.id = id;
    d.initial = s0;
    d.sigma = sigma;
    return d;
}

void add_jumps(DriverSpec& d) {
    d.jump_intensity = 0.5;
    d.jump_mean = -0.05;
    d.jump_stdev = 0.1;
}

DriverSpec vasicek(double r0) {
    DriverSpec d;
    d.id = "rate";
    d.kind = DriverKind::VasicekShortRate;
    d.initial = r0;
    d.mean_reversion = 0.1;
    d.long_run = 0.03;
    d.sigma = 0.01;
    return d;
}

SimulationConfig config(std::size_t n) {
    SimulationConfig cfg;
    cfg.n_paths = n;
    cfg.seed = kSeed;
    return cfg;
}

ContractSpec call_contract() {
    ContractSpec k;
    k.id = "call";
    k.underlying = "S";
    k.strike = 100.0;
    k.maturity = 1.0;
    return k;
}

const std::vector<double> kFiveTimes{0.2, 0.4, 0.6, 0.8, 1.0};

struct GateStats {
    double worst_ratio = 0.0;
    bool pass = true;
};

void track(GateStats& g, const MartingaleReport& r) {
    g.pass = g.pass && r.pass;
    for (const auto& row : r.rows) g.worst_ratio = std::max(g.worst_ratio, std::abs(row.drift) / std::max(row.se, 1e-300));
}

MartingaleReport run_martingale(const std::vector<DriverSpec>& drivers, const CorrelationMatrix& corr,
                                const MeasureTag& m, const CurveSet& cs, const NumeraireSpec& num) {
    std::vector<double> events = kFiveTimes;
    for (const auto& d : drivers)
        for (double t : d.dividends.event_times()) events.push_back(t);
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0, events);
    Simulator sim(drivers, corr, m, cs, g);
    return sim.map_blocks<MartingaleAccumulator>(config(kPaths), [&](const PathSet& ps) {
        MartingaleAccumulator acc(g, kFiveTimes);
        acc.add(deflated_gain(ps, "S", num, cs));
        return acc;
    }).finish();
}

std::vector<DividendSchedule> dividend_cases() {
    DividendSchedule none, q, cash;
    q.proportional = RateCurve::flat(0.02);
    cash.cash = {{0.5, 2.0}};
    return {none, q, cash};
}

Outcome criterion1() {
    CurveSet cs = flat_curves(0.03);
    GateStats g;
    double slowest = 0.0;
    int cases = 0;
    for (bool jumps : {false, true})
        for (const DividendSchedule& div : dividend_cases()) {
            DriverSpec s = asset("S", 100.0, 0.2);
            if (jumps) add_jumps(s);
            s.dividends = div;
            auto t0 = std::chrono::steady_clock::now();
            track(g, run_martingale({s}, CorrelationMatrix(1), MeasureTag::risk_neutral(), cs, NumeraireSpec::bank()));
            double secs = seconds_since(t0);
            slowest = std::max(slowest, secs);
            g.pass = g.pass && secs <= kMartingaleSeconds;
            ++cases;
        }
    return {g.pass, fmt("%d cases, worst |drift|/SE %.2f, slowest case %.1f s (limit %.0f s)", cases, g.worst_ratio,
                        slowest, kMartingaleSeconds)};
}

Outcome criterion2() {
    CurveSet cs = flat_curves(0.03);
    GateStats g;
    CorrelationMatrix corr(2);
    corr.set(0, 1, 0.4);
    for (bool jump_numeraire : {false, true}) {
        DriverSpec beta = asset("beta", 1.0, 0.15);
        if (jump_numeraire) add_jumps(beta);
        DriverSpec s = asset("S", 100.0, 0.2);
        add_jumps(s);
        s.dividends.proportional = RateCurve::flat(0.02);
        s.dividends.cash = {{0.5, 2.0}};
        track(g, run_martingale({beta, s}, corr, MeasureTag::asset_numeraire("beta"), cs, NumeraireSpec::driver("beta")));
    }
    return {g.pass, fmt("diffusive and jump numeraire, rho 0.4, worst |drift|/SE %.2f", g.worst_ratio)};
}

struct PricePair {
    PriceMcAccumulator daily, continuous;
    void merge(const PricePair& o) {
        daily.merge(o.daily);
        continuous.merge(o.continuous);
    }
};

Outcome criterion3() {
    const double r = 0.03, c = 0.01, alpha = 0.1, ell = 0.005, T = 1.0;
    const double z = (1 + alpha) * c - (alpha * r + ell);
    const double oracle = black_call(100.0 * std::exp(r * T), 100.0, 0.2 * std::sqrt(T), std::exp(-z * T));
    RateCurve zc = blended_rate(BlendVariant::SingleCcy, RateCurve::flat(alpha), RateCurve::flat(c), RateCurve::flat(r),
                                RateCurve::flat(r), RateCurve::flat(ell));
    ContractSpec k = call_contract();
    CsaEuropeanMark mark(k, 0.2, zc, RateCurve::flat(r), {});
    double undiscounted = black_call(100.0 * std::exp(r), 100.0, 0.2, 1.0);
    std::vector<double> expectation{undiscounted};
    double analytic = csa_price(k, zc, expectation).value;
    bool analytic_ok = std::abs(analytic - oracle) <= kExactTol * oracle && std::abs(mark(0.0, 100.0) - oracle) <= kExactTol * oracle;

    CsaSpec daily;
    daily.currency = "EUR";
    daily.remuneration = RateCurve::flat(c);
    daily.haircut = RateCurve::flat(alpha);
    daily.margin_times = periodic_times(0.0, T, 252.0);
    CsaSpec cont = daily;
    cont.continuous = true;
    CsaContext ctx;
    ctx.ell = RateCurve::flat(ell);
    ctx.analytic = analytic;
    MarkFunction f = [&](double t, double s) { return mark(t, s); };
    TimeGrid g = TimeGrid::uniform_with_events(T, 504.0, daily.margin_times);
    std::vector<DriverSpec> drivers{asset("S", 100.0, 0.2)};
    Simulator sim(drivers, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(r), g);
    auto t0 = std::chrono::steady_clock::now();
    PricePair acc = sim.map_blocks<PricePair>(config(kPaths), [&](const PathSet& ps) {
        return PricePair{price_mc_block(k, ps, daily, f, ctx), price_mc_block(k, ps, cont, f, ctx)};
    });
    double secs = seconds_since(t0);
    PriceMcResult d = finish_price_mc(acc.daily, analytic, kSeed);
    PriceMcResult cr = finish_price_mc(acc.continuous, analytic, kSeed);
    double bound = margination_bias_bound(daily, ctx, zc, RateCurve::flat(r), analytic, T, g);
    bool ok = analytic_ok && within(d.price.mean, analytic, d.price.se, bound) && within(cr.price.mean, analytic, cr.price.se) &&
              d.estimators_agree && cr.estimators_agree && secs <= kCsaSeconds;
    return {ok, fmt("z %.4f%%, analytic %.6f, daily %.8f (SE %.4f, bias bound %.2e), continuous %.8f (SE %.4f), %.1f s",
                    100 * z, analytic, d.price.mean, d.price.se, bound, cr.price.mean, cr.price.se, secs)};
}

Outcome criterion4() {
    CurveSet cs("EUR");
    cs.set("r", RateCurve::flat(0.02));
    cs.set(basis_curve_id("USD"), RateCurve::flat(-0.01));
    cs.set(basis_curve_id("GBP"), RateCurve::flat(0.005));
    const RateCurve r_fb = basis_rate(cs, "USD"), r_gb = basis_rate(cs, "GBP"), c = RateCurve::flat(0.03);
    const double T = 1.0;
    RateCurve z = blended_rate(BlendVariant::ForeignMeasure, RateCurve(), c, r_gb, r_fb, RateCurve());
    double pz = discount_factor(z, 0.0, T);
    double decomposition = discount_factor(c, 0.0, T) * discount_factor(r_fb, 0.0, T) / discount_factor(r_gb, 0.0, T);
    double dec_err = std::abs(pz - decomposition) / pz;
    const double oracle = black_call(100.0 * std::exp(0.03 * T), 100.0, 0.2, std::exp(-(0.03 - 0.015 + 0.03) * T));

    DriverSpec s = asset("S", 100.0, 0.2);
    s.currency = "USD";
    DriverSpec x = asset("GBPUSD", 1.25, 0.1);
    x.kind = DriverKind::LognormalFx;
    x.currency = "GBP";
    x.fx_to = "USD";
    CorrelationMatrix corr(2);
    corr.set(0, 1, 0.3);
    ContractSpec k = call_contract();
    k.currency = "USD";
    CsaSpec csa;
    csa.currency = "GBP";
    csa.remuneration = c;
    csa.continuous = true;
    CsaEuropeanMark mark(k, 0.2, z, r_fb, {});
    MarkFunction f = [&](double t, double v) { return mark(t, v); };
    CsaContext ctx;
    ctx.r_gb = r_gb;
    ctx.fx_driver = "GBPUSD";
    ctx.analytic = mark(0.0, 100.0);
    TimeGrid g = TimeGrid::uniform_with_events(T, 252.0);
    std::vector<DriverSpec> drivers{s, x};
    Simulator sim(drivers, corr, MeasureTag::foreign_basis("USD"), cs, g);
    auto acc = sim.map_blocks<PriceMcAccumulator>(config(kPaths), [&](const PathSet& ps) {
        return price_mc_block(k, ps, csa, f, ctx);
    });
    PriceMcResult res = finish_price_mc(acc, ctx.analytic, kSeed);
    double spread = c.rate(0.0) - r_gb.rate(0.0);
    bool ok = std::abs(ctx.analytic - oracle) <= kExactTol * oracle && within(res.price.mean, ctx.analytic, res.price.se) &&
              res.estimators_agree && dec_err <= kExactTol && std::abs(spread - 0.015) < 1e-15;
    return {ok, fmt("c-r_gb %.0f bp, analytic %.6f, MC %.6f (SE %.4f), decomposition rel err %.1e", spread * 1e4,
                    ctx.analytic, res.price.mean, res.price.se, dec_err)};
}

struct StatsPack {
    std::vector<RunningStats> s;
    void merge(const StatsPack& o) {
        if (s.empty()) {
            s = o.s;
            return;
        }
        for (std::size_t i = 0; i < s.size(); ++i) s[i].merge(o.s[i]);
    }
};

Outcome criterion5() {
    const double T = 1.0;
    DriverSpec s = asset("S", 100.0, 0.2);
    s.dividends.cash = {{0.5, 2.0}};
    CorrelationMatrix corr(2);
    corr.set(0, 1, 0.3);
    TimeGrid g = TimeGrid::uniform_with_events(T, 252.0, {0.5});
    CurveSet cs = flat_curves(0.03);
    std::vector<DriverSpec> drivers{vasicek(0.03), s};
    Simulator sim(drivers, corr, MeasureTag::risk_neutral(), cs, g);
    const double P = vasicek_zcb(0.1, 0.03, 0.01, 0.03, 0.0, T);
    auto acc = sim.map_blocks<StatsPack>(config(kPaths), [&](const PathSet& ps) {
        DeflatedGain gain = deflated_gain(ps, "S", NumeraireSpec::bank(), cs);
        std::vector<double> div_fwd(ps.n_paths()), tfwd(ps.n_paths()), diff(ps.n_paths()), inv(ps.n_paths());
        const std::size_t K = g.size() - 1;
        for (std::size_t p = 0; p < ps.n_paths(); ++p) {
            div_fwd[p] = (100.0 - gain.dividends[p * g.size() + K]) / P;
            tfwd[p] = gain.deflated[p * g.size() + K] / P;
            diff[p] = div_fwd[p] - tfwd[p];
            inv[p] = 1.0 / ps.bank(p, K);
        }
        StatsPack out;
        out.s.resize(4);
        add_paths(out.s[0], div_fwd, ps.antithetic());
        add_paths(out.s[1], tfwd, ps.antithetic());
        add_paths(out.s[2], diff, ps.antithetic());
        add_paths(out.s[3], inv, ps.antithetic());
        return out;
    });
    bool fwd_ok = within(acc.s[2].mean(), 0.0, acc.s[2].se());
    bool zcb_ok = within(acc.s[3].mean(), P, acc.s[3].se());
    return {fwd_ok && zcb_ok, fmt("(S0-V^D)/P %.5f vs E[S/B]/P %.5f (diff SE %.4f); ZCB MC %.7f vs %.7f (SE %.1e)",
                                  acc.s[0].mean(), acc.s[1].mean(), acc.s[2].se(), acc.s[3].mean(), P, acc.s[3].se())};
}

Outcome criterion6() {
    DriverSpec s = asset("S", 100.0, 0.2);
    add_jumps(s);
    s.dividends.cash = {{0.3, 2.0, 0.01}, {0.7, 1.5}};
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0, {0.3, 0.7});
    CurveSet cs = flat_curves(0.03);
    PathSet ps = simulate({s}, CorrelationMatrix(1), MeasureTag::risk_neutral(), cs, g, kReplicationPaths, kSeed);
    double repl = 0.0, tr = 0.0;
    for (double v : self_financing_replication(ps, "S", cs)) repl = std::max(repl, std::abs(v));
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        auto a = total_return(s.dividends, g, ps.values(0, p), ps.paid(0, p));
        auto b = total_return_recursive(s.dividends, g, ps.values(0, p), ps.paid(0, p));
        for (std::size_t k = 0; k < a.size(); ++k) tr = std::max(tr, std::abs(a[k] - b[k]) / std::abs(a[k]));
    }
    return {repl <= kExactTol && tr <= kExactTol,
            fmt("%zu paths, max replication residual %.1e, max total-return residual %.1e", kReplicationPaths, repl, tr)};
}

Outcome criterion7() {
    const RateCurve r = RateCurve::flat(0.03);
    NonNegAssetSpec spec;
    spec.spot = 100.0;
    spec.schedule.cash = {{0.25, 5.0}, {0.75, 5.0}};
    spec.schedule.horizon = 1.0;
    spec.martingale_driver = "M";
    DriverSpec m = asset("M", 1.0, 0.2);
    m.kind = DriverKind::ExponentialMartingale;
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0, {0.25, 0.75});
    PathSet ps = simulate({m}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03), g, kNonNegPaths, kSeed);
    const std::size_t n = g.size();
    std::vector<double> S = build_nonneg_asset(spec, r, g, std::span<const double>(ps.values(0, 0).data(), kNonNegPaths * n),
                                               kNonNegPaths);
    std::vector<double> vd(n);
    for (std::size_t k = 0; k < n; ++k) vd[k] = pv_future_dividends(spec.schedule, r, g[k], 1.0);
    std::size_t violations = 0, negative_forwards = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (forward_price(spec.spot, spec.schedule, r, 0.0, g[k], {}) < 0.0) ++negative_forwards;
    std::vector<double> smart(kNonNegPaths);
    for (std::size_t p = 0; p < kNonNegPaths; ++p) {
        for (std::size_t k = 0; k < n; ++k) {
            double x = S[p * n + k];
            if (x - vd[k] < 0.0) ++violations;
            if (forward_price(x, spec.schedule, r, g[k], 1.0, {}) < 0.0) ++negative_forwards;
        }
        smart[p] = S[p * n + n - 1] * std::exp(-0.03) + 5.0 * std::exp(-0.03 * 0.25) + 5.0 * std::exp(-0.03 * 0.75);
    }
    RunningStats st;
    add_paths(st, smart, true);
    bool ok = violations == 0 && negative_forwards == 0 && within(st.mean(), spec.spot, st.se());
    return {ok, fmt("%zu paths, violations %zu, negative forwards %zu, spot check %.4f vs 100 (SE %.4f)", kNonNegPaths,
                    violations, negative_forwards, st.mean(), st.se())};
}

Outcome criterion8() {
    CurveSet cs = flat_curves(0.03);
    cs.set("repo", RateCurve::flat(0.02));
    DriverSpec s = asset("S", 100.0, 0.2);
    s.drift_source = "repo";
    s.dividends.cash = {{0.5, 2.0}};
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0, {0.5});
    std::vector<DriverSpec> drivers{s};
    Simulator sim(drivers, CorrelationMatrix(1), MeasureTag::risk_neutral(), cs, g);
    RepoTerms terms{RateCurve::flat(0.02), RateCurve::flat(0.02), 0.0, periodic_times(0.0, 1.0, 252.0)};
    auto acc = sim.map_blocks<StatsPack>(config(kPaths), [&](const PathSet& ps) {
        StatsPack out;
        out.s.resize(1);
        add_paths(out.s[0], repo_seller_pnl(ps, "S", terms), ps.antithetic());
        return out;
    });
    PnlResult pnl = pnl_zero_test(acc.s[0], kPaths, kSeed, 100.0);

    // dirty bond: price 101.3, coupons 2.5 at 0.5 and 1.0, forward date 0.75
    const double kappa = 0.025, dirty = 101.3, U = 0.75;
    std::vector<ExpectedFlow> coupons{{0.5, 2.5}, {1.0, 2.5}};
    RepoResult rr = repo_value_and_forward(dirty, RateCurve::flat(kappa), RateCurve::flat(kappa), RateCurve::flat(0.03), 0.0,
                                           coupons, 0.0, 1.0, U);
    double bond = (dirty - 2.5 * std::exp(-kappa * 0.5)) * std::exp(kappa * U);
    double bond_err = std::abs(rr.forward - bond) / bond;

    const RateCurve r = RateCurve::flat(0.03), q = RateCurve::flat(0.02), ell = RateCurve::flat(0.004);
    RateCurve z = blended_rate(BlendVariant::SecLending, RateCurve::flat(0.1), r, r, r, ell);
    DividendSchedule div;
    div.proportional = q;
    double lend_err = 0.0;
    for (double u : {0.25, 0.5, 1.0, 2.0}) {
        double a = sec_lending_forward(100.0, z, div, 0.0, u);
        double b = sec_lending_forward_proportional(100.0, q, ell, r, 0.0, u);
        lend_err = std::max(lend_err, std::abs(a - b) / b);
    }
    bool ok = pnl.pass && bond_err <= kExactTol && lend_err <= kExactTol;
    return {ok, fmt("repo P&L %.4f (SE %.4f), dirty-bond forward rel err %.1e, lending fast path rel err %.1e",
                    pnl.estimate.mean, pnl.estimate.se, bond_err, lend_err)};
}

Outcome criterion9() {
    CurveSet cs = flat_curves(0.03);
    DriverSpec s = asset("S", 100.0, 0.2);
    s.dividends.cash = {{0.5, 2.0}};
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0, {0.5});
    const double F = forward_price(100.0, s.dividends, RateCurve::flat(0.03), 0.0, 1.0, {});
    const double fut = futures_price(100.0, s.dividends, RateCurve::flat(0.03), 0.0, 1.0);
    std::vector<DriverSpec> det{s};
    Simulator sim(det, CorrelationMatrix(1), MeasureTag::risk_neutral(), cs, g);
    FuturesTerms ft{RateCurve::flat(0.03), 10.0, periodic_times(0.0, 1.0, 252.0)};
    auto acc = sim.map_blocks<StatsPack>(config(kPaths), [&](const PathSet& ps) {
        StatsPack out;
        out.s.resize(2);
        ForwardAccumulator fa = forward_block(ps, "S", 1.0, std::exp(-0.03));
        out.s[0] = fa.risk_neutral;
        add_paths(out.s[1], futures_investor_pnl(ps, "S", ft, RateCurve::flat(0.03), 1.0), ps.antithetic());
        return out;
    });
    bool det_ok = within(acc.s[0].mean(), F, acc.s[0].se()) && std::abs(fut - F) <= kExactTol * F;
    PnlResult pnl = pnl_zero_test(acc.s[1], kPaths, kSeed, 100.0);

    std::string signs;
    bool sign_ok = true;
    for (double rho : {0.5, -0.5}) {
        CorrelationMatrix corr(2);
        corr.set(0, 1, rho);
        std::vector<DriverSpec> drivers{vasicek(0.03), s};
        Simulator vs(drivers, corr, MeasureTag::risk_neutral(), cs, g);
        const double P = vasicek_zcb(0.1, 0.03, 0.01, 0.03, 0.0, 1.0);
        ForwardAccumulator fa = vs.map_blocks<ForwardAccumulator>(config(kPaths), [&](const PathSet& ps) {
            return forward_block(ps, "S", 1.0, P);
        });
        double gap = fa.difference.mean(), cov = fa.covariance();
        bool resolved = std::abs(gap) > kSeMultiple * fa.difference.se();
        bool ok = resolved && (gap > 0.0) == (cov < 0.0);
        sign_ok = sign_ok && ok;
        signs += fmt(" rho %+.1f: f-F %+.4f (SE %.4f), cov %+.4f;", rho, gap, fa.difference.se(), cov);
    }
    return {det_ok && pnl.pass && sign_ok,
            fmt("E[S_T] %.4f vs F %.4f (SE %.4f);%s investor P&L %.4f (SE %.4f)", acc.s[0].mean(), F, acc.s[0].se(),
                signs.c_str(), pnl.estimate.mean, pnl.estimate.se)};
}

Outcome criterion10() {
    const double r = 0.01, c = 0.03;
    std::vector<MarginFrequency> freqs{{"monthly", 12.0}, {"weekly", 52.0}, {"daily", 252.0}};
    std::vector<double> events;
    for (const auto& f : freqs)
        for (double t : periodic_times(0.0, 1.0, f.per_year)) events.push_back(t);
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 504.0, events);
    std::vector<DriverSpec> drivers{asset("S", 100.0, 0.2)};
    Simulator sim(drivers, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(r), g);
    ContractSpec k = call_contract();
    CsaEuropeanMark mark(k, 0.2, RateCurve::flat(c), RateCurve::flat(r), {});
    MarkFunction f = [&](double t, double s) { return mark(t, s); };
    CsaSpec csa;
    csa.currency = "EUR";
    csa.remuneration = RateCurve::flat(c);
    csa.continuous = true;
    CsaContext ctx;
    double analytic = black_call(100.0 * std::exp(r), 100.0, 0.2, std::exp(-c));
    ConvergenceReport rep = margination_convergence(sim, config(kPaths), k, csa, freqs, f, ctx, analytic);
    const auto& m = rep.rows[0];
    const auto& w = rep.rows[1];
    const auto& d = rep.rows[2];
    bool ordered = std::abs(d.crn_bias) <= std::abs(w.crn_bias) && std::abs(w.crn_bias) <= std::abs(m.crn_bias);
    bool raw = std::abs(w.bias) <= std::abs(m.bias) + std::max(m.bias_se, w.bias_se) &&
               std::abs(d.bias) <= std::abs(w.bias) + std::max(w.bias_se, d.bias_se);
    return {rep.monotone && ordered && raw,
            fmt("bias vs continuous: monthly %.2e (SE %.1e), weekly %.2e (SE %.1e), daily %.2e (SE %.1e); vs analytic %.4f/%.4f/%.4f (SE %.4f)",
                m.crn_bias, m.crn_se, w.crn_bias, w.crn_se, d.crn_bias, d.crn_se, m.bias, w.bias, d.bias, d.bias_se)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion11() {
    Scenario s = load_scenario(std::string(COLLAT_SCENARIO_DIR) + "/reference_verify.json");
    fs::path dir = fs::temp_directory_path() / "collat_acceptance_determinism";
    fs::remove_all(dir);
    std::ostringstream log;
    int rc[2];
    for (int i = 0; i < 2; ++i) {
        RunOptions o;
        o.out = (dir / std::to_string(i)).string();
        rc[i] = run_command(Command::Verify, s, o, log);
    }
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "0")) {
        if (!e.is_regular_file()) continue;
        ++files;
        if (slurp(e.path()) != slurp(dir / "1" / fs::relative(e.path(), dir / "0"))) ++differing;
    }
    fs::remove_all(dir);
    return {rc[0] == 0 && rc[1] == 0 && files > 1 && differing == 0,
            fmt("verify exit codes %d/%d, %zu report files compared, %zu differ", rc[0], rc[1], files, differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"martingale suite", criterion1},           {"general numeraire", criterion2},
        {"CSA discounting", criterion3},             {"cross-currency CSA", criterion4},
        {"stochastic-rate forward", criterion5},     {"replication and total return", criterion6},
        {"non-negative construction", criterion7},   {"repo and securities lending", criterion8},
        {"futures", criterion9},                     {"margination convergence", criterion10},
        {"determinism", criterion11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
