#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "collat/models.hpp"
#include "collat/stats.hpp"

using namespace collat;

namespace {

CurveSet flat_curves(double r) {
    CurveSet cs("EUR");
    cs.set("r", RateCurve::flat(r));
    return cs;
}

DriverSpec asset(double s0, double sigma) {
    DriverSpec d;
    d.id = "S";
    d.kind = DriverKind::LognormalJumpAsset;
    d.initial = s0;
    d.sigma = sigma;
    return d;
}

DriverSpec martingale(double sigma) {
    DriverSpec d;
    d.id = "M";
    d.kind = DriverKind::ExponentialMartingale;
    d.sigma = sigma;
    return d;
}

DriverSpec vasicek(double a, double theta, double sigma, double r0) {
    DriverSpec d;
    d.id = "r";
    d.kind = DriverKind::VasicekShortRate;
    d.mean_reversion = a;
    d.long_run = theta;
    d.sigma = sigma;
    d.initial = r0;
    return d;
}

RunningStats terminal_stats(const PathSet& ps, const std::function<double(std::size_t)>& f) {
    std::vector<double> x(ps.n_paths());
    for (std::size_t p = 0; p < ps.n_paths(); ++p) x[p] = f(p);
    RunningStats st;
    add_paths(st, x, ps.antithetic());
    return st;
}

}  // namespace

TEST(Simulate, DeterministicLimit) {
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 252.0);
    PathSet ps = simulate({asset(100.0, 0.0)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03), g, 16, 1);
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        EXPECT_NEAR(ps.value(0, p, g.size() - 1), 100.0 * std::exp(0.03), 1e-11);
        EXPECT_NEAR(ps.log_bank(p).back(), 0.03, 1e-15);
    }
}

TEST(Simulate, CashDividendDrop) {
    DriverSpec s = asset(100.0, 0.0);
    s.dividends.cash = {{0.5, 5.0}};
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 12.0, {0.5});
    PathSet ps = simulate({s}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 4, 1);
    for (std::size_t p = 0; p < ps.n_paths(); ++p) {
        EXPECT_EQ(ps.value(0, p, g.size() - 1), 95.0);
        EXPECT_EQ(ps.paid(0, p)[0], 5.0);
        std::size_t k = g.index_of(0.5);
        EXPECT_EQ(ps.left_limit(0, p, k), 100.0);
    }
}

TEST(Simulate, ExponentialMartingaleMean) {
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({martingale(0.3)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03), g, 20000, 9);
    auto st = terminal_stats(ps, [&](std::size_t p) { return ps.value(0, p, g.size() - 1); });
    EXPECT_LE(std::abs(st.mean() - 1.0), 3.0 * st.se());
}

TEST(Simulate, DiscountedAssetIsMartingale) {
    DriverSpec s = asset(100.0, 0.25);
    s.jump_intensity = 0.8;
    s.jump_mean = -0.1;
    s.jump_stdev = 0.15;
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({s}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03), g, 40000, 4);
    std::size_t n = g.size() - 1;
    auto st = terminal_stats(ps, [&](std::size_t p) { return ps.value(0, p, n) / ps.bank(p, n); });
    EXPECT_LE(std::abs(st.mean() - 100.0), 3.0 * st.se());
}

TEST(Simulate, FxUnderForeignBasisMeasure) {
    CurveSet cs = flat_curves(0.02);
    cs.set("basis.USD", RateCurve::flat(-0.01));
    cs.set("basis.GBP", RateCurve::flat(0.005));
    DriverSpec fx;
    fx.id = "GBPUSD";
    fx.kind = DriverKind::LognormalFx;
    fx.initial = 1.25;
    fx.sigma = 0.1;
    fx.currency = "GBP";
    fx.fx_to = "USD";
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({fx}, CorrelationMatrix(1), MeasureTag::foreign_basis("USD"), cs, g, 40000, 5);
    RateCurve rgb = basis_rate(cs, "GBP");
    std::size_t n = g.size() - 1;
    EXPECT_NEAR(ps.log_bank(0).back(), 0.03, 1e-15);
    auto st = terminal_stats(ps, [&](std::size_t p) {
        return ps.value(0, p, n) / ps.bank(p, n) * bank_account(rgb, 1.0);
    });
    EXPECT_LE(std::abs(st.mean() - 1.25), 3.0 * st.se());

    fx.fx_to = "EUR";
    EXPECT_THROW(simulate({fx}, CorrelationMatrix(1), MeasureTag::foreign_basis("USD"), cs, g, 2, 5), ValidationError);
}

TEST(Simulate, ValidationErrors) {
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 12.0);
    CorrelationMatrix bad(2);
    bad.set(0, 1, 1.0);
    DriverSpec a = asset(100.0, 0.2);
    DriverSpec b = asset(100.0, 0.2);
    b.id = "T";
    DriverSpec c = asset(100.0, 0.2);
    c.id = "U";
    CorrelationMatrix m3(3);
    m3.set(0, 1, 0.9);
    m3.set(0, 2, 0.9);
    m3.set(1, 2, -0.9);
    EXPECT_THROW(simulate({a, b, c}, m3, MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1), ValidationError);
    EXPECT_NO_THROW(simulate({a, b}, bad, MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1));

    DriverSpec div = asset(100.0, 0.2);
    div.dividends.cash = {{0.55, 1.0}};
    EXPECT_THROW(simulate({div}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1), ValidationError);

    DriverSpec neg = asset(100.0, -0.1);
    EXPECT_THROW(simulate({neg}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1), ValidationError);
    EXPECT_THROW(simulate({vasicek(0.0, 0.03, 0.01, 0.03)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1),
                 ValidationError);
    EXPECT_THROW(simulate({vasicek(0.1, 0.03, 0.01, 0.03)}, CorrelationMatrix(1), MeasureTag::t_forward(1.0), flat_curves(0.0), g, 2, 1),
                 ValidationError);
}

TEST(Simulate, ReproducibleAcrossThreadCounts) {
    DriverSpec s = asset(100.0, 0.2);
    s.jump_intensity = 0.5;
    s.jump_mean = -0.05;
    s.jump_stdev = 0.1;
    Simulator sim({s, martingale(0.2)}, CorrelationMatrix({{1.0, 0.3}, {0.3, 1.0}}), MeasureTag::risk_neutral(),
                  flat_curves(0.03), TimeGrid::uniform_with_events(1.0, 52.0));
    SimulationConfig cfg;
    cfg.n_paths = 5000;
    cfg.block_size = 512;
    cfg.threads = 1;
    PathSet a = sim.simulate(cfg);
    PathSet b = sim.simulate(cfg);
    EXPECT_TRUE(a == b);

    struct Sum {
        double total = 0.0;
        std::vector<double> firsts;
        void merge(const Sum& o) {
            total += o.total;
            firsts.insert(firsts.end(), o.firsts.begin(), o.firsts.end());
        }
    };
    auto f = [](const PathSet& ps) {
        Sum out;
        for (std::size_t p = 0; p < ps.n_paths(); ++p) out.total += ps.value(0, p, ps.n_times() - 1);
        out.firsts.push_back(ps.value(0, 0, 1));
        return out;
    };
    Sum one = sim.map_blocks<Sum>(cfg, f);
    cfg.threads = 3;
    Sum three = sim.map_blocks<Sum>(cfg, f);
    EXPECT_EQ(one.total, three.total);
    EXPECT_EQ(one.firsts, three.firsts);
    cfg.seed = 43;
    EXPECT_NE(sim.map_blocks<Sum>(cfg, f).total, one.total);
}

TEST(Simulate, AntitheticPairsNegateNoise) {
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({martingale(0.3)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 100, 2);
    for (std::size_t p = 0; p + 1 < ps.n_paths(); p += 2) {
        for (std::size_t k = 1; k < g.size(); ++k) {
            double sum = std::log(ps.value(0, p, k)) + std::log(ps.value(0, p + 1, k));
            EXPECT_NEAR(sum, -0.09 * g[k], 1e-12);
        }
    }
}

TEST(QuadraticCovariation, DeterministicDriverIsNegligible) {
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({asset(100.0, 0.0)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03), g, 2, 1);
    auto qv = quadratic_covariation(ps, "S", "S", 0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        double step = qv[k] - qv[k - 1];
        EXPECT_LE(step, 100.0 * 100.0 * 0.04 * g.dt(k - 1) * g.dt(k - 1));
    }
    EXPECT_THROW(quadratic_covariation(ps, "S", "X", 0), LookupError);
}

TEST(QuadraticCovariation, IndependentAndSelf) {
    DriverSpec a = asset(1.0, 0.2);
    DriverSpec b = asset(1.0, 0.3);
    b.id = "T";
    TimeGrid g = TimeGrid::uniform_with_events(1.0, 52.0);
    PathSet ps = simulate({a, b}, CorrelationMatrix(2), MeasureTag::risk_neutral(), flat_curves(0.0), g, 20000, 3);
    auto cross = terminal_stats(ps, [&](std::size_t p) { return quadratic_covariation(ps, "S", "T", p).back(); });
    EXPECT_LE(std::abs(cross.mean()), 3.0 * cross.se());
    // [S,S]_T ~ sigma^2 int S^2 du, with E[S_u^2] = e^{sigma^2 u} for r = 0
    auto self = terminal_stats(ps, [&](std::size_t p) { return quadratic_covariation(ps, "S", "S", p).back(); });
    double expected = std::expm1(0.04);
    EXPECT_LE(std::abs(self.mean() - expected), 3.0 * self.se() + 0.04 * 0.04 / 52.0);
}

TEST(VasicekZcb, ClosedFormExamples) {
    EXPECT_NEAR(vasicek_zcb(0.1, 0.03, 0.0, 0.03, 0.5, 2.5), std::exp(-0.06), 1e-15);
    EXPECT_EQ(vasicek_zcb(0.1, 0.03, 0.01, 0.05, 1.0, 1.0), 1.0);
    EXPECT_THROW(vasicek_zcb(0.0, 0.03, 0.01, 0.05, 0.0, 1.0), DomainError);
}

TEST(VasicekZcb, MonteCarloMatchesClosedForm) {
    TimeGrid g = TimeGrid::uniform_with_events(2.0, 26.0);
    PathSet ps = simulate({vasicek(0.1, 0.04, 0.01, 0.02)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g,
                          20000, 8);
    auto st = terminal_stats(ps, [&](std::size_t p) { return 1.0 / ps.bank(p, g.size() - 1); });
    double p0 = vasicek_zcb(0.1, 0.04, 0.01, 0.02, 0.0, 2.0);
    EXPECT_LE(std::abs(st.mean() - p0), 3.0 * st.se());
    // the exact scheme is grid independent: a coarse two-step grid gives the same law
    TimeGrid coarse({0.0, 1.0, 2.0});
    PathSet ps2 = simulate({vasicek(0.1, 0.04, 0.01, 0.02)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), coarse,
                           20000, 8);
    auto st2 = terminal_stats(ps2, [&](std::size_t p) { return 1.0 / ps2.bank(p, 2); });
    EXPECT_LE(std::abs(st2.mean() - p0), 3.0 * st2.se());
}

TEST(PathDump, CsvHeaderAndRows) {
    TimeGrid g({0.0, 0.5, 1.0});
    PathSet ps = simulate({asset(100.0, 0.0)}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.0), g, 2, 1);
    std::ostringstream os;
    write_paths_csv(ps, os, 1);
    EXPECT_EQ(os.str(), "path,time,driver,value\n0,0,S,100\n0,0.5,S,100\n0,1,S,100\n");
}
