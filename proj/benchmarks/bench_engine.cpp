#include <benchmark/benchmark.h>

#include "collat/mc_engine.hpp"

using namespace collat;

namespace {

CurveSet flat_curves(double r) {
    CurveSet cs("EUR");
    cs.set("r", RateCurve::flat(r));
    return cs;
}

DriverSpec jump_asset() {
    DriverSpec d;
    d.id = "S";
    d.initial = 100.0;
    d.sigma = 0.2;
    d.jump_intensity = 0.5;
    d.jump_mean = -0.05;
    d.jump_stdev = 0.1;
    d.dividends.cash = {{0.5, 2.0}};
    return d;
}

void BM_SimulateBlock(benchmark::State& state) {
    std::vector<DriverSpec> drivers{jump_asset()};
    Simulator sim(drivers, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03),
                  TimeGrid::uniform_with_events(1.0, 252.0, {0.5}));
    SimulationConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.block_size = cfg.n_paths;
    for (auto _ : state) benchmark::DoNotOptimize(sim.simulate_block(0, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 252);
}
BENCHMARK(BM_SimulateBlock)->Arg(2048);

void BM_DeflatedGain(benchmark::State& state) {
    CurveSet cs = flat_curves(0.03);
    PathSet ps = simulate({jump_asset()}, CorrelationMatrix(1), MeasureTag::risk_neutral(), cs,
                          TimeGrid::uniform_with_events(1.0, 252.0, {0.5}), 2048, 1);
    for (auto _ : state) benchmark::DoNotOptimize(deflated_gain(ps, "S", NumeraireSpec::bank(), cs));
    state.SetItemsProcessed(state.iterations() * 2048 * 253);
}
BENCHMARK(BM_DeflatedGain);

void BM_CsaEstimators(benchmark::State& state) {
    DriverSpec s = jump_asset();
    s.jump_intensity = 0.0;
    s.dividends = {};
    PathSet ps = simulate({s}, CorrelationMatrix(1), MeasureTag::risk_neutral(), flat_curves(0.03),
                          TimeGrid::uniform_with_events(1.0, 252.0), 2048, 1);
    ContractSpec k;
    k.id = "call";
    k.underlying = "S";
    k.strike = 100.0;
    k.maturity = 1.0;
    CsaSpec csa;
    csa.currency = "EUR";
    csa.remuneration = RateCurve::flat(0.01);
    csa.continuous = true;
    CsaEuropeanMark mark(k, 0.2, RateCurve::flat(0.01), RateCurve::flat(0.03), {});
    MarkFunction f = [&](double t, double x) { return mark(t, x); };
    CsaContext ctx;
    for (auto _ : state) benchmark::DoNotOptimize(price_mc_block(k, ps, csa, f, ctx));
    state.SetItemsProcessed(state.iterations() * 2048 * 252);
}
BENCHMARK(BM_CsaEstimators);

void BM_CurveIntegral(benchmark::State& state) {
    std::vector<double> pillars, rates;
    for (int i = 0; i < 40; ++i) {
        pillars.push_back(0.25 * i);
        rates.push_back(0.01 + 0.0005 * i);
    }
    RateCurve c(pillars, rates);
    double t = 0.0;
    for (auto _ : state) {
        t = t > 9.0 ? 0.0 : t + 0.013;
        benchmark::DoNotOptimize(c.integral(t, t + 0.5));
    }
}
BENCHMARK(BM_CurveIntegral);

}  // namespace
BENCHMARK_MAIN();
