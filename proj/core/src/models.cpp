#include "collat/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>

namespace collat {

const char* to_string(DriverKind kind) {
    switch (kind) {
        case DriverKind::LognormalJumpAsset: return "lognormal-jump-asset";
        case DriverKind::VasicekShortRate: return "vasicek-short-rate";
        case DriverKind::LognormalFx: return "lognormal-fx";
        case DriverKind::ExponentialMartingale: return "exponential-martingale";
    }
    return "?";
}

DriverKind driver_kind_from_string(const std::string& s) {
    for (auto k : {DriverKind::LognormalJumpAsset, DriverKind::VasicekShortRate, DriverKind::LognormalFx,
                   DriverKind::ExponentialMartingale})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown driver kind '" + s + "'");
}

void DriverSpec::validate() const {
    auto fail = [this](const std::string& msg) { throw ValidationError("driver '" + id + "': " + msg); };
    if (id.empty()) throw ValidationError("driver id must not be empty");
    if (!std::isfinite(sigma) || sigma < 0.0) fail("volatility must be >= 0");
    if (!std::isfinite(jump_intensity) || jump_intensity < 0.0) fail("jump intensity must be >= 0");
    if (!std::isfinite(jump_stdev) || jump_stdev < 0.0) fail("jump log-stdev must be >= 0");
    if (!std::isfinite(jump_mean)) fail("jump log-mean must be finite");
    if (!std::isfinite(initial)) fail("initial value must be finite");
    if (multiplicative() && !(initial > 0.0)) fail("initial value must be > 0");
    if (kind != DriverKind::LognormalJumpAsset) {
        if (jump_intensity != 0.0) fail("jumps are only available for lognormal-jump-asset drivers");
        if (dividends.has_cash() || dividends.has_proportional()) fail("only assets pay dividends");
    }
    if (kind == DriverKind::VasicekShortRate) {
        if (!(mean_reversion > 0.0)) fail("vasicek mean reversion a must be > 0");
        if (!std::isfinite(long_run)) fail("vasicek long-run level must be finite");
    }
    if (kind == DriverKind::LognormalFx && (currency.empty() || fx_to.empty()))
        fail("fx drivers need both currencies");
    dividends.validate();
}

double DriverSpec::jump_kappa() const { return std::exp(jump_mean + 0.5 * jump_stdev * jump_stdev) - 1.0; }

std::string MeasureTag::name() const {
    switch (kind) {
        case Kind::RiskNeutral: return "Q";
        case Kind::ForeignBasis: return "Q^" + currency + "b";
        case Kind::TForward: return "Q^T";
        case Kind::AssetNumeraire: return "Q^" + numeraire;
    }
    return "?";
}

CorrelationMatrix::CorrelationMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) a_[i * n + i] = 1.0;
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::vector<double>> rows) : CorrelationMatrix(rows.size()) {
    for (std::size_t i = 0; i < n_; ++i) {
        if (rows[i].size() != n_) throw ValidationError("correlation matrix must be square");
        for (std::size_t j = 0; j < n_; ++j) a_[i * n_ + j] = rows[i][j];
    }
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, double rho) {
    if (i >= n_ || j >= n_) throw LookupError("correlation index out of range");
    if (i == j && rho != 1.0) throw ValidationError("correlation diagonal must be 1");
    a_[i * n_ + j] = rho;
    a_[j * n_ + i] = rho;
}

std::vector<double> CorrelationMatrix::cholesky() const {
    constexpr double tol = 1e-12;
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 1.0) throw ValidationError("correlation diagonal must be 1");
        for (std::size_t j = 0; j < n_; ++j) {
            double v = (*this)(i, j);
            if (!std::isfinite(v) || v < -1.0 || v > 1.0) throw ValidationError("correlations must lie in [-1, 1]");
            if (v != (*this)(j, i)) throw ValidationError("correlation matrix must be symmetric");
        }
    }
    std::vector<double> l(n_ * n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        double d = (*this)(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l[j * n_ + k] * l[j * n_ + k];
        if (d < -tol) throw ValidationError("correlation matrix is not positive semidefinite");
        double pivot = d > tol ? std::sqrt(d) : 0.0;
        l[j * n_ + j] = pivot;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double s = (*this)(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n_ + k] * l[j * n_ + k];
            if (pivot > 0.0) {
                l[i * n_ + j] = s / pivot;
            } else if (std::abs(s) > 1e-9) {
                throw ValidationError("correlation matrix is not positive semidefinite");
            }
        }
    }
    return l;
}

PathSet::PathSet(TimeGrid grid, std::vector<DriverSpec> drivers, MeasureTag measure, std::size_t n_paths,
                 std::size_t first_path, std::uint64_t seed, bool antithetic)
    : grid_(std::move(grid)),
      drivers_(std::move(drivers)),
      measure_(std::move(measure)),
      n_paths_(n_paths),
      first_path_(first_path),
      seed_(seed),
      antithetic_(antithetic) {
    const std::size_t n = grid_.size();
    values_.assign(drivers_.size(), std::vector<double>(n_paths_ * n, 0.0));
    log_bank_.assign(n_paths_ * n, 0.0);
    for (const DriverSpec& d : drivers_) {
        auto count = static_cast<std::size_t>(std::count_if(
            d.dividends.cash.begin(), d.dividends.cash.end(),
            [&](const CashDividend& c) { return c.time <= grid_.horizon() + TimeGrid::tolerance; }));
        n_cash_.push_back(count);
        paid_.emplace_back(n_paths_ * count, 0.0);
    }
}

std::size_t PathSet::driver_index(const std::string& id) const {
    for (std::size_t d = 0; d < drivers_.size(); ++d)
        if (drivers_[d].id == id) return d;
    throw LookupError("unknown driver '" + id + "'");
}

bool PathSet::has_driver(const std::string& id) const {
    return std::any_of(drivers_.begin(), drivers_.end(), [&](const DriverSpec& d) { return d.id == id; });
}

std::span<const double> PathSet::values(std::size_t d, std::size_t p) const {
    return {values_[d].data() + p * n_times(), n_times()};
}

std::span<double> PathSet::values(std::size_t d, std::size_t p) {
    return {values_[d].data() + p * n_times(), n_times()};
}

std::span<const double> PathSet::log_bank(std::size_t p) const { return {log_bank_.data() + p * n_times(), n_times()}; }

std::span<double> PathSet::log_bank(std::size_t p) { return {log_bank_.data() + p * n_times(), n_times()}; }

double PathSet::bank(std::size_t p, std::size_t k) const { return std::exp(log_bank_[p * n_times() + k]); }

std::span<const double> PathSet::paid(std::size_t d, std::size_t p) const {
    return {paid_[d].data() + p * n_cash_[d], n_cash_[d]};
}

std::span<double> PathSet::paid(std::size_t d, std::size_t p) { return {paid_[d].data() + p * n_cash_[d], n_cash_[d]}; }

void PathSet::append(const PathSet& block) {
    if (!(block.grid_ == grid_) || block.drivers_.size() != drivers_.size())
        throw ValidationError("cannot append paths simulated on a different grid or model");
    for (std::size_t d = 0; d < drivers_.size(); ++d) {
        values_[d].insert(values_[d].end(), block.values_[d].begin(), block.values_[d].end());
        paid_[d].insert(paid_[d].end(), block.paid_[d].begin(), block.paid_[d].end());
    }
    log_bank_.insert(log_bank_.end(), block.log_bank_.begin(), block.log_bank_.end());
    n_paths_ += block.n_paths_;
}

unsigned default_threads() {
    if (const char* env = std::getenv("COLLAT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct DriverPlan {
    bool numeraire_drift = false;     // add the numeraire rate integral each step
    std::vector<double> deterministic;  // remaining deterministic log increment per step
    std::vector<double> vol;            // sigma sqrt(dt) per step
    std::vector<double> jump_rate;      // lambda' dt per step (measure-adjusted intensity)
    double jump_mean = 0.0;             // measure-adjusted log-mean
    double jump_stdev = 0.0;
    std::ptrdiff_t jump_slot = -1;      // index among jump drivers
    std::vector<std::ptrdiff_t> cash_at;  // per grid index, cash dividend index or -1
};

struct VasicekPlan {
    std::size_t driver = 0;
    std::vector<double> decay, b, sd_r, coef, resid;
    double theta = 0.0;
};

}  // namespace

struct Simulator::Impl {
    std::vector<DriverSpec> drivers;
    CorrelationMatrix corr;
    MeasureTag measure;
    CurveSet curves;
    TimeGrid grid;

    std::vector<double> chol;
    std::vector<DriverPlan> plans;
    std::vector<double> numeraire_int;
    std::optional<VasicekPlan> vasicek;
    std::size_t n_jumps = 0;

    Impl(std::vector<DriverSpec> d, CorrelationMatrix c, MeasureTag m, CurveSet cs, TimeGrid g)
        : drivers(std::move(d)), corr(std::move(c)), measure(std::move(m)), curves(std::move(cs)), grid(std::move(g)) {
        plan();
    }

    std::string measure_currency() const {
        return measure.kind == MeasureTag::Kind::ForeignBasis ? measure.currency : curves.domestic();
    }

    void plan();
    void run_block(PathSet& out, std::size_t block, const SimulationConfig& cfg) const;
};

void Simulator::Impl::plan() {
    curves.validate();
    const std::size_t nd = drivers.size();
    if (nd == 0) throw ValidationError("model needs at least one driver");
    for (std::size_t i = 0; i < nd; ++i) {
        drivers[i].validate();
        for (std::size_t j = 0; j < i; ++j)
            if (drivers[i].id == drivers[j].id) throw ValidationError("duplicate driver id '" + drivers[i].id + "'");
    }
    if (corr.size() != nd) throw ValidationError("correlation matrix size must equal the number of drivers");
    chol = corr.cholesky();

    const std::size_t steps = grid.steps();
    std::vector<double> dt(steps);
    for (std::size_t k = 0; k < steps; ++k) dt[k] = grid.dt(k);

    std::ptrdiff_t vas = -1;
    bool has_fx = false;
    for (std::size_t i = 0; i < nd; ++i) {
        if (drivers[i].kind == DriverKind::VasicekShortRate) {
            if (vas >= 0) throw ValidationError("at most one vasicek short-rate driver is supported");
            vas = static_cast<std::ptrdiff_t>(i);
        }
        if (drivers[i].kind == DriverKind::LognormalFx) has_fx = true;
    }
    if (vas >= 0 && measure.kind != MeasureTag::Kind::RiskNeutral)
        throw ValidationError("a stochastic short rate is only simulated under Q (Q^T needs deterministic rates)");
    if (vas >= 0 && has_fx) throw ValidationError("fx drivers need a deterministic short rate");

    RateCurve numeraire_curve = curves.get("r");
    if (measure.kind == MeasureTag::Kind::ForeignBasis) numeraire_curve = basis_rate(curves, measure.currency);

    // Brownian drift shift under an asset numeraire measure: rho sigma sigma_beta.
    std::ptrdiff_t beta = -1;
    if (measure.kind == MeasureTag::Kind::AssetNumeraire) {
        for (std::size_t i = 0; i < nd; ++i)
            if (drivers[i].id == measure.numeraire) beta = static_cast<std::ptrdiff_t>(i);
        if (beta < 0) throw LookupError("unknown numeraire driver '" + measure.numeraire + "'");
        const DriverSpec& b = drivers[static_cast<std::size_t>(beta)];
        if (b.kind != DriverKind::LognormalJumpAsset || b.drift_source != "risk-neutral" ||
            b.dividends.has_cash() || b.dividends.has_proportional())
            throw ValidationError("numeraire driver must be a non-dividend asset with risk-neutral drift");
    }

    numeraire_int.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) numeraire_int[k] = numeraire_curve.integral(grid[k], grid[k + 1]);

    plans.assign(nd, {});
    n_jumps = 0;
    for (std::size_t i = 0; i < nd; ++i) {
        const DriverSpec& d = drivers[i];
        DriverPlan& p = plans[i];
        p.deterministic.assign(steps, 0.0);
        p.vol.resize(steps);
        p.cash_at.assign(grid.size(), -1);
        for (std::size_t k = 0; k < steps; ++k) p.vol[k] = d.sigma * std::sqrt(dt[k]);
        if (d.kind == DriverKind::VasicekShortRate) continue;

        double shift = 0.0;
        if (beta >= 0 && d.kind != DriverKind::ExponentialMartingale) {
            const DriverSpec& b = drivers[static_cast<std::size_t>(beta)];
            shift = corr(i, static_cast<std::size_t>(beta)) * d.sigma * b.sigma;
        }
        double compensator = d.has_jumps() ? d.jump_intensity * d.jump_kappa() : 0.0;
        double lambda = d.jump_intensity;
        p.jump_mean = d.jump_mean;
        p.jump_stdev = d.jump_stdev;
        if (static_cast<std::ptrdiff_t>(i) == beta && d.has_jumps()) {
            // jump law of the numeraire itself under its own measure
            lambda = d.jump_intensity * (1.0 + d.jump_kappa());
            p.jump_mean = d.jump_mean + d.jump_stdev * d.jump_stdev;
        }
        if (d.has_jumps()) {
            p.jump_slot = static_cast<std::ptrdiff_t>(n_jumps++);
            p.jump_rate.resize(steps);
            for (std::size_t k = 0; k < steps; ++k) p.jump_rate[k] = lambda * dt[k];
        }

        const RateCurve* drift_curve = nullptr;
        const RateCurve* minus_curve = nullptr;
        RateCurve from_basis;
        switch (d.kind) {
            case DriverKind::LognormalJumpAsset:
                if (d.drift_source == "risk-neutral") {
                    if (!d.currency.empty() && d.currency != measure_currency())
                        throw ValidationError("driver '" + d.id + "': risk-neutral drift needs the asset currency (" +
                                              d.currency + ") to match the measure currency (" + measure_currency() + ")");
                    p.numeraire_drift = true;
                } else {
                    drift_curve = &curves.get(d.drift_source);
                }
                for (const CashDividend& c : d.dividends.cash) {
                    if (c.time > grid.horizon() + TimeGrid::tolerance) continue;
                    p.cash_at[grid.index_of(c.time, "cash dividend")] = &c - d.dividends.cash.data();
                }
                break;
            case DriverKind::LognormalFx:
                if (d.fx_to != measure_currency())
                    throw ValidationError("fx driver '" + d.id + "' must be quoted in the measure currency " +
                                          measure_currency());
                p.numeraire_drift = true;
                from_basis = basis_rate(curves, d.currency);
                minus_curve = &from_basis;
                break;
            case DriverKind::ExponentialMartingale:
            case DriverKind::VasicekShortRate:
                break;
        }
        for (std::size_t k = 0; k < steps; ++k) {
            double v = (shift - 0.5 * d.sigma * d.sigma - compensator) * dt[k];
            if (drift_curve) v += drift_curve->integral(grid[k], grid[k + 1]);
            if (minus_curve) v -= minus_curve->integral(grid[k], grid[k + 1]);
            v -= d.dividends.proportional.integral(grid[k], grid[k + 1]);
            p.deterministic[k] = v;
        }
    }

    if (vas >= 0) {
        const DriverSpec& d = drivers[static_cast<std::size_t>(vas)];
        VasicekPlan v;
        v.driver = static_cast<std::size_t>(vas);
        v.theta = d.long_run;
        const double a = d.mean_reversion;
        const double s2 = d.sigma * d.sigma;
        for (std::size_t k = 0; k < steps; ++k) {
            double h = dt[k];
            double one_minus_e = -std::expm1(-a * h);
            double one_minus_e2 = -std::expm1(-2.0 * a * h);
            double var_r = s2 * one_minus_e2 / (2.0 * a);
            double var_i = s2 / (a * a) * (h - 2.0 * one_minus_e / a + one_minus_e2 / (2.0 * a));
            double cov = s2 / (2.0 * a * a) * one_minus_e * one_minus_e;
            double sd_r = std::sqrt(var_r);
            v.decay.push_back(1.0 - one_minus_e);
            v.b.push_back(one_minus_e / a);
            v.sd_r.push_back(sd_r);
            double coef = sd_r > 0.0 ? cov / sd_r : 0.0;
            v.coef.push_back(coef);
            v.resid.push_back(std::sqrt(std::max(var_i - coef * coef, 0.0)));
        }
        vasicek = std::move(v);
    }
}

void Simulator::Impl::run_block(PathSet& out, std::size_t block, const SimulationConfig& cfg) const {
    const std::size_t nd = drivers.size();
    const std::size_t steps = grid.steps();
    const std::size_t n = grid.size();
    const std::size_t nz = nd + (vasicek ? 1 : 0) + n_jumps;  // normals per step

    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0x636f6c6cu};
    std::mt19937_64 eng(seq);
    std::normal_distribution<double> normal;
    std::vector<std::vector<std::poisson_distribution<int>>> poisson(n_jumps);
    for (std::size_t i = 0; i < nd; ++i) {
        const DriverPlan& p = plans[i];
        if (p.jump_slot < 0) continue;
        auto& dists = poisson[static_cast<std::size_t>(p.jump_slot)];
        for (std::size_t k = 0; k < steps; ++k) dists.emplace_back(p.jump_rate[k]);
    }

    std::vector<double> z(steps * nz);
    std::vector<int> counts(steps * n_jumps);
    std::vector<double> w(nd);
    std::vector<double> state(nd);

    auto evolve = [&](std::size_t path, double sign) {
        double log_b = 0.0;
        auto lb = out.log_bank(path);
        lb[0] = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            state[i] = drivers[i].initial;
            out.values(i, path)[0] = state[i];
        }
        for (std::size_t k = 0; k < steps; ++k) {
            const double* zk = &z[k * nz];
            for (std::size_t i = 0; i < nd; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j <= i; ++j) s += chol[i * nd + j] * zk[j];
                w[i] = sign * s;
            }
            double rate_int;
            if (vasicek) {
                const VasicekPlan& v = *vasicek;
                double r = state[v.driver];
                double wr = w[v.driver];
                double dev = r - v.theta;
                rate_int = v.theta * grid.dt(k) + dev * v.b[k] + v.coef[k] * wr + v.resid[k] * sign * zk[nd];
                state[v.driver] = v.theta + dev * v.decay[k] + v.sd_r[k] * wr;
            } else {
                rate_int = numeraire_int[k];
            }
            log_b += rate_int;
            lb[k + 1] = log_b;

            for (std::size_t i = 0; i < nd; ++i) {
                const DriverPlan& p = plans[i];
                if (drivers[i].kind == DriverKind::VasicekShortRate) {
                    out.values(i, path)[k + 1] = state[i];
                    continue;
                }
                double inc = p.deterministic[k] + p.vol[k] * w[i];
                if (p.numeraire_drift) inc += rate_int;
                if (p.jump_slot >= 0) {
                    auto slot = static_cast<std::size_t>(p.jump_slot);
                    int count = counts[k * n_jumps + slot];
                    if (count > 0) {
                        double nj = static_cast<double>(count);
                        inc += nj * p.jump_mean + p.jump_stdev * std::sqrt(nj) * sign * zk[nd + (vasicek ? 1 : 0) + slot];
                    }
                }
                double s = state[i] * std::exp(inc);
                if (std::ptrdiff_t c = p.cash_at[k + 1]; c >= 0) {
                    double amount = realized_cash(drivers[i].dividends.cash[static_cast<std::size_t>(c)], s);
                    out.paid(i, path)[static_cast<std::size_t>(c)] = amount;
                    s -= amount;
                }
                state[i] = s;
                out.values(i, path)[k + 1] = s;
            }
        }
        (void)n;
    };

    const std::size_t count = out.n_paths();
    for (std::size_t path = 0; path < count;) {
        for (double& x : z) x = normal(eng);
        for (std::size_t j = 0; j < n_jumps; ++j)
            for (std::size_t k = 0; k < steps; ++k) counts[k * n_jumps + j] = poisson[j][k](eng);
        evolve(path++, 1.0);
        if (cfg.antithetic && path < count) evolve(path++, -1.0);
    }
}

Simulator::Simulator(std::vector<DriverSpec> drivers, CorrelationMatrix corr, MeasureTag measure, CurveSet curves,
                     TimeGrid grid)
    : impl_(std::make_unique<Impl>(std::move(drivers), std::move(corr), std::move(measure), std::move(curves),
                                   std::move(grid))) {}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const TimeGrid& Simulator::grid() const { return impl_->grid; }
const CurveSet& Simulator::curves() const { return impl_->curves; }
const MeasureTag& Simulator::measure() const { return impl_->measure; }
const std::vector<DriverSpec>& Simulator::drivers() const { return impl_->drivers; }

std::size_t Simulator::n_blocks(const SimulationConfig& cfg) const {
    if (cfg.n_paths == 0) throw ValidationError("n_paths must be >= 1");
    if (cfg.block_size == 0 || (cfg.antithetic && cfg.block_size % 2 != 0))
        throw ValidationError("block size must be positive (and even with antithetics)");
    return (cfg.n_paths + cfg.block_size - 1) / cfg.block_size;
}

PathSet Simulator::simulate_block(std::size_t block, const SimulationConfig& cfg) const {
    std::size_t nb = n_blocks(cfg);
    if (block >= nb) throw LookupError("block index out of range");
    std::size_t first = block * cfg.block_size;
    std::size_t count = std::min(cfg.block_size, cfg.n_paths - first);
    PathSet out(impl_->grid, impl_->drivers, impl_->measure, count, first, cfg.seed, cfg.antithetic);
    impl_->run_block(out, block, cfg);
    return out;
}

PathSet Simulator::simulate(const SimulationConfig& cfg) const {
    std::size_t nb = n_blocks(cfg);
    PathSet all = simulate_block(0, cfg);
    for (std::size_t b = 1; b < nb; ++b) all.append(simulate_block(b, cfg));
    return all;
}

PathSet simulate(const std::vector<DriverSpec>& drivers, const CorrelationMatrix& corr, const MeasureTag& measure,
                 const CurveSet& curves, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                 bool antithetic) {
    Simulator sim(drivers, corr, measure, curves, grid);
    SimulationConfig cfg;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.antithetic = antithetic;
    return sim.simulate(cfg);
}

std::vector<double> quadratic_covariation(const PathSet& paths, const std::string& a, const std::string& b,
                                          std::size_t path) {
    auto va = paths.values(paths.driver_index(a), path);
    auto vb = paths.values(paths.driver_index(b), path);
    std::vector<double> out(paths.n_times(), 0.0);
    for (std::size_t k = 1; k < out.size(); ++k) out[k] = out[k - 1] + (va[k] - va[k - 1]) * (vb[k] - vb[k - 1]);
    return out;
}

double vasicek_zcb(double a, double theta, double sigma_r, double r0, double t, double T) {
    if (!(a > 0.0)) throw DomainError("vasicek mean reversion a must be > 0");
    if (T < t) throw DomainError("zero coupon bond needs t <= T");
    double tau = T - t;
    double b = -std::expm1(-a * tau) / a;
    double log_a = (theta - sigma_r * sigma_r / (2.0 * a * a)) * (b - tau) - sigma_r * sigma_r * b * b / (4.0 * a);
    return std::exp(log_a - b * r0);
}

void write_paths_csv(const PathSet& paths, std::ostream& os, std::size_t max_paths) {
    os << "path,time,driver,value\n" << std::setprecision(17);
    std::size_t np = std::min(max_paths, paths.n_paths());
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t d = 0; d < paths.drivers().size(); ++d)
            for (std::size_t k = 0; k < paths.n_times(); ++k)
                os << paths.first_path() + p << ',' << paths.grid()[k] << ',' << paths.drivers()[d].id << ','
                   << paths.value(d, p, k) << '\n';
}

}  // namespace collat
