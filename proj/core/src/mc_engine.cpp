#include "collat/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include "collat/errors.hpp"

namespace collat {

namespace {

double step_weight(double integral) {
    return integral == 0.0 ? 1.0 : -std::expm1(-integral) / integral;
}

// 1/beta on every grid point of path p.
void inverse_numeraire(const PathSet& paths, const NumeraireSpec& num, std::span<const double> curve_log_bank,
                       std::size_t p, std::vector<double>& out) {
    const std::size_t n = paths.n_times();
    out.resize(n);
    switch (num.kind) {
        case NumeraireSpec::Kind::Bank: {
            auto lb = paths.log_bank(p);
            for (std::size_t k = 0; k < n; ++k) out[k] = std::exp(-lb[k]);
            break;
        }
        case NumeraireSpec::Kind::Curve:
            for (std::size_t k = 0; k < n; ++k) out[k] = std::exp(-curve_log_bank[k]);
            break;
        case NumeraireSpec::Kind::Driver: {
            auto v = paths.values(paths.driver_index(num.id), p);
            for (std::size_t k = 0; k < n; ++k) out[k] = 1.0 / v[k];
            break;
        }
    }
}

std::vector<double> curve_log_bank(const PathSet& paths, const NumeraireSpec& num, const CurveSet& curves) {
    std::vector<double> out;
    if (num.kind != NumeraireSpec::Kind::Curve) return out;
    const RateCurve& c = curves.get(num.id);
    const TimeGrid& g = paths.grid();
    out.assign(g.size(), 0.0);
    for (std::size_t k = 1; k < g.size(); ++k) out[k] = out[k - 1] + c.integral(g[k - 1], g[k]);
    return out;
}

std::vector<std::ptrdiff_t> cash_index(const DividendSchedule& s, const TimeGrid& grid) {
    std::vector<std::ptrdiff_t> at(grid.size(), -1);
    for (std::size_t j = 0; j < s.cash.size(); ++j) {
        if (s.cash[j].time > grid.horizon() + TimeGrid::tolerance) continue;
        at[grid.index_of(s.cash[j].time, "cash dividend")] = static_cast<std::ptrdiff_t>(j);
    }
    return at;
}

std::vector<double> step_integrals(const RateCurve& c, const TimeGrid& g) {
    std::vector<double> out(g.steps());
    for (std::size_t k = 0; k < g.steps(); ++k) out[k] = c.integral(g[k], g[k + 1]);
    return out;
}

// Per-path quantities shared by the CSA estimators, up to the maturity index K.
struct CsaPath {
    std::vector<double> V, X, invB, J, rgb;
};

class CsaEvaluator {
public:
    CsaEvaluator(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa, const MarkFunction& mark,
                 const CsaContext& ctx)
        : paths_(paths), csa_(csa), mark_(mark), ctx_(ctx) {
        contract.validate();
        csa.validate();
        if (!contract.fixings.empty() || contract.payment_lag != 0.0)
            throw UnsupportedError("Monte Carlo CSA pricing needs a single fixing at maturity without lag");
        const TimeGrid& g = paths.grid();
        K_ = g.index_of(contract.maturity, "maturity");
        asset_ = paths.driver_index(contract.underlying);
        if (!ctx.fx_driver.empty()) {
            fx_ = static_cast<std::ptrdiff_t>(paths.driver_index(ctx.fx_driver));
            const DriverSpec& d = paths.drivers()[static_cast<std::size_t>(fx_)];
            if (d.kind != DriverKind::LognormalFx || d.currency != csa.currency)
                throw ValidationError("fx driver '" + ctx.fx_driver + "' must quote the collateral currency");
        }
        ell_ = step_integrals(ctx.ell, g);
        if (ctx.r_gb) rgb_ = step_integrals(*ctx.r_gb, g);
        continuous_ = margin_indices(csa.continuous ? std::vector<double>{} : csa.margin_times);
    }

    std::size_t maturity_index() const { return K_; }

    // Margin grid indices: every grid point when `times` is empty.
    std::vector<std::size_t> margin_indices(const std::vector<double>& times) const {
        std::vector<std::size_t> idx;
        if (times.empty()) {
            for (std::size_t k = 0; k <= K_; ++k) idx.push_back(k);
            return idx;
        }
        for (double t : times) idx.push_back(paths_.grid().index_of(t, "margin"));
        if (idx.front() != 0 || idx.back() != K_)
            throw ValidationError("margin times must run from 0 to the contract maturity");
        return idx;
    }

    const std::vector<std::size_t>& csa_indices() const { return continuous_; }

    void load(std::size_t p, CsaPath& v) const {
        const TimeGrid& g = paths_.grid();
        auto S = paths_.values(asset_, p);
        auto lb = paths_.log_bank(p);
        v.V.resize(K_ + 1);
        v.X.assign(K_ + 1, 1.0);
        v.invB.resize(K_ + 1);
        v.J.resize(K_);
        v.rgb.resize(K_);
        for (std::size_t k = 0; k <= K_; ++k) {
            v.V[k] = mark_(g[k], S[k]);
            v.invB[k] = std::exp(-lb[k]);
            if (fx_ >= 0) v.X[k] = paths_.value(static_cast<std::size_t>(fx_), p, k);
        }
        for (std::size_t k = 0; k < K_; ++k) {
            double R = lb[k + 1] - lb[k];
            v.J[k] = v.invB[k] * g.dt(k) * step_weight(R);
            v.rgb[k] = (rgb_.empty() ? R : rgb_[k]) / g.dt(k);
        }
    }

    // Collateral account after each call: (1 + alpha) V_{m_i-} / X_{m_i-}.
    void accounts(const CsaPath& v, const std::vector<std::size_t>& idx, std::vector<double>& C) const {
        C.resize(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            std::size_t k = idx[i] == 0 ? 0 : idx[i] - 1;
            C[i] = (1.0 + csa_.haircut.rate(paths_.grid()[idx[i]])) * v.V[k] / v.X[k];
        }
    }

    double formula(const CsaPath& v, const std::vector<std::size_t>& idx, const std::vector<double>& C) const {
        const TimeGrid& g = paths_.grid();
        double a = v.V[K_] * v.invB[K_];
        std::size_t i = 0;
        double c = csa_.remuneration.rate(0.0);
        for (std::size_t k = 0; k < K_; ++k) {
            if (i + 1 < idx.size() && idx[i + 1] <= k) {
                ++i;
                c = csa_.remuneration.rate(g[idx[i]]);
            }
            a += (ell_[k] / g.dt(k) * v.V[k] - v.X[k] * C[i] * (c - v.rgb[k])) * v.J[k];
        }
        return a;
    }

    double ell_term(const CsaPath& v) const {
        double s = 0.0;
        for (std::size_t k = 0; k < K_; ++k) s += ell_[k] / paths_.grid().dt(k) * v.V[k] * v.J[k];
        return s;
    }

    // (b), the approximation term and the residual a - b - analytic - approx.
    void pnl(const CsaPath& v, const std::vector<std::size_t>& idx, const std::vector<double>& C, double analytic,
             double& b, double& approx) const {
        const TimeGrid& g = paths_.grid();
        b = -analytic + v.X[0] * C[0] + ell_term(v);
        approx = 0.0;
        for (std::size_t i = 1; i < idx.size(); ++i) {
            std::size_t m0 = idx[i - 1], m1 = idx[i];
            double dt = g[m1] - g[m0];
            double c = csa_.remuneration.rate(g[m0]);
            double accrual = c * C[i - 1] * dt;
            b += v.X[m1] * (C[i] - C[i - 1] - accrual) * v.invB[m1];
            double js = 0.0;
            for (std::size_t k = m0; k < m1; ++k) js += v.X[k] * v.J[k];
            approx += C[i - 1] * c * (v.X[m1] * dt * v.invB[m1] - js);
        }
        b += (v.V[K_] - v.X[K_] * C.back()) * v.invB[K_];
    }

    // Running gain V_k/B_k + sum_{j<k} [ell V - X C (c - r_gb)] J, collateral at every grid point.
    void gain(const CsaPath& v, const std::vector<double>& C, std::span<double> out) const {
        const TimeGrid& g = paths_.grid();
        double acc = 0.0;
        for (std::size_t k = 0; k <= K_; ++k) {
            out[k] = v.V[k] * v.invB[k] + acc;
            if (k == K_) break;
            double c = csa_.remuneration.rate(g[k]);
            acc += (ell_[k] / g.dt(k) * v.V[k] - v.X[k] * C[k] * (c - v.rgb[k])) * v.J[k];
        }
    }

private:
    const PathSet& paths_;
    const CsaSpec& csa_;
    const MarkFunction& mark_;
    const CsaContext& ctx_;
    std::size_t K_ = 0;
    std::size_t asset_ = 0;
    std::ptrdiff_t fx_ = -1;
    std::vector<double> ell_, rgb_;
    std::vector<std::size_t> continuous_;
};

double curve_max_abs(const RateCurve& c) {
    double m = 0.0;
    for (double r : c.rates()) m = std::max(m, std::abs(r));
    return m;
}

template <class Fn>
std::vector<double> per_path(const PathSet& paths, Fn&& fn) {
    std::vector<double> out(paths.n_paths());
    for (std::size_t p = 0; p < paths.n_paths(); ++p) out[p] = fn(p);
    return out;
}

std::vector<std::size_t> grid_indices(const TimeGrid& g, const std::vector<double>& times) {
    if (times.size() < 2) throw ValidationError("margin schedule needs at least two times");
    std::vector<std::size_t> idx;
    for (double t : times) idx.push_back(g.index_of(t, "margin"));
    if (idx.front() != 0) throw ValidationError("margin schedule must start at 0");
    return idx;
}

}  // namespace

DeflatedGain deflated_gain(const PathSet& paths, const std::string& asset, const NumeraireSpec& numeraire,
                           const CurveSet& curves) {
    const std::size_t d = paths.driver_index(asset);
    const DriverSpec& spec = paths.drivers()[d];
    if (spec.kind == DriverKind::VasicekShortRate) throw ValidationError("a short rate has no deflated gain");
    const TimeGrid& g = paths.grid();
    const std::size_t n = g.size();
    const DividendSchedule& sched = spec.dividends;
    auto cash_at = cash_index(sched, g);
    auto q = step_integrals(sched.proportional, g);
    auto clb = curve_log_bank(paths, numeraire, curves);
    const bool jump_numeraire = numeraire.kind == NumeraireSpec::Kind::Driver;

    DeflatedGain out;
    out.n_paths = paths.n_paths();
    out.n_times = n;
    out.antithetic = paths.antithetic();
    out.times = g.times();
    out.value.resize(out.n_paths * n);
    out.deflated.resize(out.n_paths * n);
    out.dividends.resize(out.n_paths * n);
    out.covariation.resize(out.n_paths * n);
    std::vector<double> inv;
    for (std::size_t p = 0; p < out.n_paths; ++p) {
        inverse_numeraire(paths, numeraire, clb, p, inv);
        auto S = paths.values(d, p);
        auto paid = paths.paid(d, p);
        double div = 0.0, cov = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 0) {
                // conditional mean of int q S/beta du over the step
                if (q[k - 1] != 0.0) div += S[k - 1] * inv[k - 1] * -std::expm1(-q[k - 1]);
                if (cash_at[k] >= 0) {
                    double phi = paid[static_cast<std::size_t>(cash_at[k])];
                    if (jump_numeraire) {
                        div += phi * inv[k - 1];
                        cov += phi * (inv[k] - inv[k - 1]);
                    } else {
                        div += phi * inv[k];
                    }
                }
            }
            std::size_t at = p * n + k;
            out.deflated[at] = S[k] * inv[k];
            out.dividends[at] = div;
            out.covariation[at] = cov;
            out.value[at] = out.deflated[at] + div + cov;
        }
    }
    return out;
}

MartingaleAccumulator::MartingaleAccumulator(const TimeGrid& grid, std::span<const double> times)
    : times_(times.begin(), times.end()), stats_(times.size()) {
    for (double t : times) index_.push_back(grid.index_of(t, "diagnostic"));
}

void MartingaleAccumulator::add(const DeflatedGain& gain) {
    std::vector<double> drift(gain.n_paths);
    if (gain.n_paths == 0) return;
    g0_ = gain.value[0];
    for (std::size_t j = 0; j < index_.size(); ++j) {
        for (std::size_t p = 0; p < gain.n_paths; ++p) drift[p] = gain.at(p, index_[j]) - gain.at(p, 0);
        add_paths(stats_[j], drift, gain.antithetic);
    }
    n_ += gain.n_paths;
}

void MartingaleAccumulator::merge(const MartingaleAccumulator& other) {
    if (times_.empty()) {
        *this = other;
        return;
    }
    if (other.times_.empty()) return;
    for (std::size_t j = 0; j < stats_.size(); ++j) stats_[j].merge(other.stats_[j]);
    n_ += other.n_;
}

MartingaleReport MartingaleAccumulator::finish() const {
    if (n_ < 2) throw StatisticsError("martingale diagnostic needs at least two paths");
    MartingaleReport r;
    r.n_paths = n_;
    r.pass = true;
    const double floor = kMartingaleFloor * std::max(1.0, std::abs(g0_));
    for (std::size_t j = 0; j < times_.size(); ++j) {
        MartingaleRow row;
        row.time = times_[j];
        row.drift = stats_[j].mean();
        row.se = stats_[j].count() > 1 ? stats_[j].se() : 0.0;
        row.pass = std::abs(row.drift) <= 3.0 * row.se + floor;
        r.pass = r.pass && row.pass;
        r.rows.push_back(row);
    }
    return r;
}

MartingaleReport martingale_diagnostic(const DeflatedGain& gain, const TimeGrid& grid, std::span<const double> times) {
    MartingaleAccumulator acc(grid, times);
    acc.add(gain);
    return acc.finish();
}

std::vector<double> self_financing_replication(const PathSet& paths, const std::string& asset, const CurveSet& curves) {
    const std::size_t d = paths.driver_index(asset);
    const DriverSpec& spec = paths.drivers()[d];
    if (spec.dividends.has_proportional())
        throw UnsupportedError("replication check covers cash dividends only");
    DeflatedGain g = deflated_gain(paths, asset, NumeraireSpec::bank(), curves);
    const TimeGrid& grid = paths.grid();
    auto cash_at = cash_index(spec.dividends, grid);
    const std::size_t n = grid.size();
    std::vector<double> out(paths.n_paths() * n);
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        auto S = paths.values(d, p);
        auto lb = paths.log_bank(p);
        auto paid = paths.paid(d, p);
        double cash = 0.0;  // phi^0 B, dividends swept into the bank account
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 0) {
                cash *= std::exp(lb[k] - lb[k - 1]);
                if (cash_at[k] >= 0) cash += paid[static_cast<std::size_t>(cash_at[k])];
            }
            double y = (cash + S[k]) * std::exp(-lb[k]);
            double gk = g.at(p, k);
            out[p * n + k] = (y - gk) / std::max(std::abs(gk), 1e-300);
        }
    }
    return out;
}

void PriceMcAccumulator::merge(const PriceMcAccumulator& other) {
    formula.merge(other.formula);
    pnl.merge(other.pnl);
    residual.merge(other.residual);
    approx.merge(other.approx);
    n_paths += other.n_paths;
}

PriceMcAccumulator price_mc_block(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa,
                                  const MarkFunction& mark, const CsaContext& ctx) {
    CsaEvaluator ev(contract, paths, csa, mark, ctx);
    const auto& idx = ev.csa_indices();
    const std::size_t n = paths.n_paths();
    std::vector<double> a(n), b(n), res(n), ap(n), C;
    CsaPath v;
    for (std::size_t p = 0; p < n; ++p) {
        ev.load(p, v);
        ev.accounts(v, idx, C);
        a[p] = ev.formula(v, idx, C);
        ev.pnl(v, idx, C, ctx.analytic, b[p], ap[p]);
        res[p] = a[p] - b[p] - ctx.analytic - ap[p];
    }
    PriceMcAccumulator acc;
    add_paths(acc.formula, a, paths.antithetic());
    add_paths(acc.pnl, b, paths.antithetic());
    add_paths(acc.residual, res, paths.antithetic());
    add_paths(acc.approx, ap, paths.antithetic());
    acc.n_paths = n;
    return acc;
}

PriceMcResult finish_price_mc(const PriceMcAccumulator& acc, double analytic, std::uint64_t seed) {
    PriceMcResult r;
    r.price = make_estimate(acc.formula, acc.n_paths, seed);
    r.pnl = make_estimate(acc.pnl, acc.n_paths, seed);
    r.residual = make_estimate(acc.residual, acc.n_paths, seed);
    r.approx = make_estimate(acc.approx, acc.n_paths, seed);
    r.estimators_agree = std::abs(r.residual.mean) <= 3.0 * r.residual.se + 1e-9 * std::max(1.0, std::abs(analytic));
    return r;
}

PriceMcResult price_mc(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa, const MarkFunction& mark,
                       const CsaContext& ctx) {
    return finish_price_mc(price_mc_block(contract, paths, csa, mark, ctx), ctx.analytic, paths.seed());
}

double margination_bias_bound(const CsaSpec& csa, const CsaContext& ctx, const RateCurve& z, const RateCurve& r_num,
                              double value, double maturity, const TimeGrid& grid) {
    double interval = 0.0;
    if (!csa.continuous)
        for (std::size_t i = 1; i < csa.margin_times.size(); ++i)
            interval = std::max(interval, csa.margin_times[i] - csa.margin_times[i - 1]);
    double step = 0.0;
    for (std::size_t k = 0; k < grid.steps(); ++k) step = std::max(step, grid.dt(k));
    const double lag = interval + step;
    const RateCurve& rgb = ctx.r_gb ? *ctx.r_gb : r_num;
    double spread = curve_max_abs(csa.remuneration - rgb);
    double alpha = curve_max_abs(csa.haircut);
    double zmax = curve_max_abs(z), zr = curve_max_abs(z - r_num);
    return (curve_max_abs(ctx.ell) + (1.0 + alpha) * spread) * std::abs(value) * std::exp(zr * maturity) *
           std::expm1(zmax * lag) * maturity;
}

DeflatedGain csa_deflated_gain(const ContractSpec& contract, const PathSet& paths, const CsaSpec& csa,
                               const MarkFunction& mark, const CsaContext& ctx) {
    CsaSpec cont = csa;
    cont.continuous = true;
    CsaEvaluator ev(contract, paths, cont, mark, ctx);
    const std::size_t n = ev.maturity_index() + 1;
    DeflatedGain out;
    out.n_paths = paths.n_paths();
    out.n_times = n;
    out.antithetic = paths.antithetic();
    out.times.assign(paths.grid().times().begin(), paths.grid().times().begin() + static_cast<std::ptrdiff_t>(n));
    out.value.resize(out.n_paths * n);
    CsaPath v;
    std::vector<double> C;
    for (std::size_t p = 0; p < out.n_paths; ++p) {
        ev.load(p, v);
        // collateral at the current left-point mark
        C.resize(n);
        for (std::size_t k = 0; k < n; ++k) C[k] = (1.0 + cont.haircut.rate(paths.grid()[k])) * v.V[k] / v.X[k];
        ev.gain(v, C, std::span<double>(out.value.data() + p * n, n));
    }
    out.deflated = out.value;
    out.dividends.assign(out.value.size(), 0.0);
    out.covariation.assign(out.value.size(), 0.0);
    return out;
}

void ForwardAccumulator::merge(const ForwardAccumulator& other) {
    t_forward.merge(other.t_forward);
    risk_neutral.merge(other.risk_neutral);
    difference.merge(other.difference);
    inv_bank.merge(other.inv_bank);
    sum_s += other.sum_s;
    sum_inv_b += other.sum_inv_b;
    sum_s_inv_b += other.sum_s_inv_b;
    n_paths += other.n_paths;
}

double ForwardAccumulator::covariance() const {
    if (n_paths < 2) throw StatisticsError("covariance needs at least two paths");
    double n = static_cast<double>(n_paths);
    return (sum_s_inv_b - sum_s * sum_inv_b / n) / (n - 1.0);
}

ForwardAccumulator forward_block(const PathSet& paths, const std::string& asset, double T, double zcb) {
    const std::size_t d = paths.driver_index(asset);
    const std::size_t K = paths.grid().index_of(T, "forward maturity");
    const std::size_t n = paths.n_paths();
    std::vector<double> tf(n), rn(n), diff(n), ib(n);
    ForwardAccumulator acc;
    for (std::size_t p = 0; p < n; ++p) {
        double s = paths.value(d, p, K);
        double inv = 1.0 / paths.bank(p, K);
        tf[p] = s * inv / zcb;
        rn[p] = s;
        diff[p] = s - tf[p];
        ib[p] = inv;
        acc.sum_s += s;
        acc.sum_inv_b += inv;
        acc.sum_s_inv_b += s * inv;
    }
    add_paths(acc.t_forward, tf, paths.antithetic());
    add_paths(acc.risk_neutral, rn, paths.antithetic());
    add_paths(acc.difference, diff, paths.antithetic());
    add_paths(acc.inv_bank, ib, paths.antithetic());
    acc.n_paths = n;
    return acc;
}

McEstimate forward_mc(const PathSet& paths, const std::string& asset, double T, ForwardMode mode, double zcb) {
    ForwardAccumulator acc = forward_block(paths, asset, T, zcb);
    return make_estimate(mode == ForwardMode::TForward ? acc.t_forward : acc.risk_neutral, acc.n_paths, paths.seed());
}

namespace {

struct ConvergenceAcc {
    std::vector<RunningStats> raw, crn;
    std::size_t n = 0;

    void merge(const ConvergenceAcc& o) {
        if (raw.empty()) {
            *this = o;
            return;
        }
        if (o.raw.empty()) return;
        for (std::size_t j = 0; j < raw.size(); ++j) {
            raw[j].merge(o.raw[j]);
            crn[j].merge(o.crn[j]);
        }
        n += o.n;
    }
};

}  // namespace

ConvergenceReport margination_convergence(const Simulator& sim, const SimulationConfig& cfg,
                                          const ContractSpec& contract, const CsaSpec& csa,
                                          const std::vector<MarginFrequency>& frequencies, const MarkFunction& mark,
                                          const CsaContext& ctx, double analytic) {
    CsaSpec cont = csa;
    cont.continuous = true;
    const std::size_t m = frequencies.size() + 1;
    auto acc = sim.map_blocks<ConvergenceAcc>(cfg, [&](const PathSet& paths) {
        CsaEvaluator ev(contract, paths, cont, mark, ctx);
        std::vector<std::vector<std::size_t>> idx;
        for (const auto& f : frequencies)
            idx.push_back(ev.margin_indices(periodic_times(0.0, contract.maturity, f.per_year)));
        idx.push_back(ev.csa_indices());
        const std::size_t n = paths.n_paths();
        std::vector<std::vector<double>> raw(m, std::vector<double>(n)), crn(m, std::vector<double>(n));
        CsaPath v;
        std::vector<double> C;
        std::vector<double> a(m);
        for (std::size_t p = 0; p < n; ++p) {
            ev.load(p, v);
            for (std::size_t j = 0; j < m; ++j) {
                ev.accounts(v, idx[j], C);
                a[j] = ev.formula(v, idx[j], C);
            }
            for (std::size_t j = 0; j < m; ++j) {
                raw[j][p] = a[j] - analytic;
                crn[j][p] = a[j] - a[m - 1];
            }
        }
        ConvergenceAcc out;
        out.raw.resize(m);
        out.crn.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            add_paths(out.raw[j], raw[j], paths.antithetic());
            add_paths(out.crn[j], crn[j], paths.antithetic());
        }
        out.n = n;
        return out;
    });
    ConvergenceReport r;
    for (std::size_t j = 0; j < m; ++j) {
        ConvergenceRow row;
        row.label = j < frequencies.size() ? frequencies[j].label : "continuous";
        row.per_year = j < frequencies.size() ? frequencies[j].per_year : 0.0;
        row.bias = acc.raw[j].mean();
        row.bias_se = acc.raw[j].se();
        row.crn_bias = acc.crn[j].mean();
        row.crn_se = acc.crn[j].count() > 1 ? acc.crn[j].se() : 0.0;
        r.rows.push_back(row);
    }
    r.monotone = true;
    for (std::size_t j = 1; j < m; ++j) {
        const auto& prev = r.rows[j - 1];
        const auto& cur = r.rows[j];
        double slack = std::max(prev.crn_se, cur.crn_se);
        if (std::abs(cur.crn_bias) > std::abs(prev.crn_bias) + slack) r.monotone = false;
    }
    return r;
}

PnlResult pnl_zero_test(const RunningStats& stats, std::size_t n_paths, std::uint64_t seed, double scale) {
    PnlResult r;
    r.estimate = make_estimate(stats, n_paths, seed);
    r.pass = std::abs(r.estimate.mean) <= 3.0 * r.estimate.se + kMartingaleFloor * std::max(1.0, std::abs(scale));
    return r;
}

PnlResult pnl_zero_test(std::span<const double> legs, bool antithetic, std::uint64_t seed, double scale) {
    RunningStats s;
    add_paths(s, legs, antithetic);
    return pnl_zero_test(s, legs.size(), seed, scale);
}

std::vector<double> repo_seller_pnl(const PathSet& paths, const std::string& asset, const RepoTerms& terms) {
    const std::size_t d = paths.driver_index(asset);
    const DriverSpec& spec = paths.drivers()[d];
    if (terms.alpha < 0.0) throw ValidationError("repo haircut must be non-negative");
    if (spec.dividends.has_proportional()) throw UnsupportedError("repo P&L covers cash coupons only");
    const TimeGrid& g = paths.grid();
    auto idx = grid_indices(g, terms.margin_times);
    auto cash_at = cash_index(spec.dividends, g);
    const std::size_t N = idx.size() - 1;
    const double a = terms.alpha;
    std::vector<double> X(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        X[i] = std::exp(terms.kappa.integral(0.0, g[idx[i]])) / (1.0 + a);
    return per_path(paths, [&](std::size_t p) {
        auto S = paths.values(d, p);
        auto paid = paths.paid(d, p);
        const double s0 = S[0];
        double pnl = -a * s0 / (1.0 + a);
        double F_prev = (1.0 + a) * X[0] * s0 - s0;
        for (std::size_t i = 1; i <= N; ++i) {
            double dt = g[idx[i]] - g[idx[i - 1]];
            double F = (1.0 + a) * X[i] * s0 - S[idx[i]];
            double c = terms.c.rate(g[idx[i - 1]]);
            pnl -= (F - F_prev * (1.0 + c * dt)) / paths.bank(p, idx[i]);
            F_prev = F;
        }
        for (std::size_t k = 1; k <= idx[N]; ++k)
            if (cash_at[k] >= 0) pnl += paid[static_cast<std::size_t>(cash_at[k])] / paths.bank(p, k);
        pnl += (S[idx[N]] + F_prev - X[N] * s0) / paths.bank(p, idx[N]);
        return pnl;
    });
}

std::vector<double> lender_pnl(const PathSet& paths, const std::string& asset, const LendingTerms& terms) {
    const std::size_t d = paths.driver_index(asset);
    const DriverSpec& spec = paths.drivers()[d];
    if (terms.alpha < 0.0) throw ValidationError("lending haircut must be non-negative");
    if (spec.dividends.has_proportional()) throw UnsupportedError("lending P&L covers cash dividends only");
    const TimeGrid& g = paths.grid();
    auto idx = grid_indices(g, terms.margin_times);
    auto cash_at = cash_index(spec.dividends, g);
    auto ell = step_integrals(terms.ell, g);
    const std::size_t N = idx.size() - 1;
    return per_path(paths, [&](std::size_t p) {
        auto S = paths.values(d, p);
        auto lb = paths.log_bank(p);
        auto paid = paths.paid(d, p);
        auto collateral = [&](std::size_t i) {
            std::size_t k = idx[i] == 0 ? 0 : idx[i] - 1;
            return (1.0 + terms.alpha) * S[k];
        };
        double C_prev = collateral(0);
        double pnl = -(S[0] - C_prev);
        for (std::size_t i = 1; i <= N; ++i) {
            double dt = g[idx[i]] - g[idx[i - 1]];
            double C = collateral(i);
            double c = terms.c.rate(g[idx[i - 1]]);
            pnl += (C - C_prev * (1.0 + c * dt)) * std::exp(-lb[idx[i]]);
            C_prev = C;
        }
        for (std::size_t k = 0; k < idx[N]; ++k) {
            double R = lb[k + 1] - lb[k];
            pnl += ell[k] * S[k] * std::exp(-lb[k]) * step_weight(R);
        }
        for (std::size_t k = 1; k <= idx[N]; ++k)
            if (cash_at[k] >= 0) pnl += paid[static_cast<std::size_t>(cash_at[k])] * std::exp(-lb[k]);
        pnl += (S[idx[N]] - C_prev) * std::exp(-lb[idx[N]]);
        return pnl;
    });
}

std::vector<double> futures_investor_pnl(const PathSet& paths, const std::string& asset, const FuturesTerms& terms,
                                         const RateCurve& r, double maturity) {
    const std::size_t d = paths.driver_index(asset);
    const DriverSpec& spec = paths.drivers()[d];
    const TimeGrid& g = paths.grid();
    auto idx = grid_indices(g, terms.margin_times);
    if (std::abs(g[idx.back()] - maturity) > TimeGrid::tolerance)
        throw ValidationError("futures margin schedule must end at maturity");
    std::vector<double> times(idx.size()), im(idx.size(), terms.initial_margin), quotes(idx.size()), bank(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) times[i] = g[idx[i]];
    return per_path(paths, [&](std::size_t p) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            double s = paths.value(d, p, idx[i]);
            quotes[i] = i + 1 == idx.size() ? s : forward_price(s, spec.dividends, r, times[i], maturity, {});
            bank[i] = paths.bank(p, idx[i]);
        }
        CollateralLedger l = futures_margin_account(im, quotes, terms.c, times);
        double pnl = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) pnl += l.posting[i] / bank[i];
        return pnl + l.closing / bank.back();
    });
}

}  // namespace collat
