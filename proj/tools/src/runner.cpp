#include "collat/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "collat/errors.hpp"

namespace collat {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kReplicationTol = 1e-12;

struct CsvRow {
    double time = 0.0;
    double mean_drift = 0.0;
    double se = 0.0;
    bool pass = false;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string hex64(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + file.string() + "'");
    out << text;
}

class Job {
public:
    Job(Command cmd, const Scenario& s, const RunOptions& opt, std::ostream& log)
        : cmd_(cmd), s_(s), log_(log), grid_(s.grid()) {
        cfg_.n_paths = opt.paths.value_or(s.run.paths);
        cfg_.seed = opt.seed.value_or(s.run.seed);
        cfg_.block_size = s.run.block_size;
        cfg_.antithetic = s.run.antithetic;
        cfg_.threads = opt.threads;
        if (cfg_.n_paths < 2) throw ValidationError("need at least 2 paths");
        out_ = opt.out.value_or(s.run.out);
        fs::create_directories(out_ / "diagnostics");
    }

    Simulator simulator() const {
        return Simulator(s_.drivers, s_.correlation_matrix(), s_.measure, s_.curves, grid_);
    }

    int finish(json results, bool pass) {
        json report = {{"command", to_string(cmd_)},
                       {"scenario", s_.name},
                       {"scenario_hash", hex64(scenario_hash(s_))},
                       {"seed", cfg_.seed},
                       {"paths", cfg_.n_paths},
                       {"antithetic", cfg_.antithetic},
                       {"grid_points", grid_.size()},
                       {"measure", s_.measure.name()},
                       {"results", std::move(results)},
                       {"diagnostics", csv_files_},
                       {"pass", pass}};
        write_text(out_ / "report.json", report.dump(2) + "\n");
        if (s_.run.path_dump) {
            PathSet block = simulator().simulate_block(0, cfg_);
            std::ofstream os(out_ / s_.run.path_dump->file, std::ios::binary | std::ios::trunc);
            write_paths_csv(block, os, s_.run.path_dump->max_paths);
        }
        return pass ? kExitPass : kExitStatistical;
    }

    // Writes diagnostics/<name>.csv and logs failing rows; returns true when every row passes.
    bool table(const std::string& name, const std::vector<CsvRow>& rows) {
        std::string text = "time,mean_drift,se,pass\n";
        bool pass = true;
        for (const CsvRow& r : rows) {
            text += num(r.time) + "," + num(r.mean_drift) + "," + num(r.se) + "," + (r.pass ? "true" : "false") + "\n";
            if (!r.pass) {
                log_ << "FAIL " << name << " time=" << num(r.time) << " mean_drift=" << num(r.mean_drift)
                     << " se=" << num(r.se) << "\n";
                pass = false;
            }
        }
        std::string file = "diagnostics/" + name + ".csv";
        write_text(out_ / file, text);
        csv_files_.push_back(file);
        return pass;
    }

    void raw_table(const std::string& name, const std::string& text) {
        std::string file = "diagnostics/" + name + ".csv";
        write_text(out_ / file, text);
        csv_files_.push_back(file);
    }

    const Scenario& scenario() const { return s_; }
    const TimeGrid& grid() const { return grid_; }
    const SimulationConfig& cfg() const { return cfg_; }
    std::ostream& log() { return log_; }

private:
    Command cmd_;
    const Scenario& s_;
    std::ostream& log_;
    TimeGrid grid_;
    SimulationConfig cfg_;
    fs::path out_;
    json csv_files_ = json::array();
};

bool has_vasicek(const Scenario& s) {
    for (const DriverSpec& d : s.drivers)
        if (d.kind == DriverKind::VasicekShortRate) return true;
    return false;
}

std::string cash_currency(const Scenario& s, const ContractSpec& c) {
    return c.currency.empty() ? s.curves.domestic() : c.currency;
}

RateCurve numeraire_rate(const Scenario& s, const std::string& ccy) {
    if (ccy == s.curves.domestic()) {
        if (s.measure.kind == MeasureTag::Kind::ForeignBasis)
            throw ValidationError("cash flows in " + ccy + " need the risk-neutral measure");
        return s.curves.get("r");
    }
    if (s.measure.kind != MeasureTag::Kind::ForeignBasis || s.measure.currency != ccy)
        throw ValidationError("cash flows in " + ccy + " need the foreign-basis measure of " + ccy);
    return basis_rate(s.curves, ccy);
}

struct CsaSetup {
    ContractSpec contract;
    CsaSpec csa;
    CsaContext ctx;
    RateCurve z, r_num;
    MarkFunction mark;
    double analytic = 0.0;
    std::optional<double> decomposition_error;
};

CsaSetup csa_setup(const Scenario& s, const ContractBlock& b) {
    if (!s.csa) throw ValidationError("contract '" + b.spec.id + "' needs a csa block");
    if (has_vasicek(s)) throw UnsupportedError("CSA Monte Carlo pricing needs deterministic rates");
    CsaSetup out;
    out.contract = b.spec;
    const ContractSpec& c = out.contract;
    const std::string f = cash_currency(s, c);
    out.r_num = numeraire_rate(s, f);
    out.csa = s.csa_spec(c.maturity);
    const std::string& g = out.csa.currency;
    RateCurve r_gb = basis_rate(s.curves, g);
    out.ctx.ell = b.dividend_spread.empty() ? RateCurve() : s.curves.get(b.dividend_spread);
    if (g != f) {
        if (s.csa->fx_driver.empty()) throw ValidationError("collateral in " + g + " needs csa.fx_driver");
        out.ctx.r_gb = r_gb;
        out.ctx.fx_driver = s.csa->fx_driver;
    }
    out.z = blended_rate(BlendVariant::ForeignMeasure, out.csa.haircut, out.csa.remuneration, r_gb, out.r_num,
                         out.ctx.ell);
    const DriverSpec& u = s.driver(c.underlying);
    if (u.kind != DriverKind::LognormalJumpAsset || u.drift_source != "risk-neutral")
        throw UnsupportedError("CSA marks need a risk-neutral lognormal underlying");
    if (c.kind == ContractKind::EuropeanOption) {
        if (u.has_jumps()) throw UnsupportedError("Black marks need an underlying without jumps");
        auto m = std::make_shared<CsaEuropeanMark>(c, u.sigma, out.z, out.r_num, u.dividends);
        out.mark = [m](double t, double spot) { return (*m)(t, spot); };
    } else if (c.kind == ContractKind::ForwardContract) {
        if (!c.fixings.empty() || c.payment_lag != 0.0)
            throw UnsupportedError("forward marks need a single fixing without lag");
        out.mark = [c, z = out.z, r = out.r_num, div = u.dividends](double t, double spot) {
            if (t >= c.maturity) return c.notional * (spot - c.strike);
            return c.notional * discount_factor(z, t, c.maturity) *
                   (forward_price(spot, div, r, t, c.maturity, {}) - c.strike);
        };
    } else {
        throw UnsupportedError(std::string("no CSA Monte Carlo pricer for ") + to_string(c.kind));
    }
    out.analytic = out.mark(0.0, u.initial);
    out.ctx.analytic = out.analytic;
    bool plain = std::all_of(out.csa.haircut.rates().begin(), out.csa.haircut.rates().end(), [](double a) { return a == 0.0; }) &&
                 std::all_of(out.ctx.ell.rates().begin(), out.ctx.ell.rates().end(), [](double l) { return l == 0.0; });
    if (g != f && plain) {
        const double T = c.maturity;
        double lhs = discount_factor(out.z, 0.0, T);
        double rhs = discount_factor(out.csa.remuneration, 0.0, T) * discount_factor(out.r_num, 0.0, T) /
                     discount_factor(r_gb, 0.0, T);
        out.decomposition_error = std::abs(lhs - rhs);
    }
    return out;
}

int run_price(Job& job) {
    const Scenario& s = job.scenario();
    std::vector<const ContractBlock*> list;
    for (const ContractBlock& c : s.contracts)
        if (c.spec.kind == ContractKind::EuropeanOption || c.spec.kind == ContractKind::ForwardContract) list.push_back(&c);
    if (list.empty()) throw ValidationError("price needs a european-option or forward-contract block");
    Simulator sim = job.simulator();
    json results = json::array();
    bool pass = true;
    for (const ContractBlock* b : list) {
        CsaSetup st = csa_setup(s, *b);
        auto acc = sim.map_blocks<PriceMcAccumulator>(job.cfg(), [&](const PathSet& ps) {
            return price_mc_block(st.contract, ps, st.csa, st.mark, st.ctx);
        });
        PriceMcResult r = finish_price_mc(acc, st.analytic, job.cfg().seed);
        double bound = margination_bias_bound(st.csa, st.ctx, st.z, st.r_num, st.analytic, st.contract.maturity,
                                              job.grid());
        double err = r.price.mean - st.analytic;
        bool agree = std::abs(err) <= 3.0 * r.price.se + bound;
        bool ok = agree && r.estimators_agree;
        json row = {{"id", st.contract.id},
                    {"currency", cash_currency(s, st.contract)},
                    {"analytic", st.analytic},
                    {"mc", r.price.mean},
                    {"se", r.price.se},
                    {"bias_bound", bound},
                    {"agreement", agree},
                    {"pnl_estimator", {{"mean", r.pnl.mean}, {"se", r.pnl.se}}},
                    {"estimator_residual", {{"mean", r.residual.mean}, {"se", r.residual.se}}},
                    {"approximation_term", {{"mean", r.approx.mean}, {"se", r.approx.se}}},
                    {"estimators_agree", r.estimators_agree},
                    {"discount_factor_z", discount_factor(st.z, 0.0, st.contract.maturity)},
                    {"pass", ok}};
        if (st.decomposition_error) {
            bool dec = *st.decomposition_error <= 1e-12;
            row["discount_decomposition_error"] = *st.decomposition_error;
            ok = ok && dec;
            row["pass"] = ok;
        }
        job.table("price_" + st.contract.id, {{st.contract.maturity, err, r.price.se, agree},
                                               {st.contract.maturity, r.residual.mean, r.residual.se, r.estimators_agree}});
        results.push_back(row);
        pass = pass && ok;
    }
    return job.finish(results, pass);
}

struct ForwardOracle {
    double forward = 0.0;
    double zcb = 0.0;
};

ForwardOracle forward_oracle(const Scenario& s, const ContractSpec& c) {
    const DriverSpec& u = s.driver(c.underlying);
    const double U = c.forward_date();
    for (const DriverSpec& d : s.drivers) {
        if (d.kind != DriverKind::VasicekShortRate) continue;
        if (u.dividends.has_proportional() || !u.dividends.deterministic_cash())
            throw UnsupportedError("stochastic-rate forwards need deterministic cash dividends");
        auto P = [&](double t) { return vasicek_zcb(d.mean_reversion, d.long_run, d.sigma, d.initial, 0.0, t); };
        double pv = 0.0;
        for (const CashDividend& cd : u.dividends.cash)
            if (cd.time > 0.0 && cd.time <= U + TimeGrid::tolerance) pv += cd.amount * P(cd.time);
        return {(u.initial - pv) / P(U), P(U)};
    }
    RateCurve r = numeraire_rate(s, cash_currency(s, c));
    return {forward_price(u.initial, u.dividends, r, 0.0, U, {}), discount_factor(r, 0.0, U)};
}

int run_forward(Job& job) {
    const Scenario& s = job.scenario();
    Simulator sim = job.simulator();
    json results = json::array();
    bool pass = true, any = false;
    const bool stochastic = has_vasicek(s);
    for (const ContractBlock& b : s.contracts) {
        if (b.spec.kind != ContractKind::ForwardContract) continue;
        any = true;
        const ContractSpec& c = b.spec;
        ForwardOracle o = forward_oracle(s, c);
        const double U = c.forward_date();
        auto acc = sim.map_blocks<ForwardAccumulator>(job.cfg(), [&](const PathSet& ps) {
            return forward_block(ps, c.underlying, U, o.zcb);
        });
        McEstimate tf = make_estimate(acc.t_forward, acc.n_paths, job.cfg().seed);
        McEstimate rn = make_estimate(acc.risk_neutral, acc.n_paths, job.cfg().seed);
        McEstimate zcb = make_estimate(acc.inv_bank, acc.n_paths, job.cfg().seed);
        McEstimate gap = make_estimate(acc.difference, acc.n_paths, job.cfg().seed);
        const double floor = kMartingaleFloor * std::max(1.0, std::abs(o.forward));
        bool tf_ok = std::abs(tf.mean - o.forward) <= 3.0 * tf.se + floor;
        bool zcb_ok = std::abs(zcb.mean - o.zcb) <= 3.0 * zcb.se + kMartingaleFloor;
        double cov = acc.covariance();
        bool ok = tf_ok && zcb_ok;
        json row = {{"id", c.id},
                    {"delivery", U},
                    {"analytic", o.forward},
                    {"t_forward", {{"mean", tf.mean}, {"se", tf.se}, {"pass", tf_ok}}},
                    {"risk_neutral", {{"mean", rn.mean}, {"se", rn.se}}},
                    {"zcb", {{"analytic", o.zcb}, {"mc", zcb.mean}, {"se", zcb.se}, {"pass", zcb_ok}}},
                    {"futures_minus_forward", {{"mean", gap.mean}, {"se", gap.se}}},
                    {"cov_spot_inverse_bank", cov}};
        std::vector<CsvRow> rows{{U, tf.mean - o.forward, tf.se, tf_ok}, {U, zcb.mean - o.zcb, zcb.se, zcb_ok}};
        if (stochastic) {
            // f - F = -Cov(S_T, 1/B_T) / P(T): signs must agree when the gap is resolved
            bool resolved = std::abs(gap.mean) > 3.0 * gap.se;
            bool sign_ok = !resolved || (gap.mean > 0.0) == (cov < 0.0);
            row["convexity_sign_consistent"] = sign_ok;
            ok = ok && sign_ok;
        } else {
            bool rn_ok = std::abs(rn.mean - o.forward) <= 3.0 * rn.se + floor;
            row["risk_neutral"]["pass"] = rn_ok;
            rows.push_back({U, rn.mean - o.forward, rn.se, rn_ok});
            ok = ok && rn_ok;
        }
        row["pass"] = ok;
        job.table("forward_" + c.id, rows);
        results.push_back(row);
        pass = pass && ok;
    }
    if (!any) throw ValidationError("forward needs a forward-contract block");
    return job.finish(results, pass);
}

struct VerifyAcc {
    std::vector<MartingaleAccumulator> mart;
    std::vector<std::vector<double>> worst;  // replication then total-return residuals per checkpoint
    std::vector<RunningStats> pnl;
    std::size_t n = 0;
    bool init = false;

    void merge(const VerifyAcc& o) {
        if (!o.init) return;
        if (!init) {
            *this = o;
            return;
        }
        for (std::size_t i = 0; i < mart.size(); ++i) mart[i].merge(o.mart[i]);
        for (std::size_t i = 0; i < worst.size(); ++i)
            for (std::size_t j = 0; j < worst[i].size(); ++j) worst[i][j] = std::max(worst[i][j], o.worst[i][j]);
        for (std::size_t i = 0; i < pnl.size(); ++i) pnl[i].merge(o.pnl[i]);
        n += o.n;
    }
};

NumeraireSpec numeraire_of(const NumeraireBlock& b) {
    if (b.kind == "curve") return NumeraireSpec::curve(b.id);
    if (b.kind == "driver") return NumeraireSpec::driver(b.id);
    return NumeraireSpec::bank();
}

DeflatedGain total_return_gain(const PathSet& ps, const std::string& id, std::vector<double>& worst,
                               const std::vector<std::size_t>& idx) {
    const std::size_t d = ps.driver_index(id);
    const DriverSpec& spec = ps.drivers()[d];
    const std::size_t n = ps.n_times();
    DeflatedGain g;
    g.n_paths = ps.n_paths();
    g.n_times = n;
    g.antithetic = ps.antithetic();
    g.times = ps.grid().times();
    g.value.resize(g.n_paths * n);
    for (std::size_t p = 0; p < g.n_paths; ++p) {
        auto S = ps.values(d, p);
        auto tr = total_return(spec.dividends, ps.grid(), S, ps.paid(d, p));
        auto rec = total_return_recursive(spec.dividends, ps.grid(), S, ps.paid(d, p));
        for (std::size_t k = 0; k < n; ++k) g.value[p * n + k] = tr[k] / ps.bank(p, k);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            double a = tr[idx[j]], b = rec[idx[j]];
            worst[j] = std::max(worst[j], std::abs(a - b) / std::max(std::abs(a), 1e-300));
        }
    }
    return g;
}

std::vector<double> pnl_legs(const Scenario& s, const PnlCheck& c, const PathSet& ps) {
    auto times = periodic_times(0.0, c.maturity, c.margin_frequency);
    if (c.kind == "repo") {
        RepoTerms t{s.curves.get(c.kappa), s.curves.get(c.c), c.alpha, times};
        return repo_seller_pnl(ps, c.asset, t);
    }
    if (c.kind == "lending") {
        LendingTerms t{c.ell.empty() ? RateCurve() : s.curves.get(c.ell), s.curves.get(c.c), c.alpha, times};
        return lender_pnl(ps, c.asset, t);
    }
    if (has_vasicek(s)) throw UnsupportedError("futures quotes need deterministic rates");
    FuturesTerms t{s.curves.get(c.c), c.initial_margin, times};
    return futures_investor_pnl(ps, c.asset, t, s.curves.get("r"), c.maturity);
}

int run_verify(Job& job) {
    const Scenario& s = job.scenario();
    if (!s.verify) throw ValidationError("verify needs a verify block");
    const VerifyBlock& v = *s.verify;
    const TimeGrid& g = job.grid();
    std::vector<std::size_t> idx;
    for (double t : v.times) idx.push_back(g.index_of(t, "diagnostic"));
    const NumeraireSpec num = numeraire_of(v.numeraire);
    for (const std::string& id : v.martingale)
        if (s.driver(id).kind != DriverKind::LognormalJumpAsset)
            throw ValidationError("martingale check '" + id + "' needs an asset driver");
    for (const auto* list : {&v.replication, &v.total_return})
        for (const std::string& id : *list)
            if (s.driver(id).kind != DriverKind::LognormalJumpAsset || s.driver(id).dividends.has_proportional())
                throw ValidationError("'" + id + "' must be an asset with cash dividends only");
    std::vector<CsaSetup> gains;
    for (const std::string& id : v.csa_gain) gains.push_back(csa_setup(s, s.contract(id)));

    Simulator sim = job.simulator();
    auto acc = sim.map_blocks<VerifyAcc>(job.cfg(), [&](const PathSet& ps) {
        VerifyAcc a;
        a.init = true;
        a.n = ps.n_paths();
        for (const std::string& id : v.martingale) {
            MartingaleAccumulator m(g, v.times);
            m.add(deflated_gain(ps, id, num, s.curves));
            a.mart.push_back(std::move(m));
        }
        for (const CsaSetup& st : gains) {
            std::vector<double> ts;
            for (double t : v.times)
                if (t <= st.contract.maturity + TimeGrid::tolerance) ts.push_back(t);
            MartingaleAccumulator m(g, ts);
            m.add(csa_deflated_gain(st.contract, ps, st.csa, st.mark, st.ctx));
            a.mart.push_back(std::move(m));
        }
        for (const std::string& id : v.replication) {
            auto res = self_financing_replication(ps, id, s.curves);
            std::vector<double> w(idx.size(), 0.0);
            for (std::size_t p = 0; p < ps.n_paths(); ++p)
                for (std::size_t j = 0; j < idx.size(); ++j)
                    w[j] = std::max(w[j], std::abs(res[p * ps.n_times() + idx[j]]));
            a.worst.push_back(std::move(w));
        }
        for (const std::string& id : v.total_return) {
            std::vector<double> w(idx.size(), 0.0);
            MartingaleAccumulator m(g, v.times);
            m.add(total_return_gain(ps, id, w, idx));
            a.mart.push_back(std::move(m));
            a.worst.push_back(std::move(w));
        }
        for (const PnlCheck& c : v.pnl) {
            RunningStats st;
            add_paths(st, pnl_legs(s, c, ps), ps.antithetic());
            a.pnl.push_back(st);
        }
        return a;
    });

    json results = json::array();
    bool pass = true;
    std::size_t mi = 0, wi = 0;
    auto martingale_rows = [&](const std::string& name, const MartingaleReport& r) {
        std::vector<CsvRow> rows;
        for (const MartingaleRow& row : r.rows) rows.push_back({row.time, row.drift, row.se, row.pass});
        bool ok = job.table(name, rows);
        results.push_back({{"check", name}, {"pass", ok}});
        pass = pass && ok;
    };
    for (const std::string& id : v.martingale) martingale_rows("martingale_" + id, acc.mart[mi++].finish());
    for (const std::string& id : v.csa_gain) martingale_rows("csa_gain_" + id, acc.mart[mi++].finish());
    auto residual_rows = [&](const std::string& name, const std::vector<double>& w) {
        std::vector<CsvRow> rows;
        for (std::size_t j = 0; j < idx.size(); ++j) rows.push_back({v.times[j], w[j], 0.0, w[j] <= kReplicationTol});
        bool ok = job.table(name, rows);
        results.push_back({{"check", name}, {"pass", ok}});
        pass = pass && ok;
    };
    for (const std::string& id : v.replication) residual_rows("replication_" + id, acc.worst[wi++]);
    for (const std::string& id : v.total_return) {
        residual_rows("total_return_" + id, acc.worst[wi++]);
        martingale_rows("total_return_martingale_" + id, acc.mart[mi++].finish());
    }
    for (std::size_t i = 0; i < v.pnl.size(); ++i) {
        const PnlCheck& c = v.pnl[i];
        PnlResult r = pnl_zero_test(acc.pnl[i], acc.n, job.cfg().seed, s.driver(c.asset).initial);
        std::string name = "pnl_" + c.kind + "_" + c.asset;
        bool ok = job.table(name, {{c.maturity, r.estimate.mean, r.estimate.se, r.pass}});
        results.push_back({{"check", name}, {"pass", ok}});
        pass = pass && ok;
    }
    return job.finish(results, pass);
}

int run_converge(Job& job) {
    const Scenario& s = job.scenario();
    if (!s.converge) throw ValidationError("converge needs a converge block");
    CsaSetup st = csa_setup(s, s.contract(s.converge->contract));
    Simulator sim = job.simulator();
    ConvergenceReport rep = margination_convergence(sim, job.cfg(), st.contract, st.csa, s.converge->frequencies,
                                                    st.mark, st.ctx, st.analytic);
    std::string text = "label,per_year,bias,bias_se,crn_bias,crn_se,bias_bound\n";
    json rows = json::array();
    for (const ConvergenceRow& r : rep.rows) {
        CsaSpec c = st.csa;
        c.continuous = r.per_year == 0.0;
        if (!c.continuous) c.margin_times = periodic_times(0.0, st.contract.maturity, r.per_year);
        double bound = margination_bias_bound(c, st.ctx, st.z, st.r_num, st.analytic, st.contract.maturity, job.grid());
        text += r.label + "," + num(r.per_year) + "," + num(r.bias) + "," + num(r.bias_se) + "," + num(r.crn_bias) +
                "," + num(r.crn_se) + "," + num(bound) + "\n";
        rows.push_back({{"label", r.label},
                        {"per_year", r.per_year},
                        {"bias", r.bias},
                        {"bias_se", r.bias_se},
                        {"crn_bias", r.crn_bias},
                        {"crn_se", r.crn_se},
                        {"bias_bound", bound}});
    }
    job.raw_table("convergence", text);
    if (!rep.monotone) job.log() << "FAIL convergence: |bias| is not non-increasing in margin frequency\n";
    json results = {{"contract", st.contract.id}, {"analytic", st.analytic}, {"rows", rows}, {"monotone", rep.monotone}};
    return job.finish(results, rep.monotone);
}

}  // namespace

Command command_from_string(const std::string& s) {
    if (s == "price") return Command::Price;
    if (s == "forward") return Command::Forward;
    if (s == "verify") return Command::Verify;
    if (s == "converge") return Command::Converge;
    throw ValidationError("unknown command '" + s + "'");
}

const char* to_string(Command c) {
    switch (c) {
        case Command::Price: return "price";
        case Command::Forward: return "forward";
        case Command::Verify: return "verify";
        case Command::Converge: return "converge";
    }
    return "?";
}

int run_command(Command command, const Scenario& scenario, const RunOptions& options, std::ostream& log) {
    Job job(command, scenario, options, log);
    switch (command) {
        case Command::Price: return run_price(job);
        case Command::Forward: return run_forward(job);
        case Command::Verify: return run_verify(job);
        case Command::Converge: return run_converge(job);
    }
    return kExitValidation;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const LookupError*>(&e) ||
        dynamic_cast<const UnsupportedError*>(&e) || dynamic_cast<const HypothesisError*>(&e) ||
        dynamic_cast<const DomainError*>(&e))
        return kExitValidation;
    if (dynamic_cast<const StatisticsError*>(&e)) return kExitStatistical;
    return 1;
}

}  // namespace collat
