#include "collat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "collat/errors.hpp"

namespace collat {

using json = nlohmann::json;

namespace {

class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return j_; }

    [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(path_ + ": " + msg); }

    void keys(std::initializer_list<const char*> allowed) const {
        if (!j_.is_object()) fail("expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
            if (!ok) fail("unknown key '" + it.key() + "'");
        }
    }

    bool has(const char* k) const { return j_.is_object() && j_.contains(k); }

    Node at(const char* k) const {
        if (!has(k)) fail(std::string("missing required key '") + k + "'");
        return child(k);
    }

    Node child(const std::string& k) const { return Node(j_.at(k), path_ + "." + k); }

    std::vector<Node> items() const {
        if (!j_.is_array()) fail("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]");
        return out;
    }

    double number() const {
        if (!j_.is_number()) fail("expected a number");
        double v = j_.get<double>();
        if (!std::isfinite(v)) fail("must be finite");
        return v;
    }
    double number(const char* k) const { return at(k).number(); }
    double number(const char* k, double def) const { return has(k) ? child(k).number() : def; }

    std::uint64_t unsigned_integer(const char* k, std::uint64_t def) const {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            child(k).fail("expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string str() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    std::string str(const char* k) const { return at(k).str(); }
    std::string str(const char* k, const std::string& def) const { return has(k) ? child(k).str() : def; }

    bool boolean(const char* k, bool def) const {
        if (!has(k)) return def;
        if (!j_.at(k).is_boolean()) child(k).fail("expected true or false");
        return j_.at(k).get<bool>();
    }

    std::vector<double> numbers(const char* k) const {
        std::vector<double> out;
        if (!has(k)) return out;
        for (const Node& n : child(k).items()) out.push_back(n.number());
        return out;
    }

    std::vector<std::string> strings(const char* k) const {
        std::vector<std::string> out;
        if (!has(k)) return out;
        for (const Node& n : child(k).items()) out.push_back(n.str());
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

// Runs f and prefixes module errors with the JSON path.
template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        std::string what = e.what();
        if (what.rfind("scenario", 0) == 0) throw;
        throw ValidationError(path + ": " + what);
    } catch (const LookupError& e) {
        throw ValidationError(path + ": " + e.what());
    } catch (const HypothesisError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

RateCurve parse_curve(const Node& n) {
    std::vector<double> pillars, rates;
    for (const Node& p : n.items()) {
        p.keys({"pillar", "rate"});
        pillars.push_back(p.number("pillar"));
        rates.push_back(p.number("rate"));
    }
    return with_path(n.path(), [&] { return RateCurve(pillars, rates); });
}

json curve_json(const RateCurve& c) {
    json a = json::array();
    for (std::size_t i = 0; i < c.pillars().size(); ++i) a.push_back({{"pillar", c.pillars()[i]}, {"rate", c.rates()[i]}});
    return a;
}

MeasureTag parse_measure(const Node& n) {
    n.keys({"kind", "currency", "maturity", "numeraire"});
    std::string kind = n.str("kind");
    if (kind == "risk-neutral") return MeasureTag::risk_neutral();
    if (kind == "foreign-basis") return MeasureTag::foreign_basis(n.str("currency"));
    if (kind == "t-forward") return MeasureTag::t_forward(n.number("maturity"));
    if (kind == "asset-numeraire") return MeasureTag::asset_numeraire(n.str("numeraire"));
    n.child("kind").fail("unknown measure '" + kind + "'");
}

json measure_json(const MeasureTag& m) {
    switch (m.kind) {
        case MeasureTag::Kind::RiskNeutral: return {{"kind", "risk-neutral"}};
        case MeasureTag::Kind::ForeignBasis: return {{"kind", "foreign-basis"}, {"currency", m.currency}};
        case MeasureTag::Kind::TForward: return {{"kind", "t-forward"}, {"maturity", m.maturity}};
        case MeasureTag::Kind::AssetNumeraire: return {{"kind", "asset-numeraire"}, {"numeraire", m.numeraire}};
    }
    return {};
}

DriverSpec parse_driver(const Node& n) {
    n.keys({"id", "kind", "initial", "sigma", "jumps", "mean_reversion", "long_run", "drift", "currency", "fx_to"});
    DriverSpec d;
    d.id = n.str("id");
    d.kind = with_path(n.path() + ".kind", [&] { return driver_kind_from_string(n.str("kind")); });
    d.initial = n.number("initial", d.kind == DriverKind::VasicekShortRate ? 0.0 : 1.0);
    d.sigma = n.number("sigma", 0.0);
    if (n.has("jumps")) {
        Node j = n.child("jumps");
        j.keys({"intensity", "mean", "stdev"});
        d.jump_intensity = j.number("intensity");
        d.jump_mean = j.number("mean", 0.0);
        d.jump_stdev = j.number("stdev", 0.0);
    }
    d.mean_reversion = n.number("mean_reversion", 0.0);
    d.long_run = n.number("long_run", 0.0);
    d.drift_source = n.str("drift", "risk-neutral");
    d.currency = n.str("currency", "");
    d.fx_to = n.str("fx_to", "");
    return d;
}

json driver_json(const DriverSpec& d) {
    json j = {{"id", d.id},
              {"kind", to_string(d.kind)},
              {"initial", d.initial},
              {"sigma", d.sigma},
              {"mean_reversion", d.mean_reversion},
              {"long_run", d.long_run},
              {"drift", d.drift_source},
              {"currency", d.currency},
              {"fx_to", d.fx_to}};
    if (d.has_jumps()) j["jumps"] = {{"intensity", d.jump_intensity}, {"mean", d.jump_mean}, {"stdev", d.jump_stdev}};
    return j;
}

DividendSchedule parse_dividends(const Node& n) {
    n.keys({"proportional", "cash", "horizon"});
    DividendSchedule s;
    if (n.has("proportional")) s.proportional = parse_curve(n.child("proportional"));
    if (n.has("cash"))
        for (const Node& c : n.child("cash").items()) {
            c.keys({"time", "amount", "proportion"});
            s.cash.push_back({c.number("time"), c.number("amount", 0.0), c.number("proportion", 0.0)});
        }
    s.horizon = n.number("horizon", 0.0);
    with_path(n.path(), [&] { s.validate(); });
    return s;
}

json dividends_json(const DividendSchedule& s) {
    json cash = json::array();
    for (const CashDividend& c : s.cash) cash.push_back({{"time", c.time}, {"amount", c.amount}, {"proportion", c.proportion}});
    return {{"proportional", curve_json(s.proportional)}, {"cash", cash}, {"horizon", s.horizon}};
}

void require_curve(const CurveSet& cs, const Node& n, const std::string& id) {
    if (!cs.contains(id)) n.fail("unknown curve '" + id + "'");
}

CsaBlock parse_csa(const Node& n) {
    n.keys({"currency", "remuneration", "haircut", "margin_frequency", "margin_times", "continuous", "fx_driver"});
    CsaBlock c;
    c.currency = n.str("currency");
    c.remuneration = n.str("remuneration");
    c.haircut = n.str("haircut", "");
    c.margin_frequency = n.number("margin_frequency", 0.0);
    c.margin_times = n.numbers("margin_times");
    c.continuous = n.boolean("continuous", false);
    c.fx_driver = n.str("fx_driver", "");
    int modes = (c.margin_frequency > 0.0) + !c.margin_times.empty() + c.continuous;
    if (modes != 1) n.fail("give exactly one of margin_frequency, margin_times or continuous");
    if (c.margin_frequency < 0.0) n.child("margin_frequency").fail("must be positive");
    return c;
}

json csa_json(const CsaBlock& c) {
    return {{"currency", c.currency},
            {"remuneration", c.remuneration},
            {"haircut", c.haircut},
            {"margin_frequency", c.margin_frequency},
            {"margin_times", c.margin_times},
            {"continuous", c.continuous},
            {"fx_driver", c.fx_driver}};
}

ContractBlock parse_contract(const Node& n) {
    n.keys({"id", "kind", "underlying", "currency", "strike", "fixings", "payment_lag", "call", "maturity", "notional",
            "delivery", "dividend_spread"});
    ContractBlock b;
    ContractSpec& c = b.spec;
    c.id = n.str("id");
    c.kind = with_path(n.path() + ".kind", [&] { return contract_kind_from_string(n.str("kind")); });
    c.underlying = n.str("underlying");
    c.currency = n.str("currency", "");
    c.strike = n.number("strike", 0.0);
    c.fixings = n.numbers("fixings");
    c.payment_lag = n.number("payment_lag", 0.0);
    c.call = n.boolean("call", true);
    c.maturity = n.number("maturity");
    c.notional = n.number("notional", 1.0);
    c.delivery = n.number("delivery", 0.0);
    b.dividend_spread = n.str("dividend_spread", "");
    with_path(n.path(), [&] { c.validate(); });
    return b;
}

json contract_json(const ContractBlock& b) {
    const ContractSpec& c = b.spec;
    return {{"id", c.id},         {"kind", to_string(c.kind)}, {"underlying", c.underlying},
            {"currency", c.currency}, {"strike", c.strike},        {"fixings", c.fixings},
            {"payment_lag", c.payment_lag}, {"call", c.call},      {"maturity", c.maturity},
            {"notional", c.notional}, {"delivery", c.delivery},    {"dividend_spread", b.dividend_spread}};
}

RunBlock parse_run(const Node& n) {
    n.keys({"paths", "seed", "steps_per_year", "antithetic", "block_size", "horizon", "out", "path_dump"});
    RunBlock r;
    r.paths = n.unsigned_integer("paths", r.paths);
    r.seed = n.unsigned_integer("seed", r.seed);
    r.steps_per_year = n.number("steps_per_year", r.steps_per_year);
    r.antithetic = n.boolean("antithetic", r.antithetic);
    r.block_size = n.unsigned_integer("block_size", r.block_size);
    r.horizon = n.number("horizon", 0.0);
    r.out = n.str("out", r.out);
    if (n.has("path_dump")) {
        Node d = n.child("path_dump");
        d.keys({"file", "max_paths"});
        r.path_dump = PathDump{d.str("file"), d.unsigned_integer("max_paths", 10)};
    }
    if (r.paths < 2) n.child("paths").fail("need at least 2 paths");
    if (!(r.steps_per_year > 0.0)) n.child("steps_per_year").fail("must be positive");
    if (r.block_size == 0 || (r.antithetic && r.block_size % 2)) n.child("block_size").fail("must be a positive even number");
    if (r.horizon < 0.0) n.child("horizon").fail("must be >= 0");
    return r;
}

json run_json(const RunBlock& r) {
    json j = {{"paths", r.paths},
              {"seed", r.seed},
              {"steps_per_year", r.steps_per_year},
              {"antithetic", r.antithetic},
              {"block_size", r.block_size},
              {"horizon", r.horizon},
              {"out", r.out}};
    if (r.path_dump) j["path_dump"] = {{"file", r.path_dump->file}, {"max_paths", r.path_dump->max_paths}};
    return j;
}

PnlCheck parse_pnl(const Node& n) {
    n.keys({"kind", "asset", "kappa", "c", "ell", "alpha", "margin_frequency", "initial_margin", "maturity"});
    PnlCheck p;
    p.kind = n.str("kind");
    if (p.kind != "repo" && p.kind != "lending" && p.kind != "futures")
        n.child("kind").fail("expected repo, lending or futures");
    p.asset = n.str("asset");
    p.kappa = n.str("kappa", "");
    p.c = n.str("c");
    p.ell = n.str("ell", "");
    p.alpha = n.number("alpha", 0.0);
    p.margin_frequency = n.number("margin_frequency", 252.0);
    p.initial_margin = n.number("initial_margin", 0.0);
    p.maturity = n.number("maturity");
    if (p.alpha < 0.0) n.child("alpha").fail("haircut must satisfy alpha >= 0");
    if (!(p.margin_frequency > 0.0)) n.child("margin_frequency").fail("must be positive");
    if (!(p.maturity > 0.0)) n.child("maturity").fail("must be positive");
    if (p.kind == "repo" && p.kappa.empty()) n.fail("repo check needs a kappa curve");
    if (p.kind == "futures" && !(p.initial_margin > 0.0)) n.fail("futures check needs initial_margin > 0");
    return p;
}

json pnl_json(const PnlCheck& p) {
    return {{"kind", p.kind},   {"asset", p.asset}, {"kappa", p.kappa},
            {"c", p.c},         {"ell", p.ell},     {"alpha", p.alpha},
            {"margin_frequency", p.margin_frequency}, {"initial_margin", p.initial_margin}, {"maturity", p.maturity}};
}

VerifyBlock parse_verify(const Node& n) {
    n.keys({"times", "numeraire", "martingale", "replication", "total_return", "csa_gain", "pnl"});
    VerifyBlock v;
    v.times = n.numbers("times");
    if (n.has("numeraire")) {
        Node m = n.child("numeraire");
        m.keys({"kind", "id"});
        v.numeraire.kind = m.str("kind");
        v.numeraire.id = m.str("id", "");
        if (v.numeraire.kind != "bank" && v.numeraire.kind != "curve" && v.numeraire.kind != "driver")
            m.child("kind").fail("expected bank, curve or driver");
        if (v.numeraire.kind != "bank" && v.numeraire.id.empty()) m.fail("numeraire needs an id");
    }
    v.martingale = n.strings("martingale");
    v.replication = n.strings("replication");
    v.total_return = n.strings("total_return");
    v.csa_gain = n.strings("csa_gain");
    if (n.has("pnl"))
        for (const Node& p : n.child("pnl").items()) v.pnl.push_back(parse_pnl(p));
    if (v.times.empty()) n.fail("verify needs diagnostic times");
    for (double t : v.times)
        if (!(t > 0.0)) n.child("times").fail("diagnostic times must be positive");
    return v;
}

json verify_json(const VerifyBlock& v) {
    json pnl = json::array();
    for (const PnlCheck& p : v.pnl) pnl.push_back(pnl_json(p));
    return {{"times", v.times},
            {"numeraire", {{"kind", v.numeraire.kind}, {"id", v.numeraire.id}}},
            {"martingale", v.martingale},
            {"replication", v.replication},
            {"total_return", v.total_return},
            {"csa_gain", v.csa_gain},
            {"pnl", pnl}};
}

ConvergeBlock parse_converge(const Node& n) {
    n.keys({"contract", "frequencies"});
    ConvergeBlock c;
    c.contract = n.str("contract");
    for (const Node& f : n.at("frequencies").items()) {
        f.keys({"label", "per_year"});
        double py = f.number("per_year");
        if (!(py > 0.0)) f.child("per_year").fail("must be positive");
        c.frequencies.push_back({f.str("label"), py});
    }
    if (c.frequencies.empty()) n.child("frequencies").fail("need at least one margin frequency");
    for (std::size_t i = 1; i < c.frequencies.size(); ++i)
        if (!(c.frequencies[i].per_year > c.frequencies[i - 1].per_year))
            n.child("frequencies").fail("frequencies must run from coarse to fine");
    return c;
}

json converge_json(const ConvergeBlock& c) {
    json f = json::array();
    for (const auto& m : c.frequencies) f.push_back({{"label", m.label}, {"per_year", m.per_year}});
    return {{"contract", c.contract}, {"frequencies", f}};
}

void check_references(const Scenario& s, const Node& root) {
    const CurveSet& cs = s.curves;
    std::set<std::string> ids;
    bool vasicek = false, fx = false;
    for (std::size_t i = 0; i < s.drivers.size(); ++i) {
        const DriverSpec& d = s.drivers[i];
        Node n = root.child("drivers").items()[i];
        if (!ids.insert(d.id).second) n.child("id").fail("duplicate driver id '" + d.id + "'");
        with_path(n.path(), [&] { d.validate(); });
        if (d.drift_source != "risk-neutral") require_curve(cs, n.child("drift"), d.drift_source);
        if (d.kind == DriverKind::VasicekShortRate) vasicek = true;
        if (d.kind == DriverKind::LognormalFx) {
            fx = true;
            if (!cs.has_currency(d.currency)) n.fail("undeclared currency '" + d.currency + "'");
            if (!cs.has_currency(d.fx_to)) n.fail("undeclared currency '" + d.fx_to + "'");
        }
    }
    if (vasicek && fx) root.child("drivers").fail("a Vasicek short rate cannot be combined with fx drivers");
    for (std::size_t i = 0; i < s.correlation.size(); ++i) {
        Node n = root.child("correlation").items()[i];
        for (const std::string& id : {s.correlation[i].a, s.correlation[i].b})
            if (!ids.count(id)) n.fail("unknown driver '" + id + "'");
    }
    if (root.has("correlation")) with_path(root.path() + ".correlation", [&] { s.correlation_matrix().cholesky(); });

    const MeasureTag& m = s.measure;
    if (m.kind == MeasureTag::Kind::ForeignBasis && !cs.has_currency(m.currency))
        root.child("measure").fail("undeclared currency '" + m.currency + "'");
    if (m.kind == MeasureTag::Kind::AssetNumeraire && !ids.count(m.numeraire))
        root.child("measure").fail("unknown driver '" + m.numeraire + "'");
    if (m.kind == MeasureTag::Kind::TForward && (vasicek || !(m.maturity > 0.0)))
        root.child("measure").fail("t-forward measure needs a positive maturity and deterministic rates");

    if (s.csa) {
        Node n = root.child("csa");
        if (!cs.has_currency(s.csa->currency)) n.child("currency").fail("undeclared currency '" + s.csa->currency + "'");
        require_curve(cs, n.child("remuneration"), s.csa->remuneration);
        if (!s.csa->haircut.empty()) {
            require_curve(cs, n.child("haircut"), s.csa->haircut);
            for (double a : cs.get(s.csa->haircut).rates())
                if (a < 0.0) n.child("haircut").fail("haircut must satisfy alpha >= 0");
        }
        if (!s.csa->fx_driver.empty() && !ids.count(s.csa->fx_driver))
            n.child("fx_driver").fail("unknown driver '" + s.csa->fx_driver + "'");
    }

    std::set<std::string> cids;
    for (std::size_t i = 0; i < s.contracts.size(); ++i) {
        const ContractBlock& c = s.contracts[i];
        Node n = root.child("contracts").items()[i];
        if (!cids.insert(c.spec.id).second) n.child("id").fail("duplicate contract id '" + c.spec.id + "'");
        if (!ids.count(c.spec.underlying)) n.child("underlying").fail("unknown driver '" + c.spec.underlying + "'");
        if (!c.dividend_spread.empty()) require_curve(cs, n.child("dividend_spread"), c.dividend_spread);
        if (!c.spec.currency.empty() && !cs.has_currency(c.spec.currency))
            n.child("currency").fail("undeclared currency '" + c.spec.currency + "'");
        if (s.csa && !s.csa->continuous && s.csa->margin_frequency == 0.0) {
            const auto& mt = s.csa->margin_times;
            if (mt.front() != 0.0 || std::abs(mt.back() - c.spec.maturity) > TimeGrid::tolerance)
                root.child("csa").child("margin_times").fail("margin times must run from 0 to the maturity of '" +
                                                             c.spec.id + "'");
        }
    }

    if (s.verify) {
        Node n = root.child("verify");
        auto need_driver = [&](const char* key, const std::vector<std::string>& list) {
            for (const std::string& id : list)
                if (!ids.count(id)) n.child(key).fail("unknown driver '" + id + "'");
        };
        need_driver("martingale", s.verify->martingale);
        need_driver("replication", s.verify->replication);
        need_driver("total_return", s.verify->total_return);
        for (const std::string& id : s.verify->csa_gain) {
            if (!cids.count(id)) n.child("csa_gain").fail("unknown contract '" + id + "'");
            if (!s.csa) n.child("csa_gain").fail("csa gain needs a csa block");
        }
        const NumeraireBlock& nb = s.verify->numeraire;
        if (nb.kind == "curve") require_curve(cs, n.child("numeraire"), nb.id);
        if (nb.kind == "driver" && !ids.count(nb.id)) n.child("numeraire").fail("unknown driver '" + nb.id + "'");
        for (std::size_t i = 0; i < s.verify->pnl.size(); ++i) {
            const PnlCheck& p = s.verify->pnl[i];
            Node pn = n.child("pnl").items()[i];
            if (!ids.count(p.asset)) pn.child("asset").fail("unknown driver '" + p.asset + "'");
            require_curve(cs, pn.child("c"), p.c);
            if (!p.kappa.empty()) require_curve(cs, pn.child("kappa"), p.kappa);
            if (!p.ell.empty()) require_curve(cs, pn.child("ell"), p.ell);
        }
    }
    if (s.converge) {
        Node n = root.child("converge");
        if (!cids.count(s.converge->contract)) n.child("contract").fail("unknown contract '" + s.converge->contract + "'");
        if (!s.csa) n.fail("convergence needs a csa block");
    }
    with_path(root.path(), [&] { Simulator(s.drivers, s.correlation_matrix(), s.measure, s.curves, s.grid()); });
}

}  // namespace

const DriverSpec& Scenario::driver(const std::string& id) const {
    for (const DriverSpec& d : drivers)
        if (d.id == id) return d;
    throw LookupError("unknown driver '" + id + "'");
}

const ContractBlock& Scenario::contract(const std::string& id) const {
    for (const ContractBlock& c : contracts)
        if (c.spec.id == id) return c;
    throw LookupError("unknown contract '" + id + "'");
}

CorrelationMatrix Scenario::correlation_matrix() const {
    CorrelationMatrix m(drivers.size());
    auto index = [&](const std::string& id) {
        for (std::size_t i = 0; i < drivers.size(); ++i)
            if (drivers[i].id == id) return i;
        throw LookupError("unknown driver '" + id + "'");
    };
    for (const CorrelationEntry& e : correlation) m.set(index(e.a), index(e.b), e.rho);
    return m;
}

CsaSpec Scenario::csa_spec(double maturity) const {
    if (!csa) throw ValidationError("scenario has no csa block");
    CsaSpec out;
    out.currency = csa->currency;
    out.remuneration = curves.get(csa->remuneration);
    if (!csa->haircut.empty()) out.haircut = curves.get(csa->haircut);
    out.continuous = csa->continuous;
    if (csa->margin_frequency > 0.0) out.margin_times = periodic_times(0.0, maturity, csa->margin_frequency);
    else if (!csa->continuous) out.margin_times = csa->margin_times;
    out.validate();
    return out;
}

double Scenario::horizon() const {
    if (run.horizon > 0.0) return run.horizon;
    double h = 0.0;
    for (const ContractBlock& c : contracts) h = std::max({h, c.spec.maturity, c.spec.forward_date()});
    if (verify) {
        for (double t : verify->times) h = std::max(h, t);
        for (const PnlCheck& p : verify->pnl) h = std::max(h, p.maturity);
    }
    if (measure.kind == MeasureTag::Kind::TForward) h = std::max(h, measure.maturity);
    if (!(h > 0.0)) throw ValidationError("nothing to simulate: give contracts, verify times or run.horizon");
    return h;
}

std::vector<double> Scenario::event_times() const {
    std::vector<double> ev;
    const double h = horizon();
    for (const DriverSpec& d : drivers)
        for (double t : d.dividends.event_times()) ev.push_back(t);
    for (const ContractBlock& c : contracts) {
        ev.push_back(c.spec.maturity);
        ev.push_back(c.spec.forward_date());
        for (double t : c.spec.fixing_times()) ev.push_back(t);
        if (csa && !csa->continuous && c.spec.maturity <= h)
            for (double t : csa_spec(c.spec.maturity).margin_times) ev.push_back(t);
        if (converge && converge->contract == c.spec.id)
            for (const auto& f : converge->frequencies)
                for (double t : periodic_times(0.0, c.spec.maturity, f.per_year)) ev.push_back(t);
    }
    if (verify) {
        for (double t : verify->times) ev.push_back(t);
        for (const PnlCheck& p : verify->pnl)
            for (double t : periodic_times(0.0, p.maturity, p.margin_frequency)) ev.push_back(t);
    }
    std::sort(ev.begin(), ev.end());
    ev.erase(std::remove_if(ev.begin(), ev.end(), [&](double t) { return t > h + TimeGrid::tolerance; }), ev.end());
    return ev;
}

TimeGrid Scenario::grid() const { return TimeGrid::uniform_with_events(horizon(), run.steps_per_year, event_times()); }

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: malformed JSON: ") + e.what());
    }
    Node root(doc, "scenario");
    root.keys({"name", "domestic", "currencies", "curves", "measure", "drivers", "dividends", "correlation", "csa",
               "contracts", "run", "verify", "converge"});
    Scenario s;
    s.name = root.str("name", "");
    s.curves = CurveSet(root.str("domestic", "EUR"));
    for (const std::string& c : root.strings("currencies")) s.curves.declare_currency(c);
    Node curves = root.at("curves");
    if (!curves.raw().is_object()) curves.fail("expected an object of curve arrays");
    for (auto it = curves.raw().begin(); it != curves.raw().end(); ++it)
        s.curves.set(it.key(), parse_curve(curves.child(it.key())));
    with_path("scenario.curves", [&] { s.curves.validate(); });
    if (root.has("measure")) s.measure = parse_measure(root.child("measure"));
    for (const Node& d : root.at("drivers").items()) s.drivers.push_back(parse_driver(d));
    if (root.has("dividends")) {
        Node dn = root.child("dividends");
        if (!dn.raw().is_object()) dn.fail("expected an object keyed by driver id");
        for (auto it = dn.raw().begin(); it != dn.raw().end(); ++it) {
            auto d = std::find_if(s.drivers.begin(), s.drivers.end(), [&](const DriverSpec& x) { return x.id == it.key(); });
            if (d == s.drivers.end()) dn.child(it.key()).fail("unknown driver '" + it.key() + "'");
            d->dividends = parse_dividends(dn.child(it.key()));
        }
    }
    if (root.has("correlation"))
        for (const Node& c : root.child("correlation").items()) {
            c.keys({"a", "b", "rho"});
            s.correlation.push_back({c.str("a"), c.str("b"), c.number("rho")});
        }
    if (root.has("csa")) s.csa = parse_csa(root.child("csa"));
    if (root.has("contracts"))
        for (const Node& c : root.child("contracts").items()) s.contracts.push_back(parse_contract(c));
    if (root.has("run")) s.run = parse_run(root.child("run"));
    if (root.has("verify")) s.verify = parse_verify(root.child("verify"));
    if (root.has("converge")) s.converge = parse_converge(root.child("converge"));
    check_references(s, root);
    return s;
}

Scenario load_scenario(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ValidationError("cannot read scenario file '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ValidationError& e) {
        throw ValidationError(file + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) {
    json curves = json::object();
    for (const auto& [id, c] : s.curves.curves()) curves[id] = curve_json(c);
    json currencies = json::array();
    for (const std::string& c : s.curves.currencies())
        if (c != s.curves.domestic()) currencies.push_back(c);
    json drivers = json::array(), dividends = json::object();
    for (const DriverSpec& d : s.drivers) {
        drivers.push_back(driver_json(d));
        if (d.dividends != DividendSchedule{}) dividends[d.id] = dividends_json(d.dividends);
    }
    json corr = json::array();
    for (const CorrelationEntry& e : s.correlation) corr.push_back({{"a", e.a}, {"b", e.b}, {"rho", e.rho}});
    json contracts = json::array();
    for (const ContractBlock& c : s.contracts) contracts.push_back(contract_json(c));
    json doc = {{"name", s.name},         {"domestic", s.curves.domestic()}, {"currencies", currencies},
                {"curves", curves},       {"measure", measure_json(s.measure)}, {"drivers", drivers},
                {"dividends", dividends}, {"correlation", corr},           {"contracts", contracts},
                {"run", run_json(s.run)}};
    if (s.csa) doc["csa"] = csa_json(*s.csa);
    if (s.verify) doc["verify"] = verify_json(*s.verify);
    if (s.converge) doc["converge"] = converge_json(*s.converge);
    return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a64(serialize_scenario(s)); }

}  // namespace collat
