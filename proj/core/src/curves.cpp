#include "collat/curves.hpp"

#include <algorithm>
#include <cmath>

#include "collat/errors.hpp"

namespace collat {

RateCurve::RateCurve() : RateCurve({0.0}, {0.0}) {}

RateCurve::RateCurve(std::vector<double> pillars, std::vector<double> rates)
    : pillars_(std::move(pillars)), rates_(std::move(rates)) {
    if (pillars_.empty() || pillars_.size() != rates_.size())
        throw ValidationError("rate curve needs one rate per pillar");
    if (pillars_.front() != 0.0) throw ValidationError("rate curve first pillar must be 0");
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        if (!std::isfinite(rates_[i]) || !std::isfinite(pillars_[i]))
            throw ValidationError("rate curve values must be finite");
        if (i > 0 && pillars_[i] <= pillars_[i - 1])
            throw ValidationError("rate curve pillars must be strictly increasing");
    }
    cumulative_.resize(pillars_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 1; i < pillars_.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] + rates_[i - 1] * (pillars_[i] - pillars_[i - 1]);
}

RateCurve RateCurve::flat(double rate) { return RateCurve({0.0}, {rate}); }

std::size_t RateCurve::segment(double t) const {
    auto it = std::upper_bound(pillars_.begin(), pillars_.end(), t);
    return it == pillars_.begin() ? 0 : static_cast<std::size_t>(it - pillars_.begin()) - 1;
}

double RateCurve::rate(double t) const { return rates_[segment(t)]; }

double RateCurve::integral(double s, double t) const {
    if (s < 0.0 || t < s) throw DomainError("rate integral needs 0 <= s <= t");
    if (rates_.size() == 1) return rates_[0] * (t - s);
    auto primitive = [this](double u) {
        std::size_t i = segment(u);
        return cumulative_[i] + rates_[i] * (u - pillars_[i]);
    };
    return primitive(t) - primitive(s);
}

RateCurve pointwise(const std::vector<const RateCurve*>& curves,
                    const std::function<double(const std::vector<double>&)>& f) {
    std::vector<double> knots;
    for (const RateCurve* c : curves) knots.insert(knots.end(), c->pillars().begin(), c->pillars().end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<double> pillars;
    std::vector<double> rates;
    std::vector<double> args(curves.size());
    for (double k : knots) {
        for (std::size_t j = 0; j < curves.size(); ++j) args[j] = curves[j]->rate(k);
        double v = f(args);
        if (!rates.empty() && rates.back() == v) continue;
        pillars.push_back(k);
        rates.push_back(v);
    }
    return RateCurve(std::move(pillars), std::move(rates));
}

RateCurve operator+(const RateCurve& a, const RateCurve& b) {
    return pointwise({&a, &b}, [](const std::vector<double>& x) { return x[0] + x[1]; });
}

RateCurve operator-(const RateCurve& a, const RateCurve& b) {
    return pointwise({&a, &b}, [](const std::vector<double>& x) { return x[0] - x[1]; });
}

RateCurve operator*(double k, const RateCurve& a) {
    return pointwise({&a}, [k](const std::vector<double>& x) { return k * x[0]; });
}

double bank_account(const RateCurve& curve, double t) {
    if (t < 0.0) throw DomainError("bank account needs t >= 0");
    return std::exp(curve.integral(0.0, t));
}

double discount_factor(const RateCurve& curve, double t, double T) {
    if (t < 0.0 || T < t) throw DomainError("discount factor needs 0 <= t <= T");
    return std::exp(-curve.integral(t, T));
}

CurveSet::CurveSet(std::string domestic) : domestic_(std::move(domestic)) {
    currencies_.insert(domestic_);
}

void CurveSet::set(const std::string& id, RateCurve curve) {
    curves_.insert_or_assign(id, std::move(curve));
    const std::string prefix = "basis.";
    if (id.rfind(prefix, 0) == 0) currencies_.insert(id.substr(prefix.size()));
}

const RateCurve& CurveSet::get(const std::string& id) const {
    auto it = curves_.find(id);
    if (it == curves_.end()) throw LookupError("unknown curve '" + id + "'");
    return it->second;
}

bool CurveSet::contains(const std::string& id) const { return curves_.count(id) > 0; }

void CurveSet::declare_currency(const std::string& ccy) { currencies_.insert(ccy); }

bool CurveSet::has_currency(const std::string& ccy) const { return currencies_.count(ccy) > 0; }

void CurveSet::validate() const {
    if (!contains("r")) throw ValidationError("curve set must contain the short rate curve 'r'");
    if (auto it = curves_.find(basis_curve_id(domestic_)); it != curves_.end()) {
        for (double v : it->second.rates())
            if (v != 0.0) throw ValidationError("basis drift of the domestic currency must be zero");
    }
}

std::string basis_curve_id(const std::string& ccy) { return "basis." + ccy; }

RateCurve basis_rate(const CurveSet& curves, const std::string& ccy) {
    if (!curves.has_currency(ccy)) throw LookupError("unknown currency '" + ccy + "'");
    const RateCurve& r = curves.get("r");
    if (ccy == curves.domestic()) return r;
    std::string id = basis_curve_id(ccy);
    if (!curves.contains(id)) return r;
    return r - curves.get(id);
}

RateCurve blended_rate(BlendVariant variant, const RateCurve& alpha, const RateCurve& c_g,
                       const RateCurve& r_gb, const RateCurve& r_num, const RateCurve& ell) {
    switch (variant) {
        case BlendVariant::ForeignMeasure:
        case BlendVariant::DomesticMeasure:
            return pointwise({&alpha, &c_g, &r_gb, &r_num, &ell}, [](const std::vector<double>& x) {
                return (1.0 + x[0]) * (x[1] - x[2] + x[3]) - (x[0] * x[3] + x[4]);
            });
        case BlendVariant::SingleCcy:
        case BlendVariant::SecLending:
            return pointwise({&alpha, &c_g, &r_num, &ell}, [](const std::vector<double>& x) {
                return (1.0 + x[0]) * x[1] - (x[0] * x[2] + x[3]);
            });
    }
    throw ValidationError("unknown blend variant");
}

}  // namespace collat
