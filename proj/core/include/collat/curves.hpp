#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace collat {

/// Piecewise-constant instantaneous rate, right-continuous, flat beyond the last pillar.
/// Times are year fractions (ACT/365F), rates continuously compounded.
class RateCurve {
public:
    RateCurve();
    RateCurve(std::vector<double> pillars, std::vector<double> rates);

    static RateCurve flat(double rate);

    double rate(double t) const;
    /// Exact integral of the rate over [s, t], s <= t.
    double integral(double s, double t) const;

    const std::vector<double>& pillars() const { return pillars_; }
    const std::vector<double>& rates() const { return rates_; }
    bool is_flat() const { return rates_.size() == 1; }

    bool operator==(const RateCurve& other) const = default;

private:
    std::size_t segment(double t) const;

    std::vector<double> pillars_;
    std::vector<double> rates_;
    std::vector<double> cumulative_;  // integral from 0 to each pillar
};

/// Builds a curve whose rate on each merged segment is f(rates of the inputs).
RateCurve pointwise(const std::vector<const RateCurve*>& curves,
                    const std::function<double(const std::vector<double>&)>& f);

RateCurve operator+(const RateCurve& a, const RateCurve& b);
RateCurve operator-(const RateCurve& a, const RateCurve& b);
RateCurve operator*(double k, const RateCurve& a);

/// B^x_t = exp(int_0^t x).
double bank_account(const RateCurve& curve, double t);
/// P^x_t(T) = B^x_t / B^x_T.
double discount_factor(const RateCurve& curve, double t, double T);

/// Named curves plus the currency conventions. "r" is the domestic short rate; the basis
/// drift of currency x lives under "basis.<x>" and defaults to zero for declared currencies.
class CurveSet {
public:
    explicit CurveSet(std::string domestic = "EUR");

    void set(const std::string& id, RateCurve curve);
    const RateCurve& get(const std::string& id) const;
    bool contains(const std::string& id) const;

    const std::string& domestic() const { return domestic_; }
    void declare_currency(const std::string& ccy);
    bool has_currency(const std::string& ccy) const;
    const std::set<std::string>& currencies() const { return currencies_; }
    const std::map<std::string, RateCurve>& curves() const { return curves_; }

    /// Throws ValidationError if "r" is missing or a basis curve is declared for d.
    void validate() const;

    bool operator==(const CurveSet& other) const = default;

private:
    std::string domestic_;
    std::set<std::string> currencies_;
    std::map<std::string, RateCurve> curves_;
};

std::string basis_curve_id(const std::string& ccy);

/// r^{xb} = r - mu^x; returns r itself for the domestic currency.
RateCurve basis_rate(const CurveSet& curves, const std::string& ccy);

enum class BlendVariant { ForeignMeasure, DomesticMeasure, SingleCcy, SecLending };

/// z = (1+alpha)(c - r_gb + r_num) - (alpha r_num + ell). The single-currency and
/// securities-lending variants ignore r_gb and use (1+alpha)c - (alpha r + ell).
RateCurve blended_rate(BlendVariant variant, const RateCurve& alpha, const RateCurve& c_g,
                       const RateCurve& r_gb, const RateCurve& r_num, const RateCurve& ell);

}  // namespace collat
