#include "collat/collateral.hpp"

#include <algorithm>

#include "collat/errors.hpp"

namespace collat {

void CsaSpec::validate() const {
    for (double a : haircut.rates())
        if (a < 0.0) throw ValidationError("haircut alpha must be >= 0");
    if (!continuous && margin_times.size() < 2) throw ValidationError("discrete CSA needs at least two margin times");
    for (std::size_t i = 1; i < margin_times.size(); ++i)
        if (!(margin_times[i] > margin_times[i - 1])) throw ValidationError("margin times must be strictly increasing");
}

CollateralLedger evolve_collateral(const CsaSpec& csa, std::span<const double> times, std::span<const double> marks,
                                   std::span<const double> fx) {
    const std::size_t n = times.size();
    if (n == 0) throw ValidationError("collateral ledger needs margin times");
    if (marks.size() != n) throw ValidationError("a mark is required at every margin time");
    if (!fx.empty() && fx.size() != n) throw ValidationError("an fx rate is required at every margin time");

    CollateralLedger l;
    l.times.assign(times.begin(), times.end());
    l.account.resize(n);
    l.posting.resize(n);
    l.accrual.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double x = fx.empty() ? 1.0 : fx[i];
        l.account[i] = (1.0 + csa.haircut.rate(times[i])) * marks[i] * x;
        if (i == 0) {
            l.posting[0] = l.account[0];
            continue;
        }
        double dt = times[i] - times[i - 1];
        l.accrual[i] = csa.remuneration.rate(times[i - 1]) * l.account[i - 1] * dt;
        l.posting[i] = l.account[i] - l.account[i - 1] - l.accrual[i];
    }
    l.closing = -l.account.back();
    return l;
}

double discounted_collateral_flows(const CollateralLedger& ledger, std::span<const double> bank) {
    if (bank.size() != ledger.times.size()) throw ValidationError("bank account needed at every margin time");
    double sum = 0.0;
    for (std::size_t i = 1; i < ledger.times.size(); ++i) sum += ledger.posting[i] / bank[i];
    return sum;
}

CollateralLedger futures_margin_account(std::span<const double> initial_margin, std::span<const double> quotes,
                                        const RateCurve& c, std::span<const double> times) {
    const std::size_t n = times.size();
    if (n == 0 || initial_margin.size() != n || quotes.size() != n)
        throw ValidationError("futures account needs margin and quote at every margin time");
    if (!(initial_margin[0] > 0.0)) throw ValidationError("initial margin at inception must be > 0");

    CollateralLedger l;
    l.times.assign(times.begin(), times.end());
    l.account.resize(n);
    l.posting.resize(n);
    l.accrual.assign(n, 0.0);
    l.variation_margin.assign(n, 0.0);
    l.account[0] = initial_margin[0];
    l.posting[0] = -initial_margin[0];
    for (std::size_t i = 1; i < n; ++i) {
        double dt = times[i] - times[i - 1];
        double dim = initial_margin[i] - initial_margin[i - 1];
        l.variation_margin[i] = quotes[i] - quotes[i - 1];
        l.accrual[i] = c.rate(times[i - 1]) * l.account[i - 1] * dt;
        l.account[i] = l.account[i - 1] + l.accrual[i] + dim + l.variation_margin[i];
        l.posting[i] = -dim;
    }
    l.closing = l.account.back();
    return l;
}

}  // namespace collat
