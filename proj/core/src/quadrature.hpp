#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace collat::detail {

/// Composite 8-point Gauss-Legendre over [a, b], split at `knots` (where the integrand may
/// have kinks or jumps) and at most 0.25 wide per piece.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> knots) {
    static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                             0.9602898564975363};
    static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                             0.1012285362903763};
    if (!(b > a)) return 0.0;
    knots.push_back(a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::remove_if(knots.begin(), knots.end(), [&](double k) { return k < a || k > b; }), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    double total = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        double lo = knots[j];
        double hi = knots[j + 1];
        auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / 0.25));
        double h = (hi - lo) / static_cast<double>(pieces);
        for (std::size_t p = 0; p < pieces; ++p) {
            double mid = lo + h * (static_cast<double>(p) + 0.5);
            for (std::size_t n = 0; n < x.size(); ++n)
                total += 0.5 * h * w[n] * (f(mid - 0.5 * h * x[n]) + f(mid + 0.5 * h * x[n]));
        }
    }
    return total;
}

}  // namespace collat::detail
