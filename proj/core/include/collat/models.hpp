#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "collat/curves.hpp"
#include "collat/dividends.hpp"
#include "collat/errors.hpp"
#include "collat/time_grid.hpp"

namespace collat {

enum class DriverKind { LognormalJumpAsset, VasicekShortRate, LognormalFx, ExponentialMartingale };

const char* to_string(DriverKind kind);
DriverKind driver_kind_from_string(const std::string& s);

struct DriverSpec {
    std::string id;
    DriverKind kind = DriverKind::LognormalJumpAsset;
    double initial = 1.0;
    double sigma = 0.0;           // sigma for assets/fx/martingales, sigma_r for vasicek
    double jump_intensity = 0.0;  // Merton jumps, assets only
    double jump_mean = 0.0;
    double jump_stdev = 0.0;
    double mean_reversion = 0.0;  // vasicek a
    double long_run = 0.0;        // vasicek theta
    /// Asset drift: "risk-neutral" (numeraire rate of the measure) or a curve id.
    std::string drift_source = "risk-neutral";
    std::string currency;  // asset cash currency, or the base currency x of an fx rate X^{xy}
    std::string fx_to;     // quote currency y of an fx rate
    DividendSchedule dividends;

    void validate() const;
    bool multiplicative() const { return kind != DriverKind::VasicekShortRate; }
    bool has_jumps() const { return jump_intensity > 0.0; }
    /// Mean relative jump size e^{mu_J + sigma_J^2/2} - 1.
    double jump_kappa() const;

    bool operator==(const DriverSpec& other) const = default;
};

struct MeasureTag {
    enum class Kind { RiskNeutral, ForeignBasis, TForward, AssetNumeraire };

    Kind kind = Kind::RiskNeutral;
    std::string currency;   // ForeignBasis
    double maturity = 0.0;  // TForward
    std::string numeraire;  // AssetNumeraire: id of a non-dividend asset driver

    static MeasureTag risk_neutral() { return {}; }
    static MeasureTag foreign_basis(std::string ccy) { return {Kind::ForeignBasis, std::move(ccy), 0.0, {}}; }
    static MeasureTag t_forward(double T) { return {Kind::TForward, {}, T, {}}; }
    static MeasureTag asset_numeraire(std::string id) { return {Kind::AssetNumeraire, {}, 0.0, std::move(id)}; }

    std::string name() const;
    bool operator==(const MeasureTag& other) const = default;
};

/// Symmetric unit-diagonal matrix over driver Brownian components.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(std::size_t n = 0);
    explicit CorrelationMatrix(std::vector<std::vector<double>> rows);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double rho);

    /// Row-major lower factor L with L L^T = this; throws ValidationError when the matrix is
    /// not symmetric, has entries outside [-1, 1] or is not positive semidefinite.
    std::vector<double> cholesky() const;

    bool operator==(const CorrelationMatrix& other) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Simulated drivers on a grid. Row layout is path-major: value(d, p, k) at
/// [p * grid.size() + k]. The bank account is the numeraire bank of the measure
/// (B under Q and Q^beta, B^{fb} under Q^{fb}).
class PathSet {
public:
    PathSet(TimeGrid grid, std::vector<DriverSpec> drivers, MeasureTag measure, std::size_t n_paths,
            std::size_t first_path, std::uint64_t seed, bool antithetic);

    const TimeGrid& grid() const { return grid_; }
    const MeasureTag& measure() const { return measure_; }
    const std::vector<DriverSpec>& drivers() const { return drivers_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_times() const { return grid_.size(); }
    std::size_t first_path() const { return first_path_; }
    std::uint64_t seed() const { return seed_; }
    bool antithetic() const { return antithetic_; }

    std::size_t driver_index(const std::string& id) const;
    bool has_driver(const std::string& id) const;

    std::span<const double> values(std::size_t d, std::size_t p) const;
    std::span<double> values(std::size_t d, std::size_t p);
    double value(std::size_t d, std::size_t p, std::size_t k) const { return values_[d][p * n_times() + k]; }
    /// Left limit at grid point k: the previous grid value (k > 0), the value itself at 0.
    double left_limit(std::size_t d, std::size_t p, std::size_t k) const {
        return value(d, p, k == 0 ? 0 : k - 1);
    }

    std::span<const double> log_bank(std::size_t p) const;
    std::span<double> log_bank(std::size_t p);
    double bank(std::size_t p, std::size_t k) const;

    /// Realized cash dividend amounts of driver d on path p, one per scheduled dividend on the grid.
    std::span<const double> paid(std::size_t d, std::size_t p) const;
    std::span<double> paid(std::size_t d, std::size_t p);
    std::size_t n_cash(std::size_t d) const { return n_cash_[d]; }

    /// Concatenates the paths of `block` (same grid and drivers) after the current ones.
    void append(const PathSet& block);

    bool operator==(const PathSet& other) const = default;

private:
    TimeGrid grid_;
    std::vector<DriverSpec> drivers_;
    MeasureTag measure_;
    std::size_t n_paths_;
    std::size_t first_path_;
    std::uint64_t seed_;
    bool antithetic_;
    std::vector<std::vector<double>> values_;
    std::vector<double> log_bank_;
    std::vector<std::size_t> n_cash_;
    std::vector<std::vector<double>> paid_;
};

struct SimulationConfig {
    std::size_t n_paths = 200000;
    std::uint64_t seed = 42;
    std::size_t block_size = 2048;  // must be even with antithetics
    bool antithetic = true;
    unsigned threads = 0;           // 0: COLLAT_THREADS or the hardware concurrency
};

/// Worker count from COLLAT_THREADS, else the hardware concurrency (at least 1).
unsigned default_threads();

class Simulator {
public:
    Simulator(std::vector<DriverSpec> drivers, CorrelationMatrix corr, MeasureTag measure,
              CurveSet curves, TimeGrid grid);
    ~Simulator();
    Simulator(Simulator&&) noexcept;
    Simulator& operator=(Simulator&&) noexcept;

    const TimeGrid& grid() const;
    const CurveSet& curves() const;
    const MeasureTag& measure() const;
    const std::vector<DriverSpec>& drivers() const;

    std::size_t n_blocks(const SimulationConfig& cfg) const;
    /// Paths [b * block_size, min(n, (b+1) * block_size)) from the block's own RNG stream.
    PathSet simulate_block(std::size_t block, const SimulationConfig& cfg) const;
    /// All paths in one PathSet (use map_blocks for large path counts).
    PathSet simulate(const SimulationConfig& cfg) const;

    /// Runs f(const PathSet&) -> Acc on every block in parallel and merges the results in
    /// ascending block order with Acc::merge, so the outcome does not depend on threading.
    template <class Acc, class F>
    Acc map_blocks(const SimulationConfig& cfg, F&& f) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

PathSet simulate(const std::vector<DriverSpec>& drivers, const CorrelationMatrix& corr,
                 const MeasureTag& measure, const CurveSet& curves, const TimeGrid& grid,
                 std::size_t n_paths, std::uint64_t seed, bool antithetic = true);

/// Cumulative sum of (Delta A)(Delta B) at every grid time for one path.
std::vector<double> quadratic_covariation(const PathSet& paths, const std::string& a,
                                          const std::string& b, std::size_t path);

/// Affine closed form of the Vasicek zero coupon bond P_t(T) given r_t = r0.
double vasicek_zcb(double a, double theta, double sigma_r, double r0, double t, double T);

/// Debug dump with columns path,time,driver,value for the first `max_paths` paths.
void write_paths_csv(const PathSet& paths, std::ostream& os, std::size_t max_paths);

template <class Acc, class F>
Acc Simulator::map_blocks(const SimulationConfig& cfg, F&& f) const {
    const std::size_t nb = n_blocks(cfg);
    std::vector<Acc> results(nb);
    unsigned workers = cfg.threads ? cfg.threads : default_threads();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, nb));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t b; (b = next.fetch_add(1)) < nb;) {
            if (failed.load()) return;
            try {
                results[b] = f(simulate_block(b, cfg));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    Acc total{};
    for (auto& r : results) total.merge(r);
    return total;
}

}  // namespace collat
