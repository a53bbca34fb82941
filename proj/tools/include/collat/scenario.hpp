#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collat/collateral.hpp"
#include "collat/curves.hpp"
#include "collat/mc_engine.hpp"
#include "collat/models.hpp"
#include "collat/pricing.hpp"

namespace collat {

struct CorrelationEntry {
    std::string a, b;
    double rho = 0.0;
    bool operator==(const CorrelationEntry&) const = default;
};

/// CSA block; curve fields are ids into the curves block.
struct CsaBlock {
    std::string currency;
    std::string remuneration;
    std::string haircut;               // empty: no haircut
    double margin_frequency = 0.0;     // per year, or
    std::vector<double> margin_times;  // explicit schedule
    bool continuous = false;
    std::string fx_driver;             // X^{gf} when the collateral currency differs
    bool operator==(const CsaBlock&) const = default;
};

struct ContractBlock {
    ContractSpec spec;
    std::string dividend_spread;  // curve id of ell, empty for none
    bool operator==(const ContractBlock&) const = default;
};

struct PathDump {
    std::string file;
    std::size_t max_paths = 10;
    bool operator==(const PathDump&) const = default;
};

struct RunBlock {
    std::size_t paths = 200000;
    std::uint64_t seed = 42;
    double steps_per_year = 252.0;
    bool antithetic = true;
    std::size_t block_size = 2048;
    double horizon = 0.0;  // 0: latest maturity or check time
    std::string out = "out";
    std::optional<PathDump> path_dump;
    bool operator==(const RunBlock&) const = default;
};

struct PnlCheck {
    std::string kind;  // "repo", "lending" or "futures"
    std::string asset;
    std::string kappa;  // repo rate curve (repo)
    std::string c;      // collateral or margin remuneration curve
    std::string ell;    // lending fee curve (lending)
    double alpha = 0.0;
    double margin_frequency = 252.0;
    double initial_margin = 0.0;  // futures
    double maturity = 1.0;
    bool operator==(const PnlCheck&) const = default;
};

struct NumeraireBlock {
    std::string kind = "bank";  // "bank", "curve" or "driver"
    std::string id;
    bool operator==(const NumeraireBlock&) const = default;
};

struct VerifyBlock {
    std::vector<double> times;
    NumeraireBlock numeraire;
    std::vector<std::string> martingale;    // asset or fx drivers
    std::vector<std::string> replication;   // cash-dividend assets
    std::vector<std::string> total_return;  // cash-dividend assets
    std::vector<std::string> csa_gain;      // contract ids
    std::vector<PnlCheck> pnl;
    bool operator==(const VerifyBlock&) const = default;
};

struct ConvergeBlock {
    std::string contract;
    std::vector<MarginFrequency> frequencies;
    bool operator==(const ConvergeBlock&) const = default;
};

struct Scenario {
    std::string name;
    CurveSet curves;
    MeasureTag measure;
    std::vector<DriverSpec> drivers;  // dividends attached from the dividends block
    std::vector<CorrelationEntry> correlation;
    std::optional<CsaBlock> csa;
    std::vector<ContractBlock> contracts;
    RunBlock run;
    std::optional<VerifyBlock> verify;
    std::optional<ConvergeBlock> converge;

    const DriverSpec& driver(const std::string& id) const;
    const ContractBlock& contract(const std::string& id) const;
    CorrelationMatrix correlation_matrix() const;
    /// CSA terms for a contract maturing at `maturity`.
    CsaSpec csa_spec(double maturity) const;
    double horizon() const;
    /// Every time that must be a grid point.
    std::vector<double> event_times() const;
    TimeGrid grid() const;

    bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document. Errors are ValidationError with a JSON path,
/// e.g. "scenario.drivers[0].sigma: must be >= 0".
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& file);
/// Canonical JSON text (sorted keys, every field written).
std::string serialize_scenario(const Scenario& s);
/// FNV-1a 64 of the canonical text.
std::uint64_t scenario_hash(const Scenario& s);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace collat
