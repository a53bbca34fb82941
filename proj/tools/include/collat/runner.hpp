#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "collat/scenario.hpp"

namespace collat {

enum class Command { Price, Forward, Verify, Converge };

Command command_from_string(const std::string& s);
const char* to_string(Command c);

inline constexpr int kExitPass = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStatistical = 3;

struct RunOptions {
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned threads = 0;  // 0: COLLAT_THREADS or the hardware concurrency
};

/// Runs one command, writes <out>/report.json and <out>/diagnostics/*.csv and returns the
/// exit code (0 pass, 3 statistical gate failure). Failing rows are written to `log`.
/// Module errors propagate; map them with exit_code_for().
int run_command(Command command, const Scenario& scenario, const RunOptions& options, std::ostream& log);

/// Exit code for an exception escaping parse or run: 2 for validation-type errors.
int exit_code_for(const std::exception& e);

}  // namespace collat
