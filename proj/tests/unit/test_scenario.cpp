#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "collat/errors.hpp"
#include "collat/runner.hpp"
#include "collat/scenario.hpp"

using namespace collat;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "curves": {"r": [{"pillar": 0, "rate": 0.03}]},
  "drivers": [{"id": "S", "kind": "lognormal-jump-asset", "initial": 100, "sigma": 0.2}],
  "contracts": [{"id": "k", "kind": "european-option", "underlying": "S", "strike": 100, "maturity": 1}]
})";

std::string with(const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    auto at = s.find(from);
    EXPECT_NE(at, std::string::npos);
    return s.replace(at, from.size(), to);
}

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> shipped() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(COLLAT_SCENARIO_DIR))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(COLLAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Scenario, MinimalParsesWithDefaults) {
    Scenario s = parse_scenario(kMinimal);
    EXPECT_EQ(s.run.paths, 200000u);
    EXPECT_EQ(s.run.seed, 42u);
    EXPECT_EQ(s.run.steps_per_year, 252.0);
    EXPECT_EQ(s.drivers.size(), 1u);
    EXPECT_EQ(s.contracts[0].spec.strike, 100.0);
    EXPECT_EQ(s.curves.domestic(), "EUR");
    EXPECT_EQ(s.grid().size(), 253u);
}

TEST(Scenario, UnknownKeyIsRejectedWithPath) {
    std::string msg = error_of(with(R"("sigma": 0.2)", R"("sigma": 0.2, "vol": 1)"));
    EXPECT_NE(msg.find("scenario.drivers[0]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'vol'"), std::string::npos) << msg;
    EXPECT_NE(error_of(with(R"("curves")", R"("extra": 1, "curves")")).find("'extra'"), std::string::npos);
}

TEST(Scenario, DanglingCurveNamesIdAndPath) {
    std::string msg = error_of(with(R"("sigma": 0.2)", R"("sigma": 0.2, "drift": "mu")"));
    EXPECT_NE(msg.find("scenario.drivers[0].drift"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'mu'"), std::string::npos) << msg;
}

TEST(Scenario, NegativeHaircutCitesAlpha) {
    std::string text = with(R"("curves": {)", R"("csa": {"currency": "EUR", "remuneration": "r", "haircut": "a", "continuous": true},
      "curves": {"a": [{"pillar": 0, "rate": -0.1}], )");
    std::string msg = error_of(text);
    EXPECT_NE(msg.find("scenario.csa.haircut"), std::string::npos) << msg;
    EXPECT_NE(msg.find("alpha >= 0"), std::string::npos) << msg;
}

TEST(Scenario, SchemaViolations) {
    EXPECT_NE(error_of("{").find("malformed JSON"), std::string::npos);
    EXPECT_NE(error_of(with(R"("sigma": 0.2)", R"("sigma": "x")")).find("scenario.drivers[0].sigma"), std::string::npos);
    EXPECT_NE(error_of(with(R"("sigma": 0.2)", R"("sigma": -0.2)")).find("scenario.drivers[0]"), std::string::npos);
    EXPECT_NE(error_of(with(R"("underlying": "S")", R"("underlying": "T")")).find("'T'"), std::string::npos);
    EXPECT_NE(error_of(with(R"("pillar": 0, "rate": 0.03)", R"("pillar": 1, "rate": 0.03)")).find("scenario.curves.r"),
              std::string::npos);
}

TEST(Scenario, RoundTripIsIdentity) {
    for (const fs::path& p : shipped()) {
        Scenario a = load_scenario(p.string());
        std::string text = serialize_scenario(a);
        Scenario b = parse_scenario(text);
        EXPECT_TRUE(a == b) << p;
        EXPECT_EQ(serialize_scenario(b), text) << p;
        EXPECT_EQ(scenario_hash(a), scenario_hash(b)) << p;
    }
}

TEST(Scenario, HashTracksContent) {
    Scenario a = parse_scenario(kMinimal);
    Scenario b = parse_scenario(with(R"("strike": 100)", R"("strike": 101)"));
    EXPECT_NE(scenario_hash(a), scenario_hash(b));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Runner, VerifyIsByteIdenticalAcrossRunsAndThreads) {
    Scenario s = load_scenario(std::string(COLLAT_SCENARIO_DIR) + "/reference_verify.json");
    fs::path dir = fs::temp_directory_path() / "collat_runner_test";
    std::ostringstream log;
    RunOptions o;
    o.paths = 2000;
    o.out = (dir / "a").string();
    o.threads = 1;
    EXPECT_EQ(run_command(Command::Verify, s, o, log), kExitPass) << log.str();
    o.out = (dir / "b").string();
    o.threads = 3;
    EXPECT_EQ(run_command(Command::Verify, s, o, log), kExitPass) << log.str();
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    EXPECT_EQ(slurp(dir / "a" / "diagnostics" / "martingale_S.csv"), slurp(dir / "b" / "diagnostics" / "martingale_S.csv"));
    fs::remove_all(dir);
}

TEST(Runner, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(ValidationError("x")), kExitValidation);
    EXPECT_EQ(exit_code_for(UnsupportedError("x")), kExitValidation);
    EXPECT_EQ(exit_code_for(StatisticsError("x")), kExitStatistical);
    EXPECT_THROW(command_from_string("hedge"), ValidationError);
}

TEST(Runner, MissingBlockIsValidationError) {
    Scenario s = parse_scenario(kMinimal);
    std::ostringstream log;
    RunOptions o;
    o.out = (fs::temp_directory_path() / "collat_runner_missing").string();
    EXPECT_THROW(run_command(Command::Verify, s, o, log), ValidationError);
    EXPECT_THROW(run_command(Command::Price, s, o, log), ValidationError);
    fs::remove_all(*o.out);
}

TEST(Cli, ExitCodes) {
    fs::path dir = fs::temp_directory_path() / "collat_cli_test";
    fs::create_directories(dir);
    std::string ref = std::string(COLLAT_SCENARIO_DIR) + "/reference_verify.json";
    EXPECT_EQ(run_cli("verify --scenario " + ref + " --paths 2000 --out " + (dir / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));

    std::ofstream(dir / "bad.json") << with(R"("sigma": 0.2)", R"("sigma": 0.2, "vol": 1)");
    EXPECT_EQ(run_cli("verify --scenario " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("verify --scenario " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("verify"), 2);

    // drift set away from the numeraire rate: the martingale gate must fail
    std::string biased = slurp(ref);
    biased.replace(biased.find(R"("z.lend": [{"pillar": 0, "rate": 0.005}])"),
                   std::string(R"("z.lend": [{"pillar": 0, "rate": 0.005}])").size(),
                   R"("z.lend": [{"pillar": 0, "rate": 0.2}])");
    std::ofstream(dir / "biased.json") << biased;
    EXPECT_EQ(run_cli("verify --scenario " + (dir / "biased.json").string() + " --paths 4000 --out " +
                      (dir / "biased").string()),
              3);
    fs::remove_all(dir);
}
