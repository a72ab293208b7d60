#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cryptosim/cli.hpp"
#include "oracles/fixtures.hpp"

using namespace cryptosim;

namespace {

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "cryptosim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path tiny_config(const fs::path& dir) {
    const auto path = dir / "c.cfg";
    std::ofstream(path) << "agent_count = 40\nhorizon = 120\nensemble_size = 2\n";
    return path;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
    std::string err;
    EXPECT_EQ(run_cli({}, nullptr, &err), 1);
    EXPECT_EQ(run_cli({"frobnicate"}, nullptr, &err), 1);
    EXPECT_NE(err.find("Usage"), std::string::npos);
    EXPECT_EQ(run_cli({"simulate", "--bogus"}), 1);
    EXPECT_EQ(run_cli({"--help"}), 0);
}

TEST(Cli, ValidationErrorExitsOne) {
    const auto dir = fixture::temp_dir("cli_bad");
    std::ofstream(dir / "bad.cfg") << "agent_count = 1\n";
    std::string err;
    EXPECT_EQ(run_cli({"--config", (dir / "bad.cfg").string(), "--out-dir", dir.string(), "simulate"}, nullptr, &err), 1);
    EXPECT_NE(err.find("agent_count"), std::string::npos);
}

TEST(Cli, RuntimeFailureExitsTwo) {
    const auto dir = fixture::temp_dir("cli_runtime");
    const auto cfg = tiny_config(dir);
    // A regular file where the output directory should be.
    std::ofstream(dir / "blocked") << "x";
    EXPECT_EQ(run_cli({"--config", cfg.string(), "--out-dir", (dir / "blocked" / "sub").string(), "simulate"}), 2);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto dir = fixture::temp_dir("cli_sim");
    const auto cfg = tiny_config(dir);
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--seed", "7", "--out-dir", (dir / "a").string(), "simulate"}), 0);
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--seed", "7", "--out-dir", (dir / "b").string()}), 0);
    for (const char* f : {"prices.csv", "equity.csv", "meta.json", "config.txt"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
        EXPECT_FALSE(slurp(dir / "a" / f).empty()) << f;
    }
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--seed", "8", "--out-dir", (dir / "c").string(), "simulate"}), 0);
    EXPECT_NE(slurp(dir / "a" / "prices.csv"), slurp(dir / "c" / "prices.csv"));
}

TEST(Cli, AnalyzeShortFileFlagsOmissions) {
    const auto dir = fixture::temp_dir("cli_analyze");
    fixture::write_ohlcv(dir / "X.csv", "2021-01-01", 100, 3);
    ASSERT_EQ(run_cli({"--out-dir", (dir / "rep").string(), "analyze", (dir / "X.csv").string()}), 0);
    const auto r = load_report(dir / "rep" / "report.json");
    EXPECT_TRUE(r.families.at("volatility_365").omitted);
    EXPECT_FALSE(r.families.at("returns").omitted);
    for (const char* f : {"r1_returns.csv", "r2_volatility.csv", "r3_return_correlation.csv", "r4_volume_correlation.csv",
                          "r5_volatility_correlation.csv", "r6_shifted_correlation.csv", "r7_shifted_mean_week.csv",
                          "r8_shifted_mean_2week.csv"}) {
        EXPECT_TRUE(fs::exists(dir / "rep" / f)) << f;
    }
}

TEST(Cli, CompareReportWithItselfIsZero) {
    const auto dir = fixture::temp_dir("cli_compare");
    const auto cfg = tiny_config(dir);
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out-dir", (dir / "sim").string(), "simulate"}), 0);
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out-dir", (dir / "rep").string(), "analyze",
                       (dir / "sim" / "prices.csv").string()}),
              0);
    const auto rep = (dir / "rep" / "report.json").string();
    std::string out;
    ASSERT_EQ(run_cli({"--out-dir", (dir / "cmp").string(), "compare", rep, rep}, &out), 0);
    std::istringstream lines(slurp(dir / "cmp" / "distances.csv"));
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        EXPECT_EQ(line.substr(line.find(',') + 1), "0") << line;
        ++rows;
    }
    EXPECT_GT(rows, 5);
}

TEST(Cli, FundamentalsStatsAndBaseline) {
    const auto dir = fixture::temp_dir("cli_misc");
    const auto cfg = tiny_config(dir);
    std::string out;
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out-dir", dir.string(), "fundamentals-stats", "--views", "3"}, &out), 0);
    EXPECT_NE(out.find("annual_jump_rate"), std::string::npos);
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out-dir", dir.string(), "baseline"}, &out), 0);
    EXPECT_TRUE(fs::exists(dir / "baseline.csv"));
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out-dir", dir.string(), "scan", "--axis", "zeta", "--values", "1,2"}), 0);
    EXPECT_TRUE(fs::exists(dir / "scan_zeta.csv"));
}

TEST(Cli, CalibrateSmokeGridIsDeterministic) {
    const auto dir = fixture::temp_dir("cli_calib");
    for (int k = 0; k < 3; ++k) fixture::write_ohlcv(dir / "data" / ("A" + std::to_string(k) + ".csv"), "2021-01-01", 150, 40 + k);
    fixture::write_ohlcv(dir / "data" / "GAP.csv", "2021-01-01", 150, 50, 10);
    std::ofstream(dir / "c.cfg") << "horizon = 150\nensemble_size = 1\n";
    const std::vector<std::string> common{"--config", (dir / "c.cfg").string(), "--seed", "3"};
    auto args = [&](const std::string& out) {
        auto a = common;
        for (const std::string& s : std::vector<std::string>{"--out-dir", out, "calibrate", "--grid", "smoke", "--data-dir", (dir / "data").string()})
            a.push_back(s);
        return a;
    };
    ASSERT_EQ(run_cli(args((dir / "a").string())), 0);
    ASSERT_EQ(run_cli(args((dir / "b").string())), 0);
    for (const char* f : {"records.csv", "split.csv", "best_config.txt", "test_score.csv"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    const auto split = slurp(dir / "a" / "split.csv");
    EXPECT_EQ(split.find("GAP"), std::string::npos);
    EXPECT_EQ(std::count(split.begin(), split.end(), '\n'), 4);
}
