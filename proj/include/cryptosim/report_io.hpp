#pragma once

// File formats: simulation outputs, stylized-stats reports (JSON and
// plot-ready CSV tables). Numbers are written in shortest round-trip form so
// identical inputs give identical bytes.

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cryptosim/config.hpp"
#include "cryptosim/errors.hpp"
#include "cryptosim/fundamentals.hpp"
#include "cryptosim/simulation.hpp"
#include "cryptosim/stylized_stats.hpp"

namespace cryptosim {

namespace fs = std::filesystem;

[[nodiscard]] inline std::string fmt(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

inline std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

[[nodiscard]] inline std::string mode_name(AgentMode m) { return m == AgentMode::Noise ? "noise" : "learning"; }

[[nodiscard]] inline nlohmann::ordered_json config_json(const MarketConfig& c) {
    return {{"agent_count", c.agent_count},
            {"asset_count", c.asset_count},
            {"horizon", c.horizon},
            {"ensemble_size", c.ensemble_size},
            {"fee_rate", c.fee_rate},
            {"risk_free_rate", c.risk_free_rate},
            {"staking_apr", c.staking_apr},
            {"year_days", c.year_days},
            {"month_days", c.month_days},
            {"week_days", c.week_days},
            {"gesture_scalar", c.gesture_scalar},
            {"cointegration_accuracy", c.cointegration_accuracy},
            {"drawdown_level", c.drawdown_level},
            {"master_seed", c.master_seed}};
}

/// prices.csv (t,asset,P,V,W), equity.csv (t,agent,nav) and meta.json.
inline void write_sim_output(const fs::path& dir, const SimOutput& out) {
    {
        auto f = open_output(dir / "prices.csv");
        f << "t,asset,P,V,W\n";
        const std::size_t steps = out.prices.empty() ? 0 : out.prices.front().size();
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t j = 0; j < out.prices.size(); ++j) {
                f << t << ',' << j << ',' << fmt(out.prices[j][t]) << ',' << fmt(out.volumes[j][t]) << ','
                  << fmt(out.spreads[j][t]) << '\n';
            }
        }
    }
    if (!out.equity.empty()) {
        auto f = open_output(dir / "equity.csv");
        f << "t,agent,nav\n";
        const std::size_t steps = out.equity.front().size();
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t i = 0; i < out.equity.size(); ++i) f << t << ',' << i << ',' << fmt(out.equity[i][t]) << '\n';
        }
    }
    std::size_t bankrupt = 0;
    for (bool b : out.bankrupt) bankrupt += b ? 1 : 0;
    nlohmann::ordered_json meta{{"seed", out.seed},
                                {"mode", mode_name(out.mode)},
                                {"config", config_json(out.config)},
                                {"fee_total", out.fee_total},
                                {"trade_count", out.trade_count},
                                {"bankrupt_agents", bankrupt}};
    open_output(dir / "meta.json") << meta.dump(2) << '\n';
}

struct PriceTable {
    std::vector<std::vector<double>> prices;   // [asset][t]
    std::vector<std::vector<double>> volumes;  // [asset][t]
    std::vector<std::vector<double>> spreads;  // [asset][t]
};

[[nodiscard]] inline PriceTable read_prices_csv(std::istream& in, const std::string& source = "prices.csv") {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "t,asset,P,V,W", source + ":1: expected header 't,asset,P,V,W'");
    PriceTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = source + ":" + std::to_string(line_no) + ": ";
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        require(f.size() == 5, ctx + "expected 5 fields");
        const auto t = detail::parse_number<std::size_t>("t", f[0]);
        const auto j = detail::parse_number<std::size_t>("asset", f[1]);
        if (j >= table.prices.size()) {
            table.prices.resize(j + 1);
            table.volumes.resize(j + 1);
            table.spreads.resize(j + 1);
        }
        require(t == table.prices[j].size(), ctx + "time steps must be consecutive per asset");
        table.prices[j].push_back(detail::parse_number<double>("P", f[2]));
        table.volumes[j].push_back(detail::parse_number<double>("V", f[3]));
        table.spreads[j].push_back(detail::parse_number<double>("W", f[4]));
    }
    require(!table.prices.empty(), source + ": no data rows");
    return table;
}

[[nodiscard]] inline nlohmann::ordered_json report_json(const StylizedStatsReport& r) {
    nlohmann::ordered_json j;
    j["calendar"] = {{"week", r.calendar.week}, {"month", r.calendar.month}, {"year", r.calendar.year}};
    j["length"] = r.length;
    const auto& m = r.return_moments;
    j["moments"] = {{"mean", m.mean},
                    {"std", m.std},
                    {"skewness", m.skewness},
                    {"excess_kurtosis", m.excess_kurtosis},
                    {"degenerate", m.degenerate}};
    j["tail_index"] = r.tail_index ? nlohmann::ordered_json(*r.tail_index) : nlohmann::ordered_json(nullptr);
    j["shifted_mean_correlation"] = {{"window_" + std::to_string(r.calendar.week), r.shifted_mean_week},
                                     {"window_" + std::to_string(2 * r.calendar.week), r.shifted_mean_2week}};
    auto& fam = j["families"];
    fam = nlohmann::ordered_json::object();
    for (const auto& [name, s] : r.families) fam[name] = {{"omitted", s.omitted}, {"samples", s.values}};
    return j;
}

[[nodiscard]] inline StylizedStatsReport report_from_json(const nlohmann::json& j) {
    try {
        StylizedStatsReport r;
        r.calendar = {j.at("calendar").at("week").get<int>(), j.at("calendar").at("month").get<int>(),
                      j.at("calendar").at("year").get<int>()};
        r.length = j.at("length").get<std::size_t>();
        const auto& m = j.at("moments");
        r.return_moments = {m.at("mean").get<double>(), m.at("std").get<double>(), m.at("skewness").get<double>(),
                            m.at("excess_kurtosis").get<double>(), m.at("degenerate").get<bool>()};
        if (!j.at("tail_index").is_null()) r.tail_index = j.at("tail_index").get<double>();
        const auto& sh = j.at("shifted_mean_correlation");
        r.shifted_mean_week = sh.at("window_" + std::to_string(r.calendar.week)).get<std::vector<double>>();
        r.shifted_mean_2week = sh.at("window_" + std::to_string(2 * r.calendar.week)).get<std::vector<double>>();
        for (const auto& [name, s] : j.at("families").items()) {
            r.families[name] = {s.at("samples").get<std::vector<double>>(), s.at("omitted").get<bool>()};
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("report: malformed JSON: ") + e.what());
    }
}

[[nodiscard]] inline StylizedStatsReport load_report(const fs::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open report " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail("report " + path.string() + ": " + e.what());
    }
    return report_from_json(j);
}

namespace detail {

inline void write_histogram_rows(std::ostream& out, const std::string& key, const std::vector<double>& samples) {
    if (samples.empty()) return;
    const auto h = make_histogram(samples, shared_edges(samples));
    for (std::size_t b = 0; b < h.masses.size(); ++b) {
        if (!key.empty()) out << key << ',';
        out << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << fmt(h.masses[b]) << '\n';
    }
}

}  // namespace detail

/// r1..r8 CSV tables, one per figure family.
inline void write_figure_tables(const fs::path& dir, const StylizedStatsReport& r) {
    const auto lags = report_lags(r.calendar);
    auto family = [&](const std::string& name) -> const std::vector<double>& { return r.families.at(name).values; };
    {
        auto f = open_output(dir / "r1_returns.csv");
        f << "bin_left,bin_right,mass\n";
        detail::write_histogram_rows(f, "", family("returns"));
    }
    const std::array<std::pair<const char*, const char*>, 3> lagged{
        {{"r2_volatility.csv", "volatility_"}, {"r3_return_correlation.csv", "return_corr_"},
         {"r4_volume_correlation.csv", "volume_corr_"}}};
    for (const auto& [file, prefix] : lagged) {
        auto f = open_output(dir / file);
        f << "lag,bin_left,bin_right,mass\n";
        for (int lag : lags) detail::write_histogram_rows(f, std::to_string(lag), family(prefix + std::to_string(lag)));
    }
    {
        auto f = open_output(dir / "r5_volatility_correlation.csv");
        f << "bin_left,bin_right,mass\n";
        detail::write_histogram_rows(f, "", family("volatility_corr_" + std::to_string(2 * r.calendar.week)));
    }
    {
        auto f = open_output(dir / "r6_shifted_correlation.csv");
        f << "shift,bin_left,bin_right,mass\n";
        for (int s : {1, 2, 5}) detail::write_histogram_rows(f, std::to_string(s), family("shifted_corr_" + std::to_string(s)));
    }
    {
        auto f = open_output(dir / "r7_shifted_mean_week.csv");
        f << "shift,mean_correlation\n";
        for (std::size_t i = 0; i < r.shifted_mean_week.size(); ++i) f << i + 1 << ',' << fmt(r.shifted_mean_week[i]) << '\n';
    }
    {
        auto f = open_output(dir / "r8_shifted_mean_2week.csv");
        f << "shift,mean_correlation\n";
        for (std::size_t i = 0; i < r.shifted_mean_2week.size(); ++i) {
            f << 2 * (i + 1) << ',' << fmt(r.shifted_mean_2week[i]) << '\n';
        }
    }
    {
        auto f = open_output(dir / "omitted.csv");
        f << "family,omitted\n";
        for (const auto& [name, s] : r.families) f << name << ',' << (s.omitted ? 1 : 0) << '\n';
    }
}

inline void write_report(const fs::path& dir, const StylizedStatsReport& r) {
    open_output(dir / "report.json") << report_json(r).dump(1) << '\n';
    write_figure_tables(dir, r);
}

[[nodiscard]] inline nlohmann::ordered_json jump_stats_json(const JumpStats& s) {
    return {{"annual_jump_rate", s.annual_jump_rate},
            {"mean_jump_amplitude_pct", s.mean_jump_amplitude_pct},
            {"std_jump_amplitude_pct", s.std_jump_amplitude_pct},
            {"mean_disparity_pct", s.mean_disparity_pct},
            {"std_disparity_pct", s.std_disparity_pct}};
}

}  // namespace cryptosim
