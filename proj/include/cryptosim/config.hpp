#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "cryptosim/errors.hpp"

namespace cryptosim {

struct MarketConfig {
    int agent_count = 500;           // I
    int asset_count = 1;             // J
    int horizon = 1453;              // T, steps including t = 0
    int ensemble_size = 20;          // S
    double fee_rate = 0.001;         // b, charged to each side on notional
    double risk_free_rate = 0.01;    // R, per year
    double staking_apr = 0.03;       // D, per year on crypto holdings
    int year_days = 365;             // T_y
    int month_days = 30;             // T_m
    int week_days = 7;               // T_w
    double gesture_scalar = 1.0;     // zeta
    int cointegration_accuracy = 10; // nu
    double drawdown_level = 45.0;    // L, percent
    std::uint64_t master_seed = 42;

    bool operator==(const MarketConfig&) const = default;
};

inline void validate(const MarketConfig& c) {
    require(c.agent_count >= 2, "config: agent_count must be >= 2");
    require(c.asset_count >= 1, "config: asset_count must be >= 1");
    require(c.week_days >= 1 && c.month_days >= 1 && c.year_days >= 1, "config: calendar constants must be >= 1");
    require(c.week_days <= 6 * c.month_days, "config: week_days must not exceed 6 * month_days");
    require(c.horizon >= 2 * c.week_days, "config: horizon must be >= 2 * week_days");
    require(c.ensemble_size >= 1, "config: ensemble_size must be >= 1");
    require(c.fee_rate >= 0.0 && c.fee_rate < 1.0, "config: fee_rate must lie in [0, 1)");
    require(c.risk_free_rate >= 0.0, "config: risk_free_rate must be >= 0");
    require(c.staking_apr >= 0.0, "config: staking_apr must be >= 0");
    require(c.gesture_scalar > 0.0, "config: gesture_scalar must be > 0");
    require(c.cointegration_accuracy >= 1 && c.cointegration_accuracy <= 64,
            "config: cointegration_accuracy must lie in [1, 64]");
    require(c.drawdown_level > 0.0 && c.drawdown_level <= 100.0, "config: drawdown_level must lie in (0, 100]");
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, std::string text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    require(ec == std::errc{} && ptr == end, "config: bad value for '" + key + "': " + text);
    return value;
}

}  // namespace detail

/// Applies one `key = value` pair; keys are the MarketConfig field names.
inline void set_config_value(MarketConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_number;
    if (key == "agent_count") c.agent_count = parse_number<int>(key, value);
    else if (key == "asset_count") c.asset_count = parse_number<int>(key, value);
    else if (key == "horizon") c.horizon = parse_number<int>(key, value);
    else if (key == "ensemble_size") c.ensemble_size = parse_number<int>(key, value);
    else if (key == "fee_rate") c.fee_rate = parse_number<double>(key, value);
    else if (key == "risk_free_rate") c.risk_free_rate = parse_number<double>(key, value);
    else if (key == "staking_apr") c.staking_apr = parse_number<double>(key, value);
    else if (key == "year_days") c.year_days = parse_number<int>(key, value);
    else if (key == "month_days") c.month_days = parse_number<int>(key, value);
    else if (key == "week_days") c.week_days = parse_number<int>(key, value);
    else if (key == "gesture_scalar") c.gesture_scalar = parse_number<double>(key, value);
    else if (key == "cointegration_accuracy") c.cointegration_accuracy = parse_number<int>(key, value);
    else if (key == "drawdown_level") c.drawdown_level = parse_number<double>(key, value);
    else if (key == "master_seed") c.master_seed = parse_number<std::uint64_t>(key, value);
    else fail("config: unknown key '" + key + "'");
}

/// Flat `key = value` text; `#` starts a comment. Unset keys keep `base` values.
inline MarketConfig parse_config(std::istream& in, MarketConfig base = {}) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: line " + std::to_string(line_no) + ": expected key = value");
        set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    validate(base);
    return base;
}

inline MarketConfig load_config(const std::string& path, MarketConfig base = {}) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    return parse_config(in, base);
}

inline void write_config(std::ostream& out, const MarketConfig& c) {
    std::ostringstream s;
    s.precision(17);
    s << "agent_count = " << c.agent_count << '\n'
      << "asset_count = " << c.asset_count << '\n'
      << "horizon = " << c.horizon << '\n'
      << "ensemble_size = " << c.ensemble_size << '\n'
      << "fee_rate = " << c.fee_rate << '\n'
      << "risk_free_rate = " << c.risk_free_rate << '\n'
      << "staking_apr = " << c.staking_apr << '\n'
      << "year_days = " << c.year_days << '\n'
      << "month_days = " << c.month_days << '\n'
      << "week_days = " << c.week_days << '\n'
      << "gesture_scalar = " << c.gesture_scalar << '\n'
      << "cointegration_accuracy = " << c.cointegration_accuracy << '\n'
      << "drawdown_level = " << c.drawdown_level << '\n'
      << "master_seed = " << c.master_seed << '\n';
    out << s.str();
}

/// The `--smoke` preset used for CI-sized runs.
inline MarketConfig smoke_config(MarketConfig c = {}) {
    c.agent_count = 100;
    c.horizon = 400;
    c.ensemble_size = 3;
    return c;
}

}  // namespace cryptosim
