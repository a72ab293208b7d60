#pragma once

// Daily OHLCV files: date,open,high,low,close,volume with ISO dates.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryptosim/errors.hpp"
#include "cryptosim/random.hpp"

namespace cryptosim {

struct OhlcvRow {
    std::chrono::sys_days date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

struct AssetSeries {
    std::string symbol;
    std::vector<OhlcvRow> rows;
    bool continuous = false;  // no missing calendar day between first and last row

    [[nodiscard]] std::vector<double> closes() const {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r.close);
        return v;
    }
    [[nodiscard]] std::vector<double> volumes() const {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r.volume);
        return v;
    }
};

inline constexpr std::string_view kOhlcvHeader = "date,open,high,low,close,volume";

namespace detail {

inline std::string where(const std::string& source, int line) {
    return source + ":" + std::to_string(line) + ": ";
}

inline double parse_real(std::string_view field, const std::string& context) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    require(ec == std::errc{} && ptr == end && std::isfinite(v), context + "bad number '" + std::string(field) + "'");
    return v;
}

inline int parse_int(std::string_view field, const std::string& context) {
    int v = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    require(ec == std::errc{} && ptr == end, context + "bad date '" + std::string(field) + "'");
    return v;
}

}  // namespace detail

/// Parses YYYY-MM-DD.
[[nodiscard]] inline std::chrono::sys_days parse_iso_date(std::string_view text, const std::string& context = {}) {
    require(text.size() == 10 && text[4] == '-' && text[7] == '-', context + "bad date '" + std::string(text) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{detail::parse_int(text.substr(0, 4), context)},
                                          std::chrono::month{static_cast<unsigned>(detail::parse_int(text.substr(5, 2), context))},
                                          std::chrono::day{static_cast<unsigned>(detail::parse_int(text.substr(8, 2), context))}};
    require(ymd.ok(), context + "invalid calendar date '" + std::string(text) + "'");
    return std::chrono::sys_days{ymd};
}

[[nodiscard]] inline std::string format_iso_date(std::chrono::sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

[[nodiscard]] inline bool is_continuous(const std::vector<OhlcvRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date - rows[i - 1].date != std::chrono::days{1}) return false;
    }
    return true;
}

[[nodiscard]] inline AssetSeries parse_ohlcv(std::istream& in, std::string symbol, const std::string& source = "ohlcv") {
    AssetSeries series;
    series.symbol = std::move(symbol);
    std::string line;
    int line_no = 0;
    require(static_cast<bool>(std::getline(in, line)), source + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == kOhlcvHeader, detail::where(source, line_no) + "expected header '" + std::string(kOhlcvHeader) + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto ctx = detail::where(source, line_no);
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (auto comma = rest.find(','); ; comma = rest.find(',')) {
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        require(fields.size() == 6, ctx + "expected 6 fields, got " + std::to_string(fields.size()));
        OhlcvRow row;
        row.date = parse_iso_date(fields[0], ctx);
        row.open = detail::parse_real(fields[1], ctx);
        row.high = detail::parse_real(fields[2], ctx);
        row.low = detail::parse_real(fields[3], ctx);
        row.close = detail::parse_real(fields[4], ctx);
        row.volume = detail::parse_real(fields[5], ctx);
        require(row.close > 0.0, ctx + "close must be positive");
        require(row.open > 0.0 && row.high > 0.0 && row.low > 0.0, ctx + "open, high and low must be positive");
        require(row.volume >= 0.0, ctx + "volume must be non-negative");
        require(series.rows.empty() || row.date > series.rows.back().date,
                ctx + "dates must be strictly increasing");
        series.rows.push_back(row);
    }
    require(!series.rows.empty(), source + ": no data rows");
    series.continuous = is_continuous(series.rows);
    return series;
}

/// Symbol is the file stem.
[[nodiscard]] inline AssetSeries load_ohlcv(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "load_ohlcv: cannot open " + path.string());
    return parse_ohlcv(in, path.stem().string(), path.string());
}

/// Every *.csv in a directory, ordered by file name.
[[nodiscard]] inline std::vector<AssetSeries> load_ohlcv_dir(const std::filesystem::path& dir) {
    require(std::filesystem::is_directory(dir), "load_ohlcv_dir: not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<AssetSeries> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_ohlcv(f));
    return out;
}

[[nodiscard]] inline std::vector<AssetSeries> filter_continuous(std::vector<AssetSeries> assets) {
    std::erase_if(assets, [](const AssetSeries& a) { return !a.continuous; });
    return assets;
}

struct TrainTestSplit {
    std::vector<AssetSeries> train;
    std::vector<AssetSeries> test;
};

/// Uniform random halves; with an odd count the training side gets the extra
/// asset. Each side keeps the input order.
[[nodiscard]] inline TrainTestSplit split_train_test(const std::vector<AssetSeries>& assets, std::uint64_t seed) {
    require(assets.size() >= 2, "split_train_test: need at least 2 assets");
    std::vector<std::size_t> idx(assets.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, Stream::Split));
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_train = (assets.size() + 1) / 2;
    std::vector<bool> in_train(assets.size(), false);
    for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;
    TrainTestSplit split;
    for (std::size_t i = 0; i < assets.size(); ++i) (in_train[i] ? split.train : split.test).push_back(assets[i]);
    return split;
}

}  // namespace cryptosim
