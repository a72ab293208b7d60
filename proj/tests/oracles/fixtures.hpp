#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cryptosim/ohlcv.hpp"

namespace fixture {

/// Daily random-walk OHLCV file starting at `start`; `skip` drops that row
/// index to create a calendar gap.
inline void write_ohlcv(const std::filesystem::path& path, const std::string& start, int rows, std::uint64_t seed,
                        int skip = -1) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    out << "date,open,high,low,close,volume\n";
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 0.03);
    std::lognormal_distribution<double> vol(10.0, 0.5);
    auto day = cryptosim::parse_iso_date(start);
    double close = 100.0;
    for (int i = 0; i < rows; ++i, day += std::chrono::days{1}) {
        const double open = close;
        close = open * std::exp(step(rng));
        if (i == skip) continue;
        out << cryptosim::format_iso_date(day) << ',' << open << ',' << std::max(open, close) * 1.01 << ','
            << std::min(open, close) * 0.99 << ',' << close << ',' << vol(rng) << '\n';
    }
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("cryptosim_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
