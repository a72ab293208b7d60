#pragma once

// Hyperparameter grid search: simulate each cell, compare its pooled metrics
// with the pooled metrics of the real training assets, rank by distance.

#include <algorithm>
#include <chrono>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "cryptosim/config.hpp"
#include "cryptosim/ensemble.hpp"
#include "cryptosim/ohlcv.hpp"
#include "cryptosim/report_io.hpp"
#include "cryptosim/stylized_stats.hpp"

namespace cryptosim {

struct GridCell {
    int agent_count = 500;
    double gesture_scalar = 1.0;
    int cointegration_accuracy = 10;
    double drawdown_level = 45.0;

    auto operator<=>(const GridCell&) const = default;
};

[[nodiscard]] inline MarketConfig apply_cell(MarketConfig cfg, const GridCell& cell) {
    cfg.agent_count = cell.agent_count;
    cfg.gesture_scalar = cell.gesture_scalar;
    cfg.cointegration_accuracy = cell.cointegration_accuracy;
    cfg.drawdown_level = cell.drawdown_level;
    return cfg;
}

struct HyperGrid {
    std::vector<int> agent_counts{500, 1500, 2500, 3500, 4500, 5500};
    std::vector<double> gesture_scalars{1.0, 1.5, 2.0, 2.5, 3.0};
    std::vector<int> accuracies{9, 10, 11, 12};
    std::vector<double> drawdown_levels{10.0, 30.0, 50.0, 70.0, 90.0};

    /// Lexicographic (I, zeta, nu, L) order.
    [[nodiscard]] std::vector<GridCell> cells() const {
        std::vector<GridCell> out;
        out.reserve(agent_counts.size() * gesture_scalars.size() * accuracies.size() * drawdown_levels.size());
        for (int i : agent_counts)
            for (double z : gesture_scalars)
                for (int nu : accuracies)
                    for (double l : drawdown_levels) out.push_back({i, z, nu, l});
        return out;
    }
};

/// 2 x 2 x 1 x 1 grid for quick runs.
[[nodiscard]] inline HyperGrid smoke_grid() {
    return {{100, 200}, {1.0, 2.0}, {10}, {50.0}};
}

struct CalibrationRecord {
    GridCell cell;
    std::vector<FamilyDistance> distances;  // objective families, fixed order
    double aggregate = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> seeds;
    double wall_seconds = 0.0;  // kept out of records.csv
    bool valid = false;
    std::string error;
};

/// Equal-weight mean of the objective-family distances; families missing from
/// either side are left out of the mean.
[[nodiscard]] inline double aggregate_score(const std::vector<FamilyDistance>& distances) {
    if (distances.empty()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const auto& d : distances) s += d.distance;
    return s / static_cast<double>(distances.size());
}

[[nodiscard]] inline std::vector<FamilyDistance> objective_distances(const StylizedStatsReport& simulated,
                                                                     const StylizedStatsReport& real) {
    const auto all = compare_reports(simulated, real);
    std::vector<FamilyDistance> out;
    for (const auto& name : objective_families(simulated.calendar)) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const FamilyDistance& d) { return d.family == name; });
        if (it != all.end()) out.push_back(*it);
    }
    return out;
}

[[nodiscard]] inline Calendar calendar_of(const MarketConfig& cfg) {
    return {cfg.week_days, cfg.month_days, cfg.year_days};
}

/// Pooled report over assets; the same path serves training and testing sets.
[[nodiscard]] inline StylizedStatsReport assets_report(const std::vector<AssetSeries>& assets, Calendar cal) {
    require(!assets.empty(), "assets_report: no assets");
    std::vector<StylizedStatsReport> parts;
    parts.reserve(assets.size());
    for (const auto& a : assets) parts.push_back(build_report(a.closes(), a.volumes(), cal));
    return pool_reports(parts);
}

/// Pooled report of one simulated ensemble (every asset of every run).
[[nodiscard]] inline StylizedStatsReport simulated_report(const MarketConfig& cfg, int threads, RunOptions options = {}) {
    options.record_equity = false;
    const Calendar cal = calendar_of(cfg);
    auto per_run = map_ensemble(cfg, options, threads, [&](const SimOutput& out) {
        std::vector<StylizedStatsReport> assets;
        for (std::size_t j = 0; j < out.prices.size(); ++j) assets.push_back(build_report(out.prices[j], out.volumes[j], cal));
        return pool_reports(assets);
    });
    return pool_reports(per_run);
}

[[nodiscard]] inline CalibrationRecord score_cell(const GridCell& cell, const MarketConfig& base,
                                                  const StylizedStatsReport& real, int threads = 1) {
    CalibrationRecord rec;
    rec.cell = cell;
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = apply_cell(base, cell);
    for (int k = 0; k < cfg.ensemble_size; ++k) rec.seeds.push_back(member_seed(cfg.master_seed, static_cast<std::size_t>(k)));
    try {
        const auto simulated = simulated_report(cfg, threads);
        rec.distances = objective_distances(simulated, real);
        rec.aggregate = aggregate_score(rec.distances);
        rec.valid = !rec.distances.empty();
        if (!rec.valid) rec.error = "no comparable metric families";
    } catch (const std::exception& e) {
        rec.valid = false;
        rec.error = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Valid records first by ascending score, ties and invalid records by cell.
inline void rank_records(std::vector<CalibrationRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const CalibrationRecord& a, const CalibrationRecord& b) {
        return std::tuple(!a.valid, a.valid ? a.aggregate : 0.0, a.cell) <
               std::tuple(!b.valid, b.valid ? b.aggregate : 0.0, b.cell);
    });
}

/// Cells to evaluate: the whole grid, or a seeded random subset of `budget` cells.
[[nodiscard]] inline std::vector<GridCell> budgeted_cells(const HyperGrid& grid, std::size_t budget, std::uint64_t seed) {
    require(budget >= 1, "grid_search: budget must be >= 1");
    auto cells = grid.cells();
    require(!cells.empty(), "grid_search: empty grid");
    if (budget < cells.size()) {
        Rng rng(derive_seed(seed, Stream::GridOrder));
        std::shuffle(cells.begin(), cells.end(), rng);
        cells.resize(budget);
    }
    return cells;
}

[[nodiscard]] inline std::vector<CalibrationRecord> grid_search(const HyperGrid& grid, std::size_t budget,
                                                                const MarketConfig& base,
                                                                const StylizedStatsReport& real, int threads = 1) {
    const auto cells = budgeted_cells(grid, budget, base.master_seed);
    std::vector<CalibrationRecord> records(cells.size());
    // Spread workers over cells first; leftover threads go to each cell's ensemble.
    const int outer = std::min<int>(threads, static_cast<int>(cells.size()));
    const int inner = std::max(1, threads / std::max(1, outer));
    parallel_for(cells.size(), outer, [&](std::size_t i) { records[i] = score_cell(cells[i], base, real, inner); });
    rank_records(records);
    return records;
}

inline void write_records_csv(std::ostream& out, const std::vector<CalibrationRecord>& records, const Calendar& cal) {
    const auto families = objective_families(cal);
    out << "rank,agent_count,gesture_scalar,cointegration_accuracy,drawdown_level,valid,aggregate";
    for (const auto& f : families) out << ',' << f;
    out << ",seeds,error\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        out << r + 1 << ',' << rec.cell.agent_count << ',' << fmt(rec.cell.gesture_scalar) << ','
            << rec.cell.cointegration_accuracy << ',' << fmt(rec.cell.drawdown_level) << ',' << (rec.valid ? 1 : 0) << ','
            << (rec.valid ? fmt(rec.aggregate) : std::string("nan"));
        for (const auto& f : families) {
            const auto it = std::find_if(rec.distances.begin(), rec.distances.end(),
                                         [&](const FamilyDistance& d) { return d.family == f; });
            out << ',' << (it == rec.distances.end() ? std::string("nan") : fmt(it->distance));
        }
        out << ',';
        for (std::size_t k = 0; k < rec.seeds.size(); ++k) out << (k ? ";" : "") << rec.seeds[k];
        std::string err = rec.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << ',' << err << '\n';
    }
}

inline void write_timing_csv(std::ostream& out, const std::vector<CalibrationRecord>& records) {
    out << "agent_count,gesture_scalar,cointegration_accuracy,drawdown_level,wall_seconds\n";
    for (const auto& rec : records) {
        out << rec.cell.agent_count << ',' << fmt(rec.cell.gesture_scalar) << ',' << rec.cell.cointegration_accuracy << ','
            << fmt(rec.cell.drawdown_level) << ',' << fmt(rec.wall_seconds) << '\n';
    }
}

enum class ScanAxis { Agents, Gesture, Accuracy, Drawdown };

[[nodiscard]] inline ScanAxis parse_axis(const std::string& name) {
    if (name == "I" || name == "agents") return ScanAxis::Agents;
    if (name == "zeta" || name == "gesture") return ScanAxis::Gesture;
    if (name == "nu" || name == "accuracy") return ScanAxis::Accuracy;
    if (name == "L" || name == "drawdown") return ScanAxis::Drawdown;
    fail("unknown scan axis '" + name + "' (expected I, zeta, nu or L)");
}

struct ScanPoint {
    double value = 0.0;
    double metric = 0.0;
};

/// Ensemble metric per axis value: I -> mean 2-week volatility, zeta and nu ->
/// mean |daily log-return|, L -> fraction of agents bankrupt by the end.
[[nodiscard]] inline std::vector<ScanPoint> sensitivity_scan(ScanAxis axis, const std::vector<double>& values,
                                                             const MarketConfig& base, int threads = 1) {
    std::vector<ScanPoint> out;
    for (double v : values) {
        MarketConfig cfg = base;
        switch (axis) {
            case ScanAxis::Agents: cfg.agent_count = static_cast<int>(v); break;
            case ScanAxis::Gesture: cfg.gesture_scalar = v; break;
            case ScanAxis::Accuracy: cfg.cointegration_accuracy = static_cast<int>(v); break;
            case ScanAxis::Drawdown: cfg.drawdown_level = v; break;
        }
        const int lag = 2 * cfg.week_days;
        RunOptions options;
        options.record_equity = false;
        const auto per_run = map_ensemble(cfg, options, threads, [&](const SimOutput& run) {
            if (axis == ScanAxis::Drawdown) {
                const auto n = std::count(run.bankrupt.begin(), run.bankrupt.end(), true);
                return static_cast<double>(n) / static_cast<double>(run.bankrupt.size());
            }
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& prices : run.prices) {
                const auto xs = axis == ScanAxis::Agents ? windowed_volatility(prices, lag) : log_returns(prices);
                for (double x : xs) sum += std::abs(x);
                count += xs.size();
            }
            return sum / static_cast<double>(count);
        });
        out.push_back({v, std::accumulate(per_run.begin(), per_run.end(), 0.0) / static_cast<double>(per_run.size())});
    }
    return out;
}

}  // namespace cryptosim
