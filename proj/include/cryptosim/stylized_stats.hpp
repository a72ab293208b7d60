#pragma once

// Microstructure metrics on a price/volume series: return distribution,
// normalized volatilities, window-to-window correlations, moments, tail index,
// and histogram distances between two sets of metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cryptosim/errors.hpp"

namespace cryptosim {

[[nodiscard]] inline std::vector<double> log_returns(std::span<const double> prices) {
    require(prices.size() >= 2, "log_returns: need at least 2 prices");
    for (double p : prices) require(p > 0.0, "log_returns: non-positive price");
    std::vector<double> r(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) r[t - 1] = std::log(prices[t] / prices[t - 1]);
    return r;
}

namespace detail {

inline bool constant(std::span<const double> x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *lo == *hi;
}

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace detail

/// Pearson correlation; a constant argument gives 0.
[[nodiscard]] inline double pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length samples of size >= 2");
    if (detail::constant(a) || detail::constant(b)) return 0.0;
    const double ma = detail::mean(a);
    const double mb = detail::mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Population standard deviation.
[[nodiscard]] inline double population_std(std::span<const double> x) {
    require(!x.empty(), "population_std: empty sample");
    if (detail::constant(x)) return 0.0;
    const double m = detail::mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

/// For t = delta .. n-1: std(P[t-delta .. t]) / P(t). Length n - delta.
[[nodiscard]] inline std::vector<double> windowed_volatility(std::span<const double> prices, int delta) {
    require(delta >= 2, "windowed_volatility: delta must be >= 2");
    const auto d = static_cast<std::size_t>(delta);
    require(prices.size() > d, "windowed_volatility: window larger than series");
    std::vector<double> out;
    out.reserve(prices.size() - d);
    for (std::size_t t = d; t < prices.size(); ++t) {
        out.push_back(population_std(prices.subspan(t - d, d + 1)) / prices[t]);
    }
    return out;
}

/// Correlation of (t-delta, t] with (t-2delta, t-delta] for every t that fits.
[[nodiscard]] inline std::vector<double> adjacent_window_correlation(std::span<const double> series, int delta) {
    require(delta >= 2, "adjacent_window_correlation: delta must be >= 2");
    const auto d = static_cast<std::size_t>(delta);
    require(series.size() > 2 * d, "adjacent_window_correlation: series shorter than two windows");
    std::vector<double> out;
    out.reserve(series.size() - 2 * d + 1);
    for (std::size_t t = 2 * d - 1; t < series.size(); ++t) {
        out.push_back(pearson(series.subspan(t + 1 - d, d), series.subspan(t + 1 - 2 * d, d)));
    }
    return out;
}

/// Correlation of the window ending at t with the same-width window ending at t - shift.
[[nodiscard]] inline std::vector<double> shifted_window_correlations(std::span<const double> series, int window,
                                                                     int shift) {
    require(window >= 2, "shifted_window_correlation: window must be >= 2");
    require(shift >= 1, "shifted_window_correlation: shift must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    const auto s = static_cast<std::size_t>(shift);
    require(series.size() >= w + s, "shifted_window_correlation: series too short");
    std::vector<double> out;
    out.reserve(series.size() - w - s + 1);
    for (std::size_t t = w + s - 1; t < series.size(); ++t) {
        out.push_back(pearson(series.subspan(t + 1 - w, w), series.subspan(t + 1 - w - s, w)));
    }
    return out;
}

[[nodiscard]] inline double shifted_window_mean_correlation(std::span<const double> series, int window, int shift) {
    const auto c = shifted_window_correlations(series, window, shift);
    return detail::mean(c);
}

/// Pearson correlation of x(t) with x(t - lag).
[[nodiscard]] inline double lag_autocorrelation(std::span<const double> x, int lag) {
    require(lag >= 1 && x.size() >= static_cast<std::size_t>(lag) + 2, "lag_autocorrelation: series too short");
    const auto l = static_cast<std::size_t>(lag);
    return pearson(x.subspan(l), x.first(x.size() - l));
}

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool degenerate = false;  // zero variance: skewness and kurtosis reported as 0

    bool operator==(const Moments&) const = default;
};

[[nodiscard]] inline Moments moments(std::span<const double> x) {
    require(x.size() >= 4, "moments: need at least 4 values");
    Moments m;
    m.mean = detail::mean(x);
    if (detail::constant(x)) {
        m.degenerate = true;
        return m;
    }
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.std = std::sqrt(m2);
    m.skewness = m3 / (m2 * m.std);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return m;
}

/// Hill estimator of the tail exponent from the k largest |x|.
[[nodiscard]] inline double tail_index(std::span<const double> x, int k) {
    require(k >= 10, "tail_index: k must be >= 10");
    const auto ku = static_cast<std::size_t>(k);
    require(2 * ku < x.size(), "tail_index: k must be < length / 2");
    std::vector<double> a(x.size());
    std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(ku), a.end(), std::greater<>{});
    const double threshold = a[ku];
    require(threshold > 0.0, "tail_index: insufficient non-zero tail sample");
    double h = 0.0;
    for (std::size_t i = 0; i < ku; ++i) h += std::log(a[i] / threshold);
    h /= static_cast<double>(k);
    require(h > 0.0, "tail_index: degenerate tail sample");
    return 1.0 / h;
}

struct Histogram {
    std::vector<double> edges;
    std::vector<double> masses;
};

inline constexpr int kHistogramBins = 61;
inline constexpr double kHistogramHalfWidthStd = 5.0;

/// Equal-width edges over mean +- 5 std of the pooled sample.
[[nodiscard]] inline std::vector<double> shared_edges(std::span<const double> pooled, int bins = kHistogramBins) {
    require(!pooled.empty(), "shared_edges: empty sample");
    require(bins >= 1, "shared_edges: bins must be >= 1");
    const double centre = detail::mean(pooled);
    double half = kHistogramHalfWidthStd * population_std(pooled);
    if (!(half > 0.0)) half = std::max(1e-9, 1e-9 * std::abs(centre));
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        edges[static_cast<std::size_t>(i)] = centre - half + 2.0 * half * i / bins;
    }
    return edges;
}

/// Mass histogram; values outside the edges land in the end bins.
[[nodiscard]] inline Histogram make_histogram(std::span<const double> sample, std::vector<double> edges) {
    require(edges.size() >= 2, "make_histogram: need at least 2 edges");
    require(std::is_sorted(edges.begin(), edges.end()), "make_histogram: edges must ascend");
    require(!sample.empty(), "make_histogram: empty sample");
    Histogram h{std::move(edges), {}};
    const std::size_t bins = h.edges.size() - 1;
    h.masses.assign(bins, 0.0);
    for (double v : sample) {
        const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        auto idx = static_cast<std::ptrdiff_t>(it - h.edges.begin()) - 1;
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        h.masses[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (double& m : h.masses) m /= static_cast<double>(sample.size());
    return h;
}

/// L1 distance between two mass histograms on the same edges; lies in [0, 2].
[[nodiscard]] inline double histogram_distance(const Histogram& a, const Histogram& b) {
    require(a.edges == b.edges, "histogram_distance: mismatched bin edges");
    require(a.masses.size() == b.masses.size(), "histogram_distance: mismatched bin count");
    double d = 0.0;
    for (std::size_t i = 0; i < a.masses.size(); ++i) d += std::abs(a.masses[i] - b.masses[i]);
    return d;
}

struct Calendar {
    int week = 7;
    int month = 30;
    int year = 365;

    bool operator==(const Calendar&) const = default;
};

/// One sample family of a report, e.g. every 2-week volatility value.
struct MetricSamples {
    std::vector<double> values;
    bool omitted = false;

    bool operator==(const MetricSamples&) const = default;
};

struct StylizedStatsReport {
    Calendar calendar;
    std::size_t length = 0;  // number of prices (summed over pooled series)
    std::map<std::string, MetricSamples> families;
    Moments return_moments;
    std::optional<double> tail_index;
    std::vector<double> shifted_mean_week;    // shifts 1..5, window T_w
    std::vector<double> shifted_mean_2week;   // shifts 2..10 step 2, window 2T_w

    bool operator==(const StylizedStatsReport&) const = default;
};

inline constexpr int kMaxShift = 5;

/// Lags used for volatility and adjacent-window correlations.
[[nodiscard]] inline std::vector<int> report_lags(const Calendar& c) {
    return {2 * c.week, 3 * c.month, c.year};
}

/// Families that enter the calibration objective, in a fixed order.
[[nodiscard]] inline std::vector<std::string> objective_families(const Calendar& c) {
    std::vector<std::string> names{"returns"};
    for (const char* prefix : {"volatility_", "return_corr_", "volume_corr_"}) {
        for (int lag : report_lags(c)) names.push_back(prefix + std::to_string(lag));
    }
    names.push_back("volatility_corr_" + std::to_string(2 * c.week));
    return names;
}

[[nodiscard]] inline std::vector<std::string> shifted_families(const Calendar&) {
    return {"shifted_corr_1", "shifted_corr_2", "shifted_corr_5"};
}

namespace detail {

template <class F>
void add_family(StylizedStatsReport& r, const std::string& name, bool fits, F&& compute) {
    MetricSamples m;
    if (fits) m.values = compute();
    m.omitted = !fits;
    r.families.emplace(name, std::move(m));
}

inline void fill_summaries(StylizedStatsReport& r) {
    const auto& returns = r.families.at("returns").values;
    r.return_moments = returns.size() >= 4 ? moments(returns) : Moments{0, 0, 0, 0, true};
    const int k = std::max(10, static_cast<int>(returns.size() / 20));
    r.tail_index.reset();
    if (2 * static_cast<std::size_t>(k) < returns.size()) {
        try {
            r.tail_index = cryptosim::tail_index(returns, k);
        } catch (const ValidationError&) {
        }
    }
}

}  // namespace detail

/// All metric families for one aligned price/volume series. Metrics whose
/// window does not fit the series are kept as empty, flagged entries.
[[nodiscard]] inline StylizedStatsReport build_report(std::span<const double> prices, std::span<const double> volumes,
                                                      Calendar cal = {}) {
    require(prices.size() == volumes.size(), "build_report: prices and volumes must be aligned");
    require(prices.size() >= 2, "build_report: need at least 2 prices");
    StylizedStatsReport r;
    r.calendar = cal;
    r.length = prices.size();
    const auto returns = log_returns(prices);
    const std::size_t n = prices.size();
    const std::size_t nr = returns.size();

    detail::add_family(r, "returns", true, [&] { return returns; });
    for (int lag : report_lags(cal)) {
        const auto d = static_cast<std::size_t>(lag);
        const auto tag = std::to_string(lag);
        detail::add_family(r, "volatility_" + tag, n > d, [&] { return windowed_volatility(prices, lag); });
        detail::add_family(r, "return_corr_" + tag, nr > 2 * d,
                           [&] { return adjacent_window_correlation(returns, lag); });
        detail::add_family(r, "volume_corr_" + tag, n > 2 * d,
                           [&] { return adjacent_window_correlation(volumes, lag); });
    }
    const int vlag = 2 * cal.week;
    const auto vd = static_cast<std::size_t>(vlag);
    detail::add_family(r, "volatility_corr_" + std::to_string(vlag), n > vd && n - vd > 2 * vd, [&] {
        const auto vol = windowed_volatility(prices, vlag);
        return adjacent_window_correlation(vol, vlag);
    });
    for (int shift : {1, 2, 5}) {
        detail::add_family(r, "shifted_corr_" + std::to_string(shift),
                           nr >= static_cast<std::size_t>(cal.week + shift),
                           [&] { return shifted_window_correlations(returns, cal.week, shift); });
    }
    for (int s = 1; s <= kMaxShift; ++s) {
        if (nr >= static_cast<std::size_t>(cal.week + s)) {
            r.shifted_mean_week.push_back(shifted_window_mean_correlation(returns, cal.week, s));
        }
        if (nr >= static_cast<std::size_t>(2 * cal.week + 2 * s)) {
            r.shifted_mean_2week.push_back(shifted_window_mean_correlation(returns, 2 * cal.week, 2 * s));
        }
    }
    detail::fill_summaries(r);
    return r;
}

/// Concatenates sample families across reports (an ensemble or a set of assets).
/// Shifted mean correlations are averaged element-wise over reports that have them.
[[nodiscard]] inline StylizedStatsReport pool_reports(std::span<const StylizedStatsReport> reports) {
    require(!reports.empty(), "pool_reports: nothing to pool");
    StylizedStatsReport r;
    r.calendar = reports.front().calendar;
    for (const auto& part : reports) {
        require(part.calendar.week == r.calendar.week && part.calendar.month == r.calendar.month &&
                    part.calendar.year == r.calendar.year,
                "pool_reports: calendars differ");
        r.length += part.length;
        for (const auto& [name, m] : part.families) {
            auto [it, inserted] = r.families.try_emplace(name, MetricSamples{{}, true});
            it->second.values.insert(it->second.values.end(), m.values.begin(), m.values.end());
            if (!m.omitted) it->second.omitted = false;
        }
    }
    auto average = [&](auto member) {
        std::vector<double> sum;
        std::vector<int> count;
        for (const auto& part : reports) {
            const auto& v = part.*member;
            if (v.size() > sum.size()) {
                sum.resize(v.size(), 0.0);
                count.resize(v.size(), 0);
            }
            for (std::size_t i = 0; i < v.size(); ++i) {
                sum[i] += v[i];
                ++count[i];
            }
        }
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] /= count[i];
        return sum;
    };
    r.shifted_mean_week = average(&StylizedStatsReport::shifted_mean_week);
    r.shifted_mean_2week = average(&StylizedStatsReport::shifted_mean_2week);
    detail::fill_summaries(r);
    return r;
}

struct FamilyDistance {
    std::string family;
    double distance = 0.0;
};

/// Distances per sample family present in both reports, on edges computed
/// from the pooled samples of the two.
[[nodiscard]] inline std::vector<FamilyDistance> compare_reports(const StylizedStatsReport& a,
                                                                 const StylizedStatsReport& b) {
    std::vector<FamilyDistance> out;
    for (const auto& [name, ma] : a.families) {
        const auto it = b.families.find(name);
        if (it == b.families.end()) continue;
        const auto& mb = it->second;
        if (ma.omitted || mb.omitted || ma.values.empty() || mb.values.empty()) continue;
        std::vector<double> pooled(ma.values);
        pooled.insert(pooled.end(), mb.values.begin(), mb.values.end());
        const auto edges = shared_edges(pooled);
        out.push_back({name, histogram_distance(make_histogram(ma.values, edges), make_histogram(mb.values, edges))});
    }
    return out;
}

/// Per-agent return over the last `fraction` of the equity curves: nav(end) / nav(start) - 1.
/// Agents whose starting NAV is not positive are skipped.
[[nodiscard]] inline std::vector<double> final_window_returns(const std::vector<std::vector<double>>& equity,
                                                              double fraction = 0.1) {
    require(fraction > 0.0 && fraction <= 1.0, "final_window_returns: fraction must lie in (0, 1]");
    std::vector<double> out;
    for (const auto& curve : equity) {
        require(curve.size() >= 2, "final_window_returns: equity curve too short");
        const std::size_t last = curve.size() - 1;
        const auto span = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(last)));
        const double start = curve[last - span];
        if (start > 0.0) out.push_back(curve[last] / start - 1.0);
    }
    return out;
}

/// Mean of the best 10% (at least one) of the values.
[[nodiscard]] inline double top_decile_mean(std::vector<double> values) {
    require(!values.empty(), "top_decile_mean: empty sample");
    const std::size_t k = std::max<std::size_t>(1, values.size() / 10);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end(), std::greater<>{});
    std::sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>{});
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += values[i];
    return s / static_cast<double>(k);
}

}  // namespace cryptosim
