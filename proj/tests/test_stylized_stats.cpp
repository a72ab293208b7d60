#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cryptosim/stylized_stats.hpp"
#include "oracles/oracles.hpp"

using namespace cryptosim;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    auto steps = noise(n, seed);
    std::vector<double> p{100.0};
    for (std::size_t t = 1; t < n; ++t) p.push_back(p.back() * std::exp(0.02 * steps[t]));
    return p;
}

}  // namespace

TEST(LogReturns, Examples) {
    EXPECT_EQ(log_returns(std::vector<double>{100, 100}), std::vector<double>{0.0});
    EXPECT_NEAR(log_returns(std::vector<double>{100, 110})[0], 0.09531017980432493, 1e-15);
    const auto r = log_returns(std::vector<double>{100, 50, 100});
    EXPECT_DOUBLE_EQ(r[0], -std::log(2.0));
    EXPECT_DOUBLE_EQ(r[1], std::log(2.0));
    EXPECT_THROW((void)log_returns(std::vector<double>{100, 0}), ValidationError);
    EXPECT_THROW((void)log_returns(std::vector<double>{100}), ValidationError);
}

TEST(Volatility, Examples) {
    const std::vector<double> flat(30, 50.0);
    for (double v : windowed_volatility(flat, 5)) EXPECT_EQ(v, 0.0);
    const auto v = windowed_volatility(std::vector<double>{100, 100, 200}, 2);
    ASSERT_EQ(v.size(), 1u);
    // population sd of (100, 100, 200) is 100 sqrt(2) / 3.
    EXPECT_NEAR(v[0], 100.0 * std::sqrt(2.0) / 3.0 / 200.0, 1e-15);
    EXPECT_EQ(windowed_volatility(random_walk(50, 1), 7).size(), 43u);
    EXPECT_THROW((void)windowed_volatility(flat, 30), ValidationError);
    EXPECT_THROW((void)windowed_volatility(flat, 1), ValidationError);
}

TEST(AdjacentCorrelation, PeriodicAndNegated) {
    std::vector<double> periodic;
    for (int t = 0; t < 40; ++t) periodic.push_back(std::sin(2 * M_PI * t / 5.0) + 0.1 * (t % 5));
    for (double c : adjacent_window_correlation(periodic, 5)) EXPECT_NEAR(c, 1.0, 1e-12);

    const auto x = noise(10, 3);
    std::vector<double> joined{0.0};
    joined.insert(joined.end(), x.begin(), x.end());
    for (double v : x) joined.push_back(-v);
    const auto c = adjacent_window_correlation(joined, 10);
    ASSERT_FALSE(c.empty());
    EXPECT_NEAR(c.back(), -1.0, 1e-12);
}

TEST(AdjacentCorrelation, ZeroVarianceWindowIsZero) {
    std::vector<double> x(20, 1.0);
    x[15] = 3.0;
    const auto c = adjacent_window_correlation(x, 5);
    EXPECT_EQ(c.front(), 0.0);
}

TEST(AdjacentCorrelation, WhiteNoiseEnsembleMeanNearZero) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < 1000; ++k) {
        for (double c : adjacent_window_correlation(noise(40, 100 + k), 14)) {
            sum += c;
            ++n;
        }
    }
    // per-value sd is about 1/sqrt(14); values within a series overlap, so the
    // mean over 1000 series has sd near 0.013.
    EXPECT_LT(std::abs(sum / n), 0.04);
}

TEST(ShiftedCorrelation, Examples) {
    const auto x = noise(100, 4);
    EXPECT_THROW((void)shifted_window_mean_correlation(x, 7, 0), ValidationError);
    std::vector<double> ramp(50);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    for (int s : {1, 3, 6}) EXPECT_NEAR(shifted_window_mean_correlation(ramp, 7, s), 1.0, 1e-12);
    const auto wn = noise(1000, 5);
    for (int s : {1, 2, 5}) {
        const double m = shifted_window_mean_correlation(wn, 7, s);
        EXPECT_GE(m, -0.15);
        EXPECT_LE(m, 0.15);
    }
}

TEST(Moments, Examples) {
    const auto z = noise(100000, 6);
    const auto m = moments(z);
    EXPECT_NEAR(m.excess_kurtosis, 0.0, 0.1);
    EXPECT_FALSE(m.degenerate);
    std::vector<double> two;
    for (int i = 0; i < 100; ++i) two.push_back(i % 2 ? 1.0 : -1.0);
    EXPECT_NEAR(moments(two).excess_kurtosis, -2.0, 1e-12);
    const auto c = moments(std::vector<double>(10, 2.0));
    EXPECT_TRUE(c.degenerate);
    EXPECT_EQ(c.skewness, 0.0);
    EXPECT_EQ(c.excess_kurtosis, 0.0);
    EXPECT_THROW((void)moments(std::vector<double>{1, 2, 3}), ValidationError);
}

TEST(TailIndex, ParetoSample) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(100000);
    for (auto& v : x) v = std::pow(1.0 - u(rng), -1.0 / 3.0);
    const double a = tail_index(x, 1000);
    EXPECT_GE(a, 2.6);
    EXPECT_LE(a, 3.4);
    EXPECT_NO_THROW((void)tail_index(x, 10));
    EXPECT_THROW((void)tail_index(x, 9), ValidationError);
    EXPECT_THROW((void)tail_index(std::vector<double>(30, 1.0), 15), ValidationError);
}

// Light tail: the estimate grows as the threshold moves out (smaller k).
TEST(TailIndex, ExponentialEstimateFallsWithK) {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(100000);
    for (auto& v : x) v = e(rng);
    EXPECT_GT(tail_index(x, 100), tail_index(x, 1000));
    EXPECT_GT(tail_index(x, 1000), tail_index(x, 10000));
}

TEST(Histogram, DistanceExamples) {
    const std::vector<double> edges{0.0, 1.0, 2.0};
    Histogram a{edges, {0.5, 0.5}}, b{edges, {1.0, 0.0}}, c{edges, {0.0, 1.0}};
    EXPECT_EQ(histogram_distance(a, a), 0.0);
    EXPECT_EQ(histogram_distance(b, c), 2.0);
    EXPECT_EQ(histogram_distance(a, b), 1.0);
    Histogram d{{0.0, 1.0, 3.0}, {0.5, 0.5}};
    EXPECT_THROW((void)histogram_distance(a, d), ValidationError);
}

TEST(Histogram, MassesSumToOneAndClampTails) {
    const auto x = noise(5000, 9);
    const auto edges = shared_edges(x);
    EXPECT_EQ(edges.size(), static_cast<std::size_t>(kHistogramBins) + 1);
    const auto h = make_histogram(x, edges);
    EXPECT_NEAR(std::accumulate(h.masses.begin(), h.masses.end(), 0.0), 1.0, 1e-9);
    const auto outside = make_histogram(std::vector<double>{-1e9, 1e9}, edges);
    EXPECT_DOUBLE_EQ(outside.masses.front(), 0.5);
    EXPECT_DOUBLE_EQ(outside.masses.back(), 0.5);
}

TEST(Oracle, CorrelationsAndVolatilityMatchDirectFormulas) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = random_walk(200, 50 + s);
        const auto r = log_returns(p);
        for (int d : {2, 7, 14, 30}) {
            const auto v = windowed_volatility(p, d);
            const auto vo = oracle::volatility(p, d);
            ASSERT_EQ(v.size(), vo.size());
            for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], vo[i], 1e-12);
            const auto a = adjacent_window_correlation(r, d);
            const auto ao = oracle::adjacent(r, d);
            ASSERT_EQ(a.size(), ao.size());
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], ao[i], 1e-12);
        }
        for (int w : {7, 14})
            for (int sh = 1; sh <= 5; ++sh)
                EXPECT_NEAR(shifted_window_mean_correlation(r, w, sh), oracle::mean(oracle::shifted(r, w, sh)), 1e-12);
    }
}

TEST(Report, FullLengthSeriesHasEveryMetric) {
    const auto p = random_walk(1453, 10);
    const auto v = noise(1453, 11);
    std::vector<double> vol;
    for (double x : v) vol.push_back(std::abs(x) * 100);
    const auto r = build_report(p, vol);
    for (const auto& [name, m] : r.families) {
        EXPECT_FALSE(m.omitted) << name;
        EXPECT_FALSE(m.values.empty()) << name;
        if (name.find("corr") != std::string::npos) {
            for (double c : m.values) {
                EXPECT_GE(c, -1.0);
                EXPECT_LE(c, 1.0);
            }
        }
    }
    EXPECT_EQ(r.families.size(), 14u);
    EXPECT_EQ(r.shifted_mean_week.size(), 5u);
    EXPECT_EQ(r.shifted_mean_2week.size(), 5u);
    EXPECT_TRUE(r.tail_index.has_value());
    EXPECT_EQ(build_report(p, vol), r);
}

TEST(Report, ShortSeriesFlagsLongLags) {
    const auto p = random_walk(100, 12);
    const std::vector<double> vol(100, 5.0);
    const auto r = build_report(p, vol);
    EXPECT_TRUE(r.families.at("volatility_365").omitted);
    EXPECT_TRUE(r.families.at("return_corr_365").omitted);
    EXPECT_TRUE(r.families.at("volume_corr_365").omitted);
    EXPECT_FALSE(r.families.at("volatility_14").omitted);
    EXPECT_FALSE(r.families.at("volatility_90").omitted);
    for (double c : r.families.at("volume_corr_14").values) EXPECT_EQ(c, 0.0);  // constant volume
}

TEST(Report, SelfComparisonIsZeroAndPoolingConcatenates) {
    const auto a = build_report(random_walk(400, 13), noise(400, 14));
    for (const auto& d : compare_reports(a, a)) EXPECT_EQ(d.distance, 0.0) << d.family;
    const auto b = build_report(random_walk(300, 15), noise(300, 16));
    const std::vector<StylizedStatsReport> parts{a, b};
    const auto pooled = pool_reports(parts);
    EXPECT_EQ(pooled.families.at("returns").values.size(), 399u + 299u);
    EXPECT_EQ(pooled.length, 700u);
}

TEST(EquityAnalysis, FinalWindowAndTopDecile) {
    std::vector<std::vector<double>> eq{{100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 110},
                                        {100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 90}};
    const auto r = final_window_returns(eq, 0.1);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0], 0.1, 1e-12);
    EXPECT_NEAR(r[1], -0.1, 1e-12);
    std::vector<double> values(20);
    std::iota(values.begin(), values.end(), 1.0);
    EXPECT_DOUBLE_EQ(top_decile_mean(values), 19.5);
    EXPECT_DOUBLE_EQ(top_decile_mean({3.0}), 3.0);
}
