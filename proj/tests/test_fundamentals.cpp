#include <gtest/gtest.h>

#include <vector>

#include "cryptosim/fundamentals.hpp"

using namespace cryptosim;

TEST(GenerateFundamental, DegenerateParametersGiveConstantSeries) {
    JumpParams p;
    p.jump_probability = 0.0;
    p.drift_sigma = 0.0;
    const auto s = generate_fundamental(100.0, 50, p, 1);
    ASSERT_EQ(s.values.size(), 50u);
    for (double v : s.values) EXPECT_EQ(v, 100.0);
}

TEST(GenerateFundamental, RejectsBadArguments) {
    EXPECT_THROW((void)generate_fundamental(100.0, 1, {}, 1), ValidationError);
    EXPECT_THROW((void)generate_fundamental(0.0, 10, {}, 1), ValidationError);
    EXPECT_THROW((void)generate_fundamental(-5.0, 10, {}, 1), ValidationError);
}

TEST(GenerateFundamental, PositiveAndDeterministic) {
    JumpParams wild;
    wild.jump_probability = 0.5;
    wild.jump_log_mu = -0.5;
    const auto a = generate_fundamental(100.0, 5000, wild, 99);
    const auto b = generate_fundamental(100.0, 5000, wild, 99);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values.front(), 100.0);
    for (double v : a.values) EXPECT_GT(v, 0.0);
    const auto c = generate_fundamental(100.0, 5000, wild, 100);
    EXPECT_NE(a.values, c.values);
}

TEST(Cointegrate, ZeroNoiseIsIdentity) {
    const auto s = generate_fundamental(100.0, 200, {}, 3);
    CointegrationParams zero;
    zero.scale = 0.0;
    const auto v = cointegrate(s, 10, 5, 0, zero);
    EXPECT_EQ(v.values, s.values);
}

TEST(Cointegrate, DistinctSeedsGiveDistinctViews) {
    const auto s = generate_fundamental(100.0, 200, {}, 3);
    const auto a = cointegrate(s, 10, 1, 0);
    const auto b = cointegrate(s, 10, 2, 1);
    double max_diff = 0.0;
    for (std::size_t t = 0; t < s.values.size(); ++t) max_diff = std::max(max_diff, std::abs(a.values[t] - b.values[t]));
    EXPECT_GT(max_diff, 0.0);
}

TEST(Cointegrate, RejectsAccuracyOutOfRange) {
    const auto s = generate_fundamental(100.0, 20, {}, 3);
    EXPECT_THROW((void)cointegrate(s, 0, 1), ValidationError);
    EXPECT_THROW((void)cointegrate(s, 65, 1), ValidationError);
    EXPECT_NO_THROW((void)cointegrate(s, 1, 1));
    EXPECT_NO_THROW((void)cointegrate(s, 64, 1));
}

TEST(Cointegrate, DeviationBoundedAndPositive) {
    const auto s = generate_fundamental(100.0, 3000, {}, 4);
    for (int nu : {1, 9, 12}) {
        const double bound = 5.0 * view_sigma(nu) + 1e-12;
        const auto v = cointegrate(s, nu, 8, 0);
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            EXPECT_GT(v.values[t], 0.0);
            EXPECT_LE(std::abs(v.values[t] / s.values[t] - 1.0), bound);
        }
    }
}

TEST(Cointegrate, SigmaStrictlyDecreasing) {
    for (int nu = 1; nu < 64; ++nu) EXPECT_GT(view_sigma(nu), view_sigma(nu + 1));
}

TEST(Cointegrate, LongRunMeanRatioIsOne) {
    const auto s = generate_fundamental(100.0, 10000, {}, 5);
    const auto v = cointegrate(s, 10, 6, 0);
    double sum = 0.0;
    for (std::size_t t = 0; t < s.values.size(); ++t) sum += v.values[t] / s.values[t];
    EXPECT_NEAR(sum / static_cast<double>(s.values.size()), 1.0, 0.01);
}

TEST(Cointegrate, DisparityDecreasesWithAccuracy) {
    std::vector<double> means;
    for (int nu : {9, 10, 12}) {
        double acc = 0.0;
        for (int seed = 0; seed < 20; ++seed) {
            const auto s = generate_fundamental(100.0, 1453, {}, derive_seed(77, Stream::Fundamental, seed));
            std::vector<CointegratedView> views;
            for (int a = 0; a < 5; ++a) views.push_back(cointegrate(s, nu, derive_seed(77, Stream::View, seed * 5 + a), a));
            acc += fundamental_stats(s, views).mean_disparity_pct;
        }
        means.push_back(acc / 20.0);
    }
    EXPECT_GT(means[0], means[1]);
    EXPECT_GT(means[1], means[2]);
}

TEST(FundamentalStats, ConstantSeriesExactViews) {
    FundamentalSeries s{0, std::vector<double>(100, 100.0)};
    std::vector<CointegratedView> views{{0, 0, s.values}};
    const auto st = fundamental_stats(s, views);
    EXPECT_EQ(st.annual_jump_rate, 0.0);
    EXPECT_EQ(st.mean_jump_amplitude_pct, 0.0);
    EXPECT_EQ(st.std_jump_amplitude_pct, 0.0);
    EXPECT_EQ(st.mean_disparity_pct, 0.0);
    EXPECT_EQ(st.std_disparity_pct, 0.0);
}

TEST(FundamentalStats, OneLargeJumpPerYear) {
    // 365 values with one step whose size relative to the new level exceeds 20%.
    FundamentalSeries s{0, std::vector<double>(365, 100.0)};
    for (std::size_t t = 200; t < s.values.size(); ++t) s.values[t] = 130.0;
    const auto st = fundamental_stats(s, std::span<const CointegratedView>{});
    EXPECT_DOUBLE_EQ(st.annual_jump_rate, 1.0);
    EXPECT_NEAR(st.mean_jump_amplitude_pct, 100.0 * 30.0 / 130.0, 1e-12);
}

TEST(FundamentalStats, ConstantFivePercentView) {
    const auto s = generate_fundamental(100.0, 300, {}, 9);
    CointegratedView v{0, 0, s.values};
    for (double& x : v.values) x *= 1.05;
    const auto st = fundamental_stats(s, std::vector<CointegratedView>{v});
    EXPECT_NEAR(st.mean_disparity_pct, 5.0, 1e-9);
    EXPECT_NEAR(st.std_disparity_pct, 0.0, 1e-9);
}
