#pragma once

// Hidden "true value" jump process per asset and each agent's noisy,
// mean-reverting estimate of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cryptosim/errors.hpp"
#include "cryptosim/random.hpp"

namespace cryptosim {

/// Step multiplier is exp(n_t + s_t * a_t): n_t ~ N(0, drift_sigma) every step;
/// with probability jump_probability a jump of sign s_t (up with up_probability)
/// and magnitude a_t ~ LogNormal(jump_log_mu, jump_log_sigma).
/// Defaults were fitted by scanning JumpStats over 20 seeds at horizon 1453.
struct JumpParams {
    double drift_sigma = 0.001;
    double jump_probability = 0.15;
    double jump_log_mu = -3.55;
    double jump_log_sigma = 1.00;
    double up_probability = 0.5;
};

struct FundamentalSeries {
    int asset_id = 0;
    std::vector<double> values;
};

struct CointegratedView {
    int agent_id = 0;
    int asset_id = 0;
    std::vector<double> values;
};

struct JumpStats {
    double annual_jump_rate = 0.0;
    double mean_jump_amplitude_pct = 0.0;
    double std_jump_amplitude_pct = 0.0;
    double mean_disparity_pct = 0.0;
    double std_disparity_pct = 0.0;
};

/// Relative move above which a step counts as a large jump in the annual rate.
inline constexpr double kLargeJumpThreshold = 0.20;
/// Steps smaller than this are drift noise, not jumps, for amplitude statistics.
inline constexpr double kJumpDetectionFloor = 0.005;

[[nodiscard]] inline FundamentalSeries generate_fundamental(double initial, int horizon,
                                                            const JumpParams& params,
                                                            std::uint64_t seed, int asset_id = 0) {
    require(horizon >= 2, "generate_fundamental: horizon must be >= 2");
    require(initial > 0.0, "generate_fundamental: initial value must be positive");

    Rng rng(seed);
    FundamentalSeries series;
    series.asset_id = asset_id;
    series.values.reserve(static_cast<std::size_t>(horizon));
    series.values.push_back(initial);
    for (int t = 1; t < horizon; ++t) {
        // Fixed draw count per step keeps streams aligned across parameter sets.
        const double noise = normal(rng, 0.0, 1.0) * params.drift_sigma;
        const double arrival = uniform01(rng);
        const double sign_draw = uniform01(rng);
        const double magnitude = std::exp(params.jump_log_mu + params.jump_log_sigma * normal(rng, 0.0, 1.0));
        double log_step = noise;
        if (arrival < params.jump_probability) {
            log_step += sign_draw < params.up_probability ? magnitude : -magnitude;
        }
        series.values.push_back(series.values.back() * std::exp(log_step));
    }
    return series;
}

/// Stationary relative-error scale of an agent's view as a function of the
/// accuracy level nu: scale * 2^(-nu/4). scale is fitted so nu = 10 gives a
/// mean absolute disparity near 4.69%.
struct CointegrationParams {
    double scale = 0.3269;
    double persistence = 0.97;
};

[[nodiscard]] inline double view_sigma(int accuracy, const CointegrationParams& params = {}) {
    return params.scale * std::exp2(-static_cast<double>(accuracy) / 4.0);
}

/// B(t) = T(t) (1 + e_t) with e_t an AR(1) process of stationary sd view_sigma(nu),
/// clamped to 5 sd (and above -0.95 so views stay positive).
[[nodiscard]] inline CointegratedView cointegrate(const FundamentalSeries& series, int accuracy,
                                                  std::uint64_t agent_seed, int agent_id = 0,
                                                  const CointegrationParams& params = {}) {
    require(accuracy >= 1 && accuracy <= 64, "cointegrate: accuracy must lie in [1, 64]");
    require(params.persistence >= 0.0 && params.persistence < 1.0,
            "cointegrate: persistence must lie in [0, 1)");

    const double sigma = view_sigma(accuracy, params);
    const double phi = params.persistence;
    const double innovation_sd = sigma * std::sqrt(1.0 - phi * phi);
    const double upper = 5.0 * sigma;
    const double lower = -std::min(5.0 * sigma, 0.95);

    Rng rng(agent_seed);
    CointegratedView view;
    view.agent_id = agent_id;
    view.asset_id = series.asset_id;
    view.values.resize(series.values.size());

    double err = sigma * normal(rng, 0.0, 1.0);
    for (std::size_t t = 0; t < series.values.size(); ++t) {
        if (t > 0) err = phi * err + innovation_sd * normal(rng, 0.0, 1.0);
        err = std::clamp(err, lower, upper);
        view.values[t] = series.values[t] * (1.0 + err);
    }
    return view;
}

namespace detail {
inline void mean_std(std::span<const double> xs, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    for (double x : xs) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(xs.size()));
}
}  // namespace detail

/// Relative step sizes are measured as |T(t) - T(t-1)| / T(t).
[[nodiscard]] inline JumpStats fundamental_stats(const FundamentalSeries& series,
                                                 std::span<const CointegratedView> views,
                                                 double days_per_year = 365.0) {
    JumpStats stats;
    const auto& v = series.values;
    if (v.size() < 2) return stats;

    int large = 0;
    std::vector<double> amplitudes;
    for (std::size_t t = 1; t < v.size(); ++t) {
        const double rel = std::abs(v[t] - v[t - 1]) / v[t];
        if (rel > kLargeJumpThreshold) ++large;
        if (rel > kJumpDetectionFloor) amplitudes.push_back(100.0 * rel);
    }
    stats.annual_jump_rate = static_cast<double>(large) * days_per_year / static_cast<double>(v.size());
    detail::mean_std(amplitudes, stats.mean_jump_amplitude_pct, stats.std_jump_amplitude_pct);

    std::vector<double> disparities;
    for (const auto& view : views) {
        require(view.asset_id == series.asset_id && view.values.size() == v.size(),
                "fundamental_stats: view does not match series");
        for (std::size_t t = 0; t < v.size(); ++t) {
            disparities.push_back(100.0 * std::abs(v[t] - view.values[t]) / v[t]);
        }
    }
    detail::mean_std(disparities, stats.mean_disparity_pct, stats.std_disparity_pct);
    return stats;
}

}  // namespace cryptosim
