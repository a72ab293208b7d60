#pragma once

// Per-agent learning machinery: the forecasting policy F (which econometric
// estimator to blend with the agent's fundamental view) and the trading
// policy T (buy/hold/sell and how much price concession to offer).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "cryptosim/market_history.hpp"
#include "cryptosim/order_book.hpp"
#include "cryptosim/percentile_memory.hpp"
#include "cryptosim/policy.hpp"

namespace cryptosim {

struct AgentParams {
    int trading_window = 7;     // w
    int horizon = 30;           // tau, investment horizon in steps
    int memory_span = 365;      // h
    double gesture = 0.5;       // g
    double reflexivity = 0.5;   // rho: chartist weight scale
    double learning_rate = 0.1; // beta
    double drawdown_limit = 0.45;
};

inline constexpr double kMinPrice = 0.01;

// ---------------------------------------------------------------------------
// State and action encodings

struct ForecastState {
    int s0 = 1;  // long-term volatility band
    int s1 = 1;  // short-term volatility band
    int s2 = 0;  // fundamental-gap band
    [[nodiscard]] constexpr int index() const noexcept { return 9 * s0 + 3 * s1 + s2; }
    bool operator==(const ForecastState&) const = default;
};

struct ForecastAction {
    int a0 = 1;  // 0 mean-revert, 1 average, 2 trend
    int a1 = 0;  // window scale
    int a2 = 1;  // chartist vs fundamental weight
    [[nodiscard]] constexpr int index() const noexcept { return 9 * a0 + 3 * a1 + a2; }
    static constexpr ForecastAction from_index(int i) noexcept { return {i / 9, (i / 3) % 3, i % 3}; }
};

struct TradeState {
    int s0 = 1;  // forecast direction: fall / flat / rise
    int s1 = 1;  // long-term volatility tercile
    int s2 = 1;  // 0 when bonds fell below 60% of initial
    int s3 = 1;  // 0 when equity fell below 60% of initial
    int s4 = 0;  // traded volume: none / low / high
    [[nodiscard]] constexpr int index() const noexcept {
        return 36 * s0 + 12 * s1 + 6 * s2 + 3 * s3 + s4;
    }
    bool operator==(const TradeState&) const = default;
};

struct TradeAction {
    int a0 = 1;  // 0 sell, 1 hold, 2 buy
    int a1 = 1;  // 0 aggressive, 1 neutral, 2 passive
    [[nodiscard]] constexpr int index() const noexcept { return 3 * a0 + a1; }
    static constexpr TradeAction from_index(int i) noexcept { return {i / 3, i % 3}; }
};

// ---------------------------------------------------------------------------
// Percentile bands and rewards

/// <25% -> 0, >75% -> 2, else 1.
[[nodiscard]] constexpr int quartile_band(double p) noexcept { return p < 0.25 ? 0 : (p > 0.75 ? 2 : 1); }
/// <33% -> 0, >67% -> 2, else 1.
[[nodiscard]] constexpr int tercile_band(double p) noexcept { return p < 0.33 ? 0 : (p > 0.67 ? 2 : 1); }
/// Mean relative price/view gap: <10% -> 0, >30% -> 2, else 1.
[[nodiscard]] constexpr int gap_band(double gap) noexcept { return gap < 0.10 ? 0 : (gap > 0.30 ? 2 : 1); }

/// Forecast-error percentile to reward: small errors earn the most.
[[nodiscard]] constexpr int reward_from_percentile(double p) noexcept {
    if (p < 0.05) return 4;
    if (p < 0.25) return 2;
    if (p < 0.50) return 1;
    if (p < 0.75) return -1;
    if (p < 0.95) return -2;
    return -4;
}

/// Cash-flow percentile to reward: the same bands, oriented so large gains earn the most.
[[nodiscard]] constexpr int reward_from_cashflow_percentile(double p) noexcept {
    if (p < 0.05) return -4;
    if (p < 0.25) return -2;
    if (p < 0.50) return -1;
    if (p < 0.75) return 1;
    if (p < 0.95) return 2;
    return 4;
}

/// Realized cash flow of a cleared fill against today's price. Quantity is
/// signed: positive for purchases, negative for sales.
[[nodiscard]] constexpr double cashflow_reward(std::int64_t signed_quantity, double cleared_price,
                                               double price_now) noexcept {
    return static_cast<double>(signed_quantity) * (price_now - cleared_price);
}

// ---------------------------------------------------------------------------
// Forecasting (policy F)

/// Window length (1 + a1) tau / 2, rounded, at least one step.
[[nodiscard]] inline long forecast_window(int horizon, int a1) {
    return std::max(1L, std::lround((1.0 + a1) * horizon / 2.0));
}

/// Chartist estimate from the means of [t-2T, t-T] and [t-T, t].
[[nodiscard]] inline double chartist_estimate(const PrefixSeries& prices, long t, int a0, long window) {
    const double far = prices.mean(t - 2 * window, t - window);
    const double near = prices.mean(t - window, t);
    const double now = prices[static_cast<std::size_t>(t)];
    switch (a0) {
        case 0: return now + far - near;
        case 1: return 0.5 * (far + near);
        default: return now - far + near;
    }
}

/// Chartist weight alpha for a given reflexivity and a2.
[[nodiscard]] constexpr double chartist_weight(double reflexivity, int a2) noexcept {
    if (reflexivity <= 0.5) {
        constexpr std::array<double, 3> k{0.0, 1.0, 2.0};
        return k[static_cast<std::size_t>(a2)] * reflexivity;
    }
    switch (a2) {
        case 0: return 2.0 * reflexivity - 1.0;
        case 1: return reflexivity;
        default: return 1.0;
    }
}

/// H = alpha * chartist + (1 - alpha) * view, floored at the minimal tick.
[[nodiscard]] inline double forecast(const PrefixSeries& prices, double view_now, ForecastAction action,
                                     int horizon, double reflexivity, long t) {
    const double chart = chartist_estimate(prices, t, action.a0, forecast_window(horizon, action.a1));
    const double alpha = chartist_weight(reflexivity, action.a2);
    return std::max(alpha * chart + (1.0 - alpha) * view_now, kMinPrice);
}

/// Trailing window lengths for the long and short variance measures.
[[nodiscard]] constexpr long long_variance_window(int horizon) noexcept { return 3L * horizon; }
[[nodiscard]] constexpr long short_variance_window(int horizon) noexcept { return (horizon + 1) / 2; }

/// Mean of |P - B| / P over [from, to] computed directly.
[[nodiscard]] inline double mean_relative_gap(std::span<const double> prices, std::span<const double> view,
                                              long from, long to) {
    to = std::min<long>(to, static_cast<long>(prices.size()) - 1);
    from = std::clamp(from, 0L, to);
    double sum = 0.0;
    for (long u = from; u <= to; ++u) {
        const auto i = static_cast<std::size_t>(u);
        sum += std::abs(prices[i] - view[i]) / prices[i];
    }
    return sum / static_cast<double>(to - from + 1);
}

struct ForecastMemories {
    PercentileMemory long_variance;
    PercentileMemory short_variance;
    explicit ForecastMemories(std::size_t span = 1) : long_variance(span), short_variance(span) {}
};

struct ForecastObservation {
    ForecastState state;
    double long_variance_percentile = 0.5;
};

/// Records today's long and short price variances and bands them with the
/// mean price/view gap into the F state.
[[nodiscard]] inline ForecastObservation forecast_state(const PrefixSeries& prices, double mean_gap,
                                                        int horizon, long t, ForecastMemories& memories) {
    const double long_var = prices.variance(t - long_variance_window(horizon) + 1, t);
    const double short_var = prices.variance(t - short_variance_window(horizon) + 1, t);
    ForecastObservation obs;
    obs.long_variance_percentile = memories.long_variance.record_and_rank(long_var);
    obs.state.s0 = quartile_band(obs.long_variance_percentile);
    obs.state.s1 = quartile_band(memories.short_variance.record_and_rank(short_var));
    obs.state.s2 = gap_band(mean_gap);
    return obs;
}

// ---------------------------------------------------------------------------
// Trading (policy T)

struct TradeMemories {
    PercentileMemory falling;  // negative expected moves
    PercentileMemory rising;   // non-negative expected moves
    PercentileMemory volume;
    explicit TradeMemories(std::size_t span = 1) : falling(span), rising(span), volume(span) {}
};

struct PortfolioSnapshot {
    double bonds = 0.0;
    double initial_bonds = 0.0;
    double equity = 0.0;
    double initial_equity = 0.0;
};

[[nodiscard]] inline TradeState trade_state(double forecast_price, double price, double long_variance_percentile,
                                            const PortfolioSnapshot& portfolio, double volume,
                                            TradeMemories& memories) {
    TradeState s;
    const double mu = (forecast_price - price) / price;
    if (mu < 0.0) {
        s.s0 = memories.falling.record_and_rank(mu) >= 0.95 ? 1 : 0;
    } else {
        s.s0 = memories.rising.record_and_rank(mu) < 0.05 ? 1 : 2;
    }
    s.s1 = tercile_band(long_variance_percentile);
    s.s2 = portfolio.bonds < 0.6 * portfolio.initial_bonds ? 0 : 1;
    s.s3 = portfolio.equity < 0.6 * portfolio.initial_equity ? 0 : 1;
    const double volume_pct = memories.volume.record_and_rank(volume);
    s.s4 = volume <= 0.0 ? 0 : (volume_pct < 0.33 ? 1 : 2);
    return s;
}

[[nodiscard]] constexpr double bid_price(double forecast_price, double price, double concession, int a1) noexcept {
    const double base = std::min(forecast_price, price);
    return a1 == 0 ? base + concession : (a1 == 1 ? base : base - concession);
}

[[nodiscard]] constexpr double ask_price(double forecast_price, double price, double concession, int a1) noexcept {
    const double base = std::max(forecast_price, price);
    return a1 == 0 ? base - concession : (a1 == 1 ? base : base + concession);
}

struct OrderContext {
    double forecast_price = 0.0;  // H
    double price = 0.0;           // P(t)
    double spread = 0.0;          // last published spread W
    double gesture = 0.0;         // g
    double bonds = 0.0;
    std::int64_t holding = 0;
    int asset_count = 1;
    double fee_rate = 0.0;
};

/// Limit order implied by a T action, if any. Buy size follows
/// bonds / (ask-side reference price * J), additionally capped so the order
/// stays affordable at its own limit price including fees.
[[nodiscard]] inline std::optional<LimitOrder> make_order(const OrderContext& ctx, TradeAction action) {
    const double concession = ctx.gesture * ctx.spread;
    if (action.a0 == 1) return std::nullopt;
    if (action.a0 == 2) {
        const double bid = bid_price(ctx.forecast_price, ctx.price, concession, action.a1);
        const double reference = ask_price(ctx.forecast_price, ctx.price, concession, action.a1);
        if (bid <= 0.0 || reference <= 0.0 || ctx.bonds <= 0.0) return std::nullopt;
        const double budget = ctx.bonds / static_cast<double>(ctx.asset_count);
        const auto by_reference = static_cast<std::int64_t>(std::floor(budget / reference));
        const auto affordable = static_cast<std::int64_t>(std::floor(budget / (bid * (1.0 + ctx.fee_rate))));
        const std::int64_t qty = std::min(by_reference, affordable);
        if (qty < 1) return std::nullopt;
        return LimitOrder{0, 0, Side::Bid, bid, qty};
    }
    if (ctx.holding <= 0) return std::nullopt;
    const double ask = ask_price(ctx.forecast_price, ctx.price, concession, action.a1);
    if (ask <= 0.0) return std::nullopt;
    return LimitOrder{0, 0, Side::Ask, ask, ctx.holding};
}

/// Timing filter: records the policy's confidence in the current state and
/// lets an order through only when its percentile is below k / w.
[[nodiscard]] inline bool filter_gate(PercentileMemory& gate_memory, double current_max_prob,
                                      long steps_since_trade, int trading_window) {
    const double p = gate_memory.record_and_rank(current_max_prob);
    return p < static_cast<double>(steps_since_trade) / static_cast<double>(trading_window);
}

// ---------------------------------------------------------------------------
// Delayed credit and off-policy targets

enum class Algorithm : std::uint8_t { Forecast, Trade };

/// Credit awaiting evaluation at issued_at + tau.
struct PendingCredit {
    Algorithm algorithm = Algorithm::Forecast;
    int state_index = 0;
    int action_index = 0;
    long issued_at = 0;
    double forecast_price = 0.0;          // F: H at issue time
    std::int64_t cleared_quantity = 0;    // T: signed fill
    double cleared_price = 0.0;           // T: average fill price
    OrderContext context;                 // T: inputs of the order decision
};

/// F action whose forecast issued at `issued_at` lands closest to the realized
/// price; the lowest index wins ties.
[[nodiscard]] inline int best_forecast_action(const PrefixSeries& prices, double view_at_issue, int horizon,
                                              double reflexivity, long issued_at, double realized_price) {
    int best = 0;
    double best_err = 0.0;
    for (int i = 0; i < static_cast<int>(kForecastActions); ++i) {
        const double h = forecast(prices, view_at_issue, ForecastAction::from_index(i), horizon, reflexivity,
                                  issued_at);
        const double err = std::abs(h - realized_price);
        if (i == 0 || err < best_err) {
            best = i;
            best_err = err;
        }
    }
    return best;
}

/// Hypothetical cash flow of a T action: the implied order fills when it
/// crosses the realized clearing price, at the mid of its limit and that price.
[[nodiscard]] inline double hypothetical_cashflow(const OrderContext& ctx, TradeAction action,
                                                  double clearing_price, double price_now) {
    const auto order = make_order(ctx, action);
    if (!order) return 0.0;
    if (order->side == Side::Bid && order->price < clearing_price) return 0.0;
    if (order->side == Side::Ask && order->price > clearing_price) return 0.0;
    const double fill = 0.5 * (order->price + clearing_price);
    const std::int64_t q = order->side == Side::Bid ? order->quantity : -order->quantity;
    return cashflow_reward(q, fill, price_now);
}

[[nodiscard]] inline int best_trade_action(const OrderContext& ctx, double clearing_price, double price_now) {
    int best = 0;
    double best_cf = 0.0;
    for (int i = 0; i < static_cast<int>(kTradeActions); ++i) {
        const double cf = hypothetical_cashflow(ctx, TradeAction::from_index(i), clearing_price, price_now);
        if (i == 0 || cf > best_cf) {
            best = i;
            best_cf = cf;
        }
    }
    return best;
}

/// Off-policy corrections fire every floor(tau / T_m) + 2 steps.
[[nodiscard]] constexpr int off_policy_period(int horizon, int month_days) noexcept {
    return horizon / month_days + 2;
}

inline constexpr int kOffPolicyReward = 4;

/// Boosts, for the state stored in an F credit, the action hindsight shows was best.
inline int off_policy_correction(PolicyTable& policy, const PendingCredit& credit, const PrefixSeries& prices,
                                 double view_at_issue, int horizon, double reflexivity, double realized_price,
                                 double beta) {
    const int best = best_forecast_action(prices, view_at_issue, horizon, reflexivity, credit.issued_at,
                                          realized_price);
    update_policy(policy, static_cast<std::size_t>(credit.state_index), static_cast<std::size_t>(best),
                  kOffPolicyReward, beta);
    return best;
}

/// Same for a T credit: boosts the action with the best hypothetical cash flow.
inline int off_policy_correction(PolicyTable& policy, const PendingCredit& credit, double clearing_price,
                                 double price_now, double beta) {
    const int best = best_trade_action(credit.context, clearing_price, price_now);
    update_policy(policy, static_cast<std::size_t>(credit.state_index), static_cast<std::size_t>(best),
                  kOffPolicyReward, beta);
    return best;
}

}  // namespace cryptosim
