#pragma once

// The market loop: agents forecast and trade every asset each step, the
// order books clear, portfolios settle and accrue, learning credit is paid
// out tau steps after each decision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "cryptosim/agent_rl.hpp"
#include "cryptosim/config.hpp"
#include "cryptosim/fundamentals.hpp"
#include "cryptosim/market_history.hpp"
#include "cryptosim/order_book.hpp"
#include "cryptosim/policy.hpp"
#include "cryptosim/random.hpp"

namespace cryptosim {

enum class AgentMode : std::uint8_t { Learning, Noise };

inline constexpr double kInitialPrice = 100.0;
inline constexpr double kBondScale = 1e4;
inline constexpr double kHoldingScale = 100.0;

struct Portfolio {
    double bonds = 0.0;
    std::vector<std::int64_t> holdings;
    double initial_bonds = 0.0;
    double initial_equity_value = 0.0;
    double nav_peak = 0.0;  // trailing-year peak, refreshed each step
};

/// Per (agent, asset) learning state.
struct AssetLearner {
    ForecastMemories forecast_memories;
    TradeMemories trade_memories;
    PercentileMemory forecast_errors;
    PercentileMemory cashflows;
    PercentileMemory gate;
    std::vector<double> view;       // B(t)
    std::vector<double> gap_prefix; // prefix sums of |P - B| / P
    std::deque<PendingCredit> forecast_credits;
    std::deque<PendingCredit> trade_credits;
    long last_trade = 0;
    std::optional<long> entry_step;

    // Decision of the current step, attached to fills after clearing.
    int trade_state = 0;
    int trade_action = 0;
    OrderContext context;

    explicit AssetLearner(std::size_t span = 1)
        : forecast_memories(span), trade_memories(span), forecast_errors(span), cashflows(span), gate(span) {}
};

struct AgentState {
    int id = 0;
    AgentParams params;
    Portfolio portfolio;
    PolicyTable forecast_policy{kForecastStates, kForecastActions};
    PolicyTable trade_policy{kTradeStates, kTradeActions};
    std::vector<AssetLearner> assets;
    bool bankrupt = false;
    std::deque<std::pair<long, double>> nav_window;  // monotone queue for the trailing peak
};

struct SimOutput {
    MarketConfig config;
    std::uint64_t seed = 0;
    AgentMode mode = AgentMode::Learning;
    std::vector<std::vector<double>> prices;   // [asset][t]
    std::vector<std::vector<double>> volumes;  // [asset][t]
    std::vector<std::vector<double>> spreads;  // [asset][t]
    std::vector<std::vector<double>> equity;   // [agent][t], empty unless recorded
    std::vector<double> total_bonds;           // [t]
    std::vector<double> cumulative_fees;       // [t]
    std::vector<std::vector<std::int64_t>> total_holdings;  // [asset][t]
    std::vector<bool> bankrupt;                // final flags
    std::int64_t trade_count = 0;
    double fee_total = 0.0;
};

struct RunOptions {
    AgentMode mode = AgentMode::Learning;
    bool record_equity = true;
    JumpParams jumps{};
};

class Simulation {
public:
    explicit Simulation(const MarketConfig& cfg, RunOptions options = {})
        : cfg_(cfg), options_(options), rng_(derive_seed(cfg.master_seed, Stream::Market)) {
        validate(cfg_);
        init();
    }

    [[nodiscard]] long time() const noexcept { return t_; }
    [[nodiscard]] bool done() const noexcept { return t_ + 1 >= cfg_.horizon; }
    [[nodiscard]] const MarketConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const std::vector<AgentState>& agents() const noexcept { return agents_; }
    [[nodiscard]] const std::vector<FundamentalSeries>& fundamentals() const noexcept { return fundamentals_; }
    [[nodiscard]] const PrefixSeries& prices(int asset) const { return prices_[static_cast<std::size_t>(asset)]; }
    [[nodiscard]] const SimOutput& output() const noexcept { return out_; }
    [[nodiscard]] double cumulative_fees() const noexcept { return fees_; }

    [[nodiscard]] double nav(const AgentState& agent) const {
        return agent.portfolio.bonds + equity_value(agent);
    }

    [[nodiscard]] double equity_value(const AgentState& agent) const {
        double v = 0.0;
        for (int j = 0; j < cfg_.asset_count; ++j) {
            v += static_cast<double>(agent.portfolio.holdings[static_cast<std::size_t>(j)]) *
                 prices_[static_cast<std::size_t>(j)].back();
        }
        return v;
    }

    /// Advances one step: decisions at t, clearing, settlement, accrual -> t + 1.
    void step() {
        require(!done(), "step: simulation already reached its horizon");
        for (auto& book : books_) book.clear();

        std::shuffle(order_.begin(), order_.end(), rng_);
        for (int idx : order_) {
            auto& agent = agents_[static_cast<std::size_t>(idx)];
            if (agent.bankrupt) continue;
            for (int j = 0; j < cfg_.asset_count; ++j) act(agent, j);
        }

        std::vector<double> next_prices(static_cast<std::size_t>(cfg_.asset_count));
        for (int j = 0; j < cfg_.asset_count; ++j) {
            auto& book = books_[static_cast<std::size_t>(j)];
            sort_book_in_place(book);
            const auto& p = prices_[static_cast<std::size_t>(j)];
            ClearingResult res = clear_book(book, p.back());
            settle(j, res);
            next_prices[static_cast<std::size_t>(j)] = res.next_price;
            volumes_[static_cast<std::size_t>(j)].push_back(static_cast<double>(res.volume));
            spreads_[static_cast<std::size_t>(j)].push_back(res.spread);
        }
        for (int j = 0; j < cfg_.asset_count; ++j) prices_[static_cast<std::size_t>(j)].push_back(next_prices[static_cast<std::size_t>(j)]);
        ++t_;
        end_of_step();
    }

    SimOutput run() {
        while (!done()) step();
        return finish();
    }

    SimOutput finish() {
        for (int j = 0; j < cfg_.asset_count; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const auto pv = prices_[ju].values();
            out_.prices[ju].assign(pv.begin(), pv.end());
            out_.volumes[ju] = volumes_[ju];
            out_.spreads[ju] = spreads_[ju];
        }
        out_.bankrupt.clear();
        for (const auto& a : agents_) out_.bankrupt.push_back(a.bankrupt);
        out_.fee_total = fees_;
        return out_;
    }

private:
    void init() {
        const auto I = static_cast<std::size_t>(cfg_.agent_count);
        const auto J = static_cast<std::size_t>(cfg_.asset_count);
        const auto T = static_cast<std::size_t>(cfg_.horizon);

        fundamentals_.reserve(J);
        for (std::size_t j = 0; j < J; ++j) {
            fundamentals_.push_back(generate_fundamental(kInitialPrice, cfg_.horizon, options_.jumps,
                                                         derive_seed(cfg_.master_seed, Stream::Fundamental, j),
                                                         static_cast<int>(j)));
        }
        prices_.resize(J);
        volumes_.assign(J, {0.0});
        spreads_.assign(J, {0.0});
        books_.resize(J);
        for (std::size_t j = 0; j < J; ++j) {
            prices_[j].reserve(T);
            prices_[j].push_back(kInitialPrice);
            books_[j].asset_id = static_cast<int>(j);
        }

        Rng init_rng(derive_seed(cfg_.master_seed, Stream::AgentInit));
        agents_.resize(I);
        for (std::size_t i = 0; i < I; ++i) {
            auto& a = agents_[i];
            a.id = static_cast<int>(i);
            auto& p = a.params;
            p.horizon = uniform_int(init_rng, cfg_.week_days, 6 * cfg_.month_days);
            p.trading_window = uniform_int(init_rng, cfg_.week_days, p.horizon);
            p.memory_span = uniform_int(init_rng, cfg_.week_days, cfg_.horizon);
            a.portfolio.bonds = std::abs(normal(init_rng, 0.0, kBondScale));
            a.portfolio.holdings.resize(J);
            for (auto& q : a.portfolio.holdings) {
                q = static_cast<std::int64_t>(std::floor(std::abs(normal(init_rng, 0.0, kHoldingScale))));
            }
            p.gesture = cfg_.gesture_scalar * uniform(init_rng, 0.2, 0.8);
            p.reflexivity = uniform(init_rng, 0.0, 1.0);
            p.learning_rate = uniform(init_rng, 0.05, 0.20);
            p.drawdown_limit = std::clamp(uniform(init_rng, cfg_.drawdown_level - 5.0, cfg_.drawdown_level + 5.0),
                                          0.5, 100.0) / 100.0;

            a.portfolio.initial_bonds = a.portfolio.bonds;
            double eq = 0.0;
            for (auto q : a.portfolio.holdings) eq += static_cast<double>(q) * kInitialPrice;
            a.portfolio.initial_equity_value = eq;
            a.portfolio.nav_peak = a.portfolio.bonds + eq;
            a.nav_window.emplace_back(0, a.portfolio.nav_peak);

            const auto span = static_cast<std::size_t>(p.memory_span);
            a.assets.reserve(J);
            for (std::size_t j = 0; j < J; ++j) {
                AssetLearner learner(span);
                learner.view = cointegrate(fundamentals_[j], cfg_.cointegration_accuracy,
                                           derive_seed(cfg_.master_seed, Stream::View, i * J + j),
                                           static_cast<int>(i))
                                   .values;
                learner.gap_prefix.reserve(T + 1);
                learner.gap_prefix.push_back(0.0);
                a.assets.push_back(std::move(learner));
            }
        }
        order_.resize(I);
        std::iota(order_.begin(), order_.end(), 0);

        out_.config = cfg_;
        out_.seed = cfg_.master_seed;
        out_.mode = options_.mode;
        out_.prices.resize(J);
        out_.volumes.resize(J);
        out_.spreads.resize(J);
        out_.total_holdings.assign(J, {});
        if (options_.record_equity) out_.equity.assign(I, {});
        record_totals();
    }

    [[nodiscard]] bool learning() const noexcept { return options_.mode == AgentMode::Learning; }

    void act(AgentState& agent, int j) {
        const auto ju = static_cast<std::size_t>(j);
        auto& L = agent.assets[ju];
        const auto& prices = prices_[ju];
        const long t = t_;
        const double price = prices.back();
        const auto& params = agent.params;

        if (learning()) pay_credits(agent, L, j);

        const double view_now = L.view[static_cast<std::size_t>(t)];
        L.gap_prefix.push_back(L.gap_prefix.back() + std::abs(price - view_now) / price);
        const long gap_from = std::max(0L, t - 3L * params.horizon);
        const double mean_gap = (L.gap_prefix[static_cast<std::size_t>(t + 1)] -
                                 L.gap_prefix[static_cast<std::size_t>(gap_from)]) /
                                static_cast<double>(t - gap_from + 1);

        // Forecast.
        const auto obs = forecast_state(prices, mean_gap, params.horizon, t, L.forecast_memories);
        const int f_state = obs.state.index();
        const int f_action = learning()
                                 ? static_cast<int>(select_action(agent.forecast_policy, static_cast<std::size_t>(f_state), rng_))
                                 : uniform_int(rng_, 0, static_cast<int>(kForecastActions) - 1);
        const double H = forecast(prices, view_now, ForecastAction::from_index(f_action), params.horizon,
                                  params.reflexivity, t);
        if (learning()) {
            PendingCredit c;
            c.algorithm = Algorithm::Forecast;
            c.state_index = f_state;
            c.action_index = f_action;
            c.issued_at = t;
            c.forecast_price = H;
            L.forecast_credits.push_back(c);
        }

        // Trade.
        PortfolioSnapshot snap{agent.portfolio.bonds, agent.portfolio.initial_bonds, equity_value(agent),
                               agent.portfolio.initial_equity_value};
        const TradeState ts = trade_state(H, price, obs.long_variance_percentile, snap,
                                          volumes_[ju].back(), L.trade_memories);
        const int t_state = ts.index();
        int t_action = learning()
                           ? static_cast<int>(select_action(agent.trade_policy, static_cast<std::size_t>(t_state), rng_))
                           : uniform_int(rng_, 0, static_cast<int>(kTradeActions) - 1);

        const long since_trade = t - L.last_trade;
        const bool gate_open =
            learning() ? filter_gate(L.gate, agent.trade_policy.max_probability(static_cast<std::size_t>(t_state)),
                                     since_trade, params.trading_window)
                       : 0.5 < static_cast<double>(since_trade) / params.trading_window;

        const std::int64_t holding = agent.portfolio.holdings[ju];
        const bool exit_due = L.entry_step && holding > 0 && t - *L.entry_step >= params.horizon;
        if (exit_due) {
            t_action = TradeAction{0, TradeAction::from_index(t_action).a1}.index();
        } else if (!gate_open) {
            return;
        }

        OrderContext ctx{H, price, spreads_[ju].back(), params.gesture, agent.portfolio.bonds, holding,
                         cfg_.asset_count, cfg_.fee_rate};
        auto order = make_order(ctx, TradeAction::from_index(t_action));
        if (!order) return;
        order->agent_id = agent.id;
        order->asset_id = j;
        books_[ju].submit(*order);
        L.trade_state = t_state;
        L.trade_action = t_action;
        L.context = ctx;
    }

    void pay_credits(AgentState& agent, AssetLearner& L, int j) {
        const auto& prices = prices_[static_cast<std::size_t>(j)];
        const long t = t_;
        const double price = prices.back();
        const auto& params = agent.params;
        const double beta = params.learning_rate;
        const bool off_policy_turn = t % off_policy_period(params.horizon, cfg_.month_days) == 0;

        while (!L.forecast_credits.empty() && L.forecast_credits.front().issued_at + params.horizon <= t) {
            const PendingCredit c = L.forecast_credits.front();
            L.forecast_credits.pop_front();
            const double err = std::abs(c.forecast_price - price) / price;
            const int r = reward_from_percentile(L.forecast_errors.record_and_rank(err));
            update_policy(agent.forecast_policy, static_cast<std::size_t>(c.state_index),
                          static_cast<std::size_t>(c.action_index), r, beta);
            if (off_policy_turn) {
                off_policy_correction(agent.forecast_policy, c, prices,
                                      L.view[static_cast<std::size_t>(c.issued_at)], params.horizon,
                                      params.reflexivity, price, beta);
            }
        }
        while (!L.trade_credits.empty() && L.trade_credits.front().issued_at + params.horizon <= t) {
            const PendingCredit c = L.trade_credits.front();
            L.trade_credits.pop_front();
            const double cf = cashflow_reward(c.cleared_quantity, c.cleared_price, price);
            const int r = reward_from_cashflow_percentile(L.cashflows.record_and_rank(cf));
            update_policy(agent.trade_policy, static_cast<std::size_t>(c.state_index),
                          static_cast<std::size_t>(c.action_index), r, beta);
            if (off_policy_turn) {
                const double clearing = prices[static_cast<std::size_t>(c.issued_at + 1)];
                off_policy_correction(agent.trade_policy, c, clearing, price, beta);
            }
        }
    }

    void settle(int j, const ClearingResult& res) {
        const auto ju = static_cast<std::size_t>(j);
        const double b = cfg_.fee_rate;
        struct Fill {
            std::int64_t qty = 0;
            double notional = 0.0;
        };
        fills_.clear();
        for (const Trade& tr : res.trades) {
            auto& buyer = agents_[static_cast<std::size_t>(tr.buyer_id)];
            auto& seller = agents_[static_cast<std::size_t>(tr.seller_id)];
            const double notional = tr.price * static_cast<double>(tr.quantity);
            buyer.portfolio.bonds -= notional * (1.0 + b);
            seller.portfolio.bonds += notional * (1.0 - b);
            buyer.portfolio.holdings[ju] += tr.quantity;
            seller.portfolio.holdings[ju] -= tr.quantity;
            fees_ += 2.0 * b * notional;
            fills_.emplace_back(tr.buyer_id, tr.quantity, notional);
            fills_.emplace_back(tr.seller_id, -tr.quantity, notional);
            ++out_.trade_count;
        }
        std::stable_sort(fills_.begin(), fills_.end(),
                         [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
        for (std::size_t k = 0; k < fills_.size();) {
            const int id = std::get<0>(fills_[k]);
            Fill f;
            for (; k < fills_.size() && std::get<0>(fills_[k]) == id; ++k) {
                f.qty += std::get<1>(fills_[k]);
                f.notional += std::get<2>(fills_[k]);
            }
            record_fill(agents_[static_cast<std::size_t>(id)], j, f.qty, f.notional);
        }
    }

    void record_fill(AgentState& agent, int j, std::int64_t signed_qty, double notional) {
        const auto ju = static_cast<std::size_t>(j);
        auto& L = agent.assets[ju];
        const std::int64_t abs_qty = signed_qty < 0 ? -signed_qty : signed_qty;
        L.last_trade = t_;
        if (learning() && abs_qty > 0) {
            PendingCredit c;
            c.algorithm = Algorithm::Trade;
            c.state_index = L.trade_state;
            c.action_index = L.trade_action;
            c.issued_at = t_;
            c.cleared_quantity = signed_qty;
            c.cleared_price = notional / static_cast<double>(abs_qty);
            c.context = L.context;
            L.trade_credits.push_back(c);
        }
        const std::int64_t holding = agent.portfolio.holdings[ju];
        if (holding == 0) {
            L.entry_step.reset();
        } else if (signed_qty > 0 && !L.entry_step) {
            L.entry_step = t_;
        }
    }

    void end_of_step() {
        const double days = static_cast<double>(cfg_.year_days);
        const double rf = cfg_.risk_free_rate / days;
        const double stake = cfg_.staking_apr / days;
        for (auto& a : agents_) {
            const double eq = equity_value(a);
            a.portfolio.bonds = a.portfolio.bonds * (1.0 + rf) + stake * eq;
            const double v = a.portfolio.bonds + eq;

            while (!a.nav_window.empty() && a.nav_window.back().second <= v) a.nav_window.pop_back();
            a.nav_window.emplace_back(t_, v);
            while (a.nav_window.front().first <= t_ - cfg_.year_days) a.nav_window.pop_front();
            a.portfolio.nav_peak = a.nav_window.front().second;
            if (!a.bankrupt && a.portfolio.nav_peak > 0.0 &&
                1.0 - v / a.portfolio.nav_peak > a.params.drawdown_limit) {
                a.bankrupt = true;
            }
        }
        record_totals();
    }

    void record_totals() {
        double bonds = 0.0;
        for (const auto& a : agents_) bonds += a.portfolio.bonds;
        out_.total_bonds.push_back(bonds);
        out_.cumulative_fees.push_back(fees_);
        for (int j = 0; j < cfg_.asset_count; ++j) {
            std::int64_t q = 0;
            for (const auto& a : agents_) q += a.portfolio.holdings[static_cast<std::size_t>(j)];
            out_.total_holdings[static_cast<std::size_t>(j)].push_back(q);
        }
        if (options_.record_equity) {
            for (std::size_t i = 0; i < agents_.size(); ++i) out_.equity[i].push_back(nav(agents_[i]));
        }
    }

    MarketConfig cfg_;
    RunOptions options_;
    Rng rng_;
    long t_ = 0;
    std::vector<FundamentalSeries> fundamentals_;
    std::vector<PrefixSeries> prices_;
    std::vector<std::vector<double>> volumes_;
    std::vector<std::vector<double>> spreads_;
    std::vector<OrderBook> books_;
    std::vector<AgentState> agents_;
    std::vector<int> order_;
    std::vector<std::tuple<int, std::int64_t, double>> fills_;
    double fees_ = 0.0;
    SimOutput out_;
};

[[nodiscard]] inline SimOutput run(const MarketConfig& cfg, RunOptions options = {}) {
    return Simulation(cfg, options).run();
}

/// Same loop with zero-intelligence agents: uniform actions, no learning,
/// and a timing gate fixed at the neutral percentile.
[[nodiscard]] inline SimOutput run_noise_baseline(const MarketConfig& cfg, RunOptions options = {}) {
    options.mode = AgentMode::Noise;
    return Simulation(cfg, options).run();
}

}  // namespace cryptosim
