#pragma once

// Tabular stochastic policies updated by direct policy search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "cryptosim/errors.hpp"
#include "cryptosim/random.hpp"

namespace cryptosim {

/// states x actions matrix whose rows are probability distributions.
class PolicyTable {
public:
    PolicyTable() = default;
    PolicyTable(std::size_t states, std::size_t actions)
        : states_(states),
          actions_(actions),
          probs_(states * actions, actions == 0 ? 0.0 : 1.0 / static_cast<double>(actions)) {}

    [[nodiscard]] std::size_t state_count() const noexcept { return states_; }
    [[nodiscard]] std::size_t action_count() const noexcept { return actions_; }

    [[nodiscard]] std::span<double> row(std::size_t state) {
        return {probs_.data() + state * actions_, actions_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t state) const {
        return {probs_.data() + state * actions_, actions_};
    }
    [[nodiscard]] double operator()(std::size_t state, std::size_t action) const {
        return probs_[state * actions_ + action];
    }

    [[nodiscard]] double max_probability(std::size_t state) const {
        double best = 0.0;
        for (double p : row(state)) best = std::max(best, p);
        return best;
    }

    bool operator==(const PolicyTable&) const = default;

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> probs_;
};

inline constexpr std::size_t kForecastStates = 27;
inline constexpr std::size_t kForecastActions = 27;
inline constexpr std::size_t kTradeStates = 108;
inline constexpr std::size_t kTradeActions = 9;

namespace detail {
inline void renormalize(std::span<double> row) {
    double sum = 0.0;
    for (double& p : row) {
        p = std::max(p, 0.0);
        sum += p;
    }
    if (sum <= 0.0) {
        for (double& p : row) p = 1.0 / static_cast<double>(row.size());
        return;
    }
    for (double& p : row) p = std::min(p / sum, 1.0);
}
}  // namespace detail

/// Positive reward: |r| rounds of p* += beta (1 - p*), others shrink by beta p.
/// Negative reward: |r| rounds of demoting the taken action by beta p, the
/// removed mass redistributed over the other actions in proportion to theirs.
inline void update_policy(PolicyTable& policy, std::size_t state, std::size_t action, int reward,
                          double beta) {
    require(state < policy.state_count() && action < policy.action_count(),
            "update_policy: index out of range");
    require(beta > 0.0 && beta < 1.0, "update_policy: beta must lie in (0, 1)");
    auto row = policy.row(state);
    if (row.size() < 2) return;
    const int rounds = std::abs(reward);
    for (int k = 0; k < rounds; ++k) {
        if (reward > 0) {
            for (std::size_t a = 0; a < row.size(); ++a) {
                row[a] = a == action ? row[a] + beta * (1.0 - row[a]) : row[a] - beta * row[a];
            }
        } else {
            const double removed = beta * row[action];
            const double others = 1.0 - row[action];
            row[action] -= removed;
            for (std::size_t a = 0; a < row.size(); ++a) {
                if (a == action) continue;
                row[a] += others > 0.0 ? removed * row[a] / others
                                       : removed / static_cast<double>(row.size() - 1);
            }
        }
        detail::renormalize(row);
    }
}

/// Inverse-CDF draw from the state's row.
[[nodiscard]] inline std::size_t select_action(const PolicyTable& policy, std::size_t state, Rng& rng) {
    const auto row = policy.row(state);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
        cumulative += row[a];
        if (u < cumulative) return a;
    }
    for (std::size_t a = row.size(); a-- > 0;) {
        if (row[a] > 0.0) return a;
    }
    return row.size() - 1;
}

/// CSV rows: state_index,action_index,probability
inline void write_policy_csv(std::ostream& out, const PolicyTable& policy) {
    out << "state_index,action_index,probability\n";
    const auto old = out.precision(17);
    for (std::size_t s = 0; s < policy.state_count(); ++s) {
        for (std::size_t a = 0; a < policy.action_count(); ++a) {
            out << s << ',' << a << ',' << policy(s, a) << '\n';
        }
    }
    out.precision(old);
}

}  // namespace cryptosim
