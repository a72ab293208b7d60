#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace cryptosim {

/// Append-only series with prefix sums for O(1) window means and variances.
/// Window bounds are inclusive and clamped to the recorded range.
class PrefixSeries {
public:
    PrefixSeries() = default;
    explicit PrefixSeries(std::span<const double> values) {
        for (double v : values) push_back(v);
    }

    void reserve(std::size_t n) {
        values_.reserve(n);
        sum_.reserve(n + 1);
        sum_sq_.reserve(n + 1);
    }

    void push_back(double v) {
        // Offsetting by the first value keeps the squared sums well conditioned.
        if (values_.empty()) origin_ = v;
        const double d = v - origin_;
        values_.push_back(v);
        sum_.push_back(sum_.back() + d);
        sum_sq_.push_back(sum_sq_.back() + d * d);
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double back() const { return values_.back(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] double mean(long from, long to) const {
        clamp(from, to);
        const auto n = static_cast<double>(to - from + 1);
        return origin_ + (sum_[static_cast<std::size_t>(to + 1)] - sum_[static_cast<std::size_t>(from)]) / n;
    }

    /// Population variance over [from, to].
    [[nodiscard]] double variance(long from, long to) const {
        clamp(from, to);
        const auto n = static_cast<double>(to - from + 1);
        const double s = sum_[static_cast<std::size_t>(to + 1)] - sum_[static_cast<std::size_t>(from)];
        const double ss = sum_sq_[static_cast<std::size_t>(to + 1)] - sum_sq_[static_cast<std::size_t>(from)];
        const double m = s / n;
        return std::max(ss / n - m * m, 0.0);
    }

private:
    void clamp(long& from, long& to) const {
        const long last = static_cast<long>(values_.size()) - 1;
        to = std::clamp(to, 0L, last);
        from = std::clamp(from, 0L, to);
    }

    double origin_ = 0.0;
    std::vector<double> values_;
    std::vector<double> sum_{0.0};
    std::vector<double> sum_sq_{0.0};
};

}  // namespace cryptosim
