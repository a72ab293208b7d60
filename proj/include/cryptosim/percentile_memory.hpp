#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <vector>

namespace cryptosim {

/// Bounded sorted sample used for percentile ranking. Once full, the oldest
/// value by insertion time is evicted.
class PercentileMemory {
public:
    explicit PercentileMemory(std::size_t capacity = 1) : capacity_(std::max<std::size_t>(capacity, 1)) {}

    void record(double value) {
        if (sorted_.size() == capacity_) {
            const double oldest = arrival_.front();
            arrival_.pop_front();
            sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), oldest));
        }
        sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), value), value);
        arrival_.push_back(value);
    }

    /// Mid-rank percentile: (#below + #equal / 2) / n. 0.5 when empty.
    [[nodiscard]] double percentile_rank(double value) const {
        if (sorted_.empty()) return 0.5;
        const auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), value);
        const auto below = static_cast<double>(lo - sorted_.begin());
        const auto equal = static_cast<double>(hi - lo);
        return (below + 0.5 * equal) / static_cast<double>(sorted_.size());
    }

    double record_and_rank(double value) {
        record(value);
        return percentile_rank(value);
    }

    [[nodiscard]] std::size_t size() const noexcept { return sorted_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return sorted_.empty(); }
    [[nodiscard]] const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::size_t capacity_;
    std::vector<double> sorted_;
    std::deque<double> arrival_;
};

}  // namespace cryptosim
