#pragma once

// Double-auction limit order book rebuilt every step: collect, sort, clear.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace cryptosim {

enum class Side : std::uint8_t { Bid, Ask };

struct LimitOrder {
    int agent_id = 0;
    int asset_id = 0;
    Side side = Side::Bid;
    double price = 0.0;
    std::int64_t quantity = 0;
};

struct OrderBook {
    int asset_id = 0;
    std::vector<LimitOrder> bids;
    std::vector<LimitOrder> asks;

    void submit(const LimitOrder& order) {
        (order.side == Side::Bid ? bids : asks).push_back(order);
    }
    [[nodiscard]] bool empty() const noexcept { return bids.empty() && asks.empty(); }
    void clear() noexcept {
        bids.clear();
        asks.clear();
    }
};

struct Trade {
    int buyer_id = 0;
    int seller_id = 0;
    double price = 0.0;
    std::int64_t quantity = 0;
    double bid_price = 0.0;  // limit prices of the matched pair
    double ask_price = 0.0;
};

struct ClearingResult {
    std::vector<Trade> trades;
    double next_price = 0.0;
    std::int64_t volume = 0;
    double spread = 0.0;
    OrderBook residual;  // unmatched remainder, still sorted
};

/// Bids by descending price, asks ascending; equal prices keep submission order.
inline void sort_book_in_place(OrderBook& book) {
    std::stable_sort(book.bids.begin(), book.bids.end(),
                     [](const LimitOrder& a, const LimitOrder& b) { return a.price > b.price; });
    std::stable_sort(book.asks.begin(), book.asks.end(),
                     [](const LimitOrder& a, const LimitOrder& b) { return a.price < b.price; });
}

[[nodiscard]] inline OrderBook sort_book(OrderBook book) {
    sort_book_in_place(book);
    return book;
}

/// |mean bid price - mean ask price|, or 0 when either side is empty.
[[nodiscard]] inline double compute_spread(const OrderBook& book) {
    if (book.bids.empty() || book.asks.empty()) return 0.0;
    double bid_sum = 0.0;
    for (const auto& o : book.bids) bid_sum += o.price;
    double ask_sum = 0.0;
    for (const auto& o : book.asks) ask_sum += o.price;
    return std::abs(bid_sum / static_cast<double>(book.bids.size()) -
                    ask_sum / static_cast<double>(book.asks.size()));
}

/// Price-time matching of a sorted book. Each match trades the smaller remaining
/// quantity at the mid of the two limit prices; the next market price is the mid
/// of the last matched pair, or prev_price when nothing crosses.
[[nodiscard]] inline ClearingResult clear_book(const OrderBook& book, double prev_price) {
    ClearingResult result;
    result.spread = compute_spread(book);
    result.next_price = prev_price;
    result.residual.asset_id = book.asset_id;

    std::size_t bi = 0;
    std::size_t ai = 0;
    std::int64_t bid_left = book.bids.empty() ? 0 : book.bids[0].quantity;
    std::int64_t ask_left = book.asks.empty() ? 0 : book.asks[0].quantity;

    while (bi < book.bids.size() && ai < book.asks.size()) {
        const LimitOrder& bid = book.bids[bi];
        const LimitOrder& ask = book.asks[ai];
        if (bid.price < ask.price) break;

        const std::int64_t qty = std::min(bid_left, ask_left);
        const double mid = 0.5 * (bid.price + ask.price);
        result.trades.push_back(Trade{bid.agent_id, ask.agent_id, mid, qty, bid.price, ask.price});
        result.volume += qty;
        result.next_price = mid;

        bid_left -= qty;
        ask_left -= qty;
        if (bid_left == 0 && ++bi < book.bids.size()) bid_left = book.bids[bi].quantity;
        if (ask_left == 0 && ++ai < book.asks.size()) ask_left = book.asks[ai].quantity;
    }

    auto& rb = result.residual.bids;
    auto& ra = result.residual.asks;
    if (bi < book.bids.size()) {
        rb.assign(book.bids.begin() + static_cast<std::ptrdiff_t>(bi), book.bids.end());
        rb.front().quantity = bid_left;
    }
    if (ai < book.asks.size()) {
        ra.assign(book.asks.begin() + static_cast<std::ptrdiff_t>(ai), book.asks.end());
        ra.front().quantity = ask_left;
    }
    return result;
}

}  // namespace cryptosim
