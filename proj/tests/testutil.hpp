#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "xmatch/orders.hpp"

namespace xmatch::test {

inline Order bid(std::uint64_t id, std::uint64_t ts, std::uint64_t price, std::uint64_t qty) {
  return Order{id, ts, Side::Bid, Price::finite(price), qty};
}

inline Order ask(std::uint64_t id, std::uint64_t ts, std::uint64_t price, std::uint64_t qty) {
  return Order{id, ts, Side::Ask, Price::finite(price), qty};
}

inline std::vector<Order> sorted_by_competitiveness(std::vector<Order> orders) {
  std::sort(orders.begin(), orders.end(),
            [](const Order& a, const Order& b) { return more_competitive(a, b); });
  return orders;
}

struct BookParams {
  std::size_t max_per_side = 5;
  std::uint64_t max_price = 8;
  std::uint64_t max_qty = 3;
};

inline OrderBook random_book(std::mt19937_64& rng, const BookParams& params = {}) {
  auto draw = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
  const std::size_t n_bids = draw(0, params.max_per_side);
  const std::size_t n_asks = draw(0, params.max_per_side);
  std::vector<Order> bids, asks;
  for (std::size_t i = 0; i < n_bids; ++i)
    bids.push_back(bid(i + 1, i + 1, draw(1, params.max_price), draw(1, params.max_qty)));
  for (std::size_t i = 0; i < n_asks; ++i)
    asks.push_back(ask(n_bids + i + 1, i + 1, draw(1, params.max_price), draw(1, params.max_qty)));
  return OrderBook(std::move(bids), std::move(asks));
}

}  // namespace xmatch::test
