#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xmatch/orders.hpp"

namespace xmatch {

// Order of rank t (1-based, rank 1 = most competitive) under price-time
// priority. Deterministic median-of-medians pivoting, worst-case linear.
Order select_kth(std::span<const Order> orders, std::size_t t);

// In-place companion to select_kth: permutes `orders` so that everything
// before the returned band is strictly more competitive than the rank-t
// order and everything after is strictly less. Returns [first, last), the
// positions holding rank t's equivalence class (size 1 unless the list
// carries quantity-split copies of one order). Worst-case linear.
std::pair<std::size_t, std::size_t> partition_at_rank(std::vector<Order>& orders, std::size_t t);

// The unique order whose cumulative-quantity range contains q,
// 1 <= q <= vol(orders). Worst-case linear.
Order select_q(std::span<const Order> orders, std::uint64_t q);

struct QtyCut {
  std::size_t band_lo, band_hi;  // positions of the boundary order's copies
  std::uint64_t v_hi;            // vol(orders[0, band_hi)), >= q
};

// In-place companion to split_q: permutes `orders` so that the prefix
// [0, band_hi) holds exactly the orders at least as competitive as the
// boundary (the order whose cumulative-quantity range contains q, sitting at
// band_lo) and the suffix holds the rest. The caller carves quantity
// v_hi - q off the boundary to make the prefix volume exactly q.
// Worst-case linear.
QtyCut partition_at_qty(std::vector<Order>& orders, std::uint64_t q);

struct QtySplit {
  Order boundary;                       // the order whose range contains q
  std::vector<Order> more_competitive;  // volume exactly q
  std::vector<Order> less_competitive;  // the remainder
};

// Splits the list so the competitive part carries volume exactly q, breaking
// the boundary order into two quantity parts (same id/timestamp/price) when
// q falls strictly inside its range. Zero-quantity parts are never emitted.
QtySplit split_q(std::span<const Order> orders, std::uint64_t q);

// Running count of competitiveness comparisons made by the selection
// routines on this thread. Used by the empirical linearity tests.
std::uint64_t selection_comparisons();
void reset_selection_comparisons();

}  // namespace xmatch
