#include "xmatch/orders.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace xmatch {

std::uint64_t vol(std::span<const Order> orders) {
  std::uint64_t total = 0;
  for (const Order& w : orders) total += w.qty;
  return total;
}

std::uint64_t vol(const Matching& m) {
  std::uint64_t total = 0;
  for (const Transaction& t : m.transactions) total += t.qty;
  return total;
}

std::uint64_t qty_traded(const Order& w, const Matching& m) {
  std::uint64_t total = 0;
  for (const Transaction& t : m.transactions) {
    const std::uint64_t ref = w.side == Side::Bid ? t.bid_id : t.ask_id;
    if (ref == w.id) total += t.qty;
  }
  return total;
}

namespace {

void validate_side(const std::vector<Order>& orders, Side side) {
  std::unordered_set<std::uint64_t> timestamps;
  timestamps.reserve(orders.size());
  for (const Order& w : orders) {
    if (w.side != side) throw std::invalid_argument("order on the wrong side of the book");
    if (w.qty == 0) throw std::invalid_argument("order " + std::to_string(w.id) + " has qty 0");
    if (!timestamps.insert(w.timestamp).second) {
      throw std::invalid_argument("duplicate timestamp " + std::to_string(w.timestamp) +
                                  " within a side");
    }
  }
}

}  // namespace

OrderBook::OrderBook(std::vector<Order> bids, std::vector<Order> asks)
    : bids_(std::move(bids)), asks_(std::move(asks)) {
  validate_side(bids_, Side::Bid);
  validate_side(asks_, Side::Ask);
  std::unordered_set<std::uint64_t> ids;
  ids.reserve(bids_.size() + asks_.size());
  for (const std::vector<Order>* part : {&bids_, &asks_}) {
    for (const Order& w : *part) {
      if (!ids.insert(w.id).second)
        throw std::invalid_argument("duplicate order id " + std::to_string(w.id));
    }
  }
}

namespace {

bool same_rank(const Order& a, const Order& b) {
  return a.price == b.price && a.timestamp == b.timestamp;
}

bool contains_rank(std::span<const Order> orders, const Order& w) {
  return std::any_of(orders.begin(), orders.end(),
                     [&](const Order& x) { return same_rank(x, w); });
}

}  // namespace

std::pair<std::vector<Order>, std::vector<Order>> split(std::span<const Order> orders,
                                                        const Order& pivot) {
  if (!contains_rank(orders, pivot)) throw std::invalid_argument("split pivot not in order list");
  std::vector<Order> at_least, below;
  at_least.reserve(orders.size());
  for (const Order& x : orders) {
    if (more_competitive(pivot, x))
      below.push_back(x);
    else
      at_least.push_back(x);
  }
  return {std::move(at_least), std::move(below)};
}

QtyRange range_of(std::span<const Order> orders, const Order& w) {
  if (!contains_rank(orders, w)) throw std::invalid_argument("range_of order not in order list");
  std::uint64_t before = 0;  // volume strictly more competitive than w
  std::uint64_t at = 0;      // volume sharing w's rank (w itself, plus split copies)
  for (const Order& x : orders) {
    if (same_rank(x, w))
      at += x.qty;
    else if (more_competitive(x, w))
      before += x.qty;
  }
  return QtyRange{before + 1, before + at};
}

std::pair<OrderBook, DummyInfo> pad_with_dummy(const OrderBook& book) {
  const std::uint64_t bid_vol = vol(book.bids());
  const std::uint64_t ask_vol = vol(book.asks());
  if (bid_vol == ask_vol) return {book, DummyInfo{}};

  std::uint64_t max_id = 0;
  std::uint64_t max_ts = 0;
  for (const std::vector<Order>* part : {&book.bids(), &book.asks()}) {
    for (const Order& w : *part) {
      max_id = std::max(max_id, w.id);
      max_ts = std::max(max_ts, w.timestamp);
    }
  }

  Order dummy;
  dummy.id = max_id + 1;
  dummy.timestamp = max_ts + 1;
  std::vector<Order> bids = book.bids();
  std::vector<Order> asks = book.asks();
  if (ask_vol < bid_vol) {
    dummy.side = Side::Ask;
    dummy.price = Price::pos_inf();
    dummy.qty = bid_vol - ask_vol;
    asks.push_back(dummy);
  } else {
    dummy.side = Side::Bid;
    dummy.price = Price::neg_inf();
    dummy.qty = ask_vol - bid_vol;
    bids.push_back(dummy);
  }
  return {OrderBook(OrderBook::Unchecked{}, std::move(bids), std::move(asks)),
          DummyInfo{true, dummy}};
}

Matching strip_dummy(Matching m, const DummyInfo& dummy) {
  if (!dummy.added) return m;
  for (const Transaction& t : m.transactions) {
    if (t.bid_id == dummy.order.id || t.ask_id == dummy.order.id)
      throw std::logic_error("matching references the untradable dummy order");
  }
  return m;
}

}  // namespace xmatch
