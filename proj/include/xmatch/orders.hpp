#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace xmatch {

enum class Side : std::uint8_t { Bid, Ask };

// Extended price domain: the naturals plus two sentinels that only dummy
// orders carry. NEG_INF < n < POS_INF for every natural n, so ordinary
// comparison works across the whole domain and price 0 stays usable.
class Price {
 public:
  constexpr Price() = default;

  static constexpr Price finite(std::uint64_t v) {
    if (v > kMaxFinite) throw std::out_of_range("price exceeds finite range");
    return Price(static_cast<std::int64_t>(v));
  }
  static constexpr Price neg_inf() { return Price(std::numeric_limits<std::int64_t>::min()); }
  static constexpr Price pos_inf() { return Price(std::numeric_limits<std::int64_t>::max()); }

  constexpr bool is_finite() const {
    return rep_ != std::numeric_limits<std::int64_t>::min() &&
           rep_ != std::numeric_limits<std::int64_t>::max();
  }

  constexpr std::uint64_t value() const {
    if (!is_finite()) throw std::logic_error("value() on sentinel price");
    return static_cast<std::uint64_t>(rep_);
  }

  // Order-preserving integer encoding of the whole extended domain,
  // sentinels included. For radix-style comparisons in hot paths.
  constexpr std::int64_t ordinal() const { return rep_; }
  static constexpr Price from_ordinal(std::int64_t rep) { return Price(rep); }

  friend constexpr auto operator<=>(Price, Price) = default;

 private:
  explicit constexpr Price(std::int64_t rep) : rep_(rep) {}

  static constexpr std::uint64_t kMaxFinite =
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) - 1;

  std::int64_t rep_ = 0;
};

struct Order {
  std::uint64_t id = 0;
  std::uint64_t timestamp = 0;
  Side side = Side::Bid;
  Price price;
  std::uint64_t qty = 0;

  bool is_dummy() const { return !price.is_finite(); }
};

// Price-time priority. Bids: higher price wins; asks: lower price wins;
// equal prices fall back to the earlier timestamp. Strict total order per
// side as long as per-side timestamps are distinct. Inline: this is the hot
// comparison of every sort/selection pass.
inline bool more_competitive(const Order& w1, const Order& w2) {
  if (w1.side != w2.side) throw std::invalid_argument("competitiveness compares same-side orders");
  if (w1.price != w2.price) {
    return w1.side == Side::Bid ? w1.price > w2.price : w1.price < w2.price;
  }
  return w1.timestamp < w2.timestamp;
}

struct Transaction {
  std::uint64_t bid_id = 0;
  std::uint64_t ask_id = 0;
  std::uint64_t qty = 0;
  Price price;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Matching {
  std::vector<Transaction> transactions;
};

std::uint64_t vol(std::span<const Order> orders);
std::uint64_t vol(const Matching& m);

// Total quantity traded by order w across all transactions of m that
// reference w's id on w's side.
std::uint64_t qty_traded(const Order& w, const Matching& m);

struct DummyInfo;
class OrderBook;
std::pair<OrderBook, DummyInfo> pad_with_dummy(const OrderBook& book);

// Input instance. Construction enforces: sides consistent per list, qty >= 1,
// ids distinct across bids and asks, timestamps distinct within each side.
class OrderBook {
 public:
  OrderBook() = default;
  OrderBook(std::vector<Order> bids, std::vector<Order> asks);

  const std::vector<Order>& bids() const { return bids_; }
  const std::vector<Order>& asks() const { return asks_; }

 private:
  // Validation skipped: only pad_with_dummy may use this, and it extends an
  // already-validated book with a fresh id and timestamp.
  struct Unchecked {};
  OrderBook(Unchecked, std::vector<Order> bids, std::vector<Order> asks)
      : bids_(std::move(bids)), asks_(std::move(asks)) {}
  friend std::pair<OrderBook, DummyInfo> pad_with_dummy(const OrderBook& book);

  std::vector<Order> bids_;
  std::vector<Order> asks_;
};

// Partition of a same-side order list at pivot: first part holds everything
// at least as competitive as pivot, second part the rest. Linear time.
std::pair<std::vector<Order>, std::vector<Order>> split(std::span<const Order> orders,
                                                        const Order& pivot);

// Closed interval [first, last] of cumulative-quantity positions.
struct QtyRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;

  bool contains(std::uint64_t q) const { return first <= q && q <= last; }
  bool intersects(const QtyRange& o) const {
    return std::max(first, o.first) <= std::min(last, o.last);
  }
};

// Positions order w occupies in the competitiveness order of `orders`;
// across all members these intervals exactly cover [1, vol(orders)].
QtyRange range_of(std::span<const Order> orders, const Order& w);

struct DummyInfo {
  bool added = false;
  Order order;  // meaningful only when added
};

// Equalizes side volumes by appending one untradable sentinel-priced order
// on the lighter side. Dummy id/timestamp sit above every real one.
std::pair<OrderBook, DummyInfo> pad_with_dummy(const OrderBook& book);

// Dummy orders are untradable, so no transaction may reference them; a
// transaction carrying the dummy id indicates an engine bug.
Matching strip_dummy(Matching m, const DummyInfo& dummy);

}  // namespace xmatch
