#include "xmatch/engine.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rank_keys.hpp"
#include "xmatch/selection.hpp"
#include "xmatch/verify.hpp"

namespace xmatch {

namespace {

bool by_competitiveness(const Order& a, const Order& b) { return more_competitive(a, b); }

std::unordered_map<std::uint64_t, Price> price_index(const std::vector<Order>& orders) {
  std::unordered_map<std::uint64_t, Price> index;
  index.reserve(orders.size());
  for (const Order& w : orders) index.emplace(w.id, w.price);
  return index;
}

}  // namespace

namespace {

// Greedy core shared by the public entry point and um_star. When bid_min is
// given it tracks the lowest matched bid limit, which lets the caller set
// the uniform price without any id lookups later.
Matching greedy_core(std::span<const Order> bids, std::span<const Order> asks, Matching m,
                     Price* bid_min) {
  std::size_t bi = 0, ai = 0;
  std::uint64_t bid_left = bids.empty() ? 0 : bids[0].qty;
  std::uint64_t ask_left = asks.empty() ? 0 : asks[0].qty;
  while (bi < bids.size() && ai < asks.size()) {
    const Order& b = bids[bi];
    const Order& a = asks[ai];
    if (b.price < a.price) break;
    if (bid_min != nullptr) *bid_min = std::min(*bid_min, b.price);
    const std::uint64_t q = std::min(bid_left, ask_left);
    m.transactions.push_back(Transaction{b.id, a.id, q, a.price});
    bid_left -= q;
    ask_left -= q;
    if (bid_left == 0 && ++bi < bids.size()) bid_left = bids[bi].qty;
    if (ask_left == 0 && ++ai < asks.size()) ask_left = asks[ai].qty;
  }
  return m;
}

// Both matchers emit transactions at the ask's limit and track the lowest
// matched bid limit, so the uniform price is just the highest transaction
// price, guarded against that bid minimum.
void finalize_uniform_price(Matching& m, Price bid_min) {
  if (m.transactions.empty()) return;
  Price p_star = Price::neg_inf();
  for (const Transaction& t : m.transactions) p_star = std::max(p_star, t.price);
  if (p_star > bid_min)
    throw std::logic_error("uniform price above a matched bid's limit: matcher bug");
  for (Transaction& t : m.transactions) t.price = p_star;
}

}  // namespace

Matching match_greedy(std::span<const Order> bids, std::span<const Order> asks, Matching m) {
  return greedy_core(bids, asks, std::move(m), nullptr);
}

void assign_uniform_price(Matching& m, const OrderBook& book) {
  if (m.transactions.empty()) return;
  const auto bid_price = price_index(book.bids());
  const auto ask_price = price_index(book.asks());
  Price p_star = Price::neg_inf();
  Price bid_min = Price::pos_inf();
  for (const Transaction& t : m.transactions) {
    p_star = std::max(p_star, ask_price.at(t.ask_id));
    bid_min = std::min(bid_min, bid_price.at(t.bid_id));
  }
  if (p_star > bid_min)
    throw std::logic_error("uniform price above a matched bid's limit: matcher bug");
  for (Transaction& t : m.transactions) t.price = p_star;
}

Matching um_star(const OrderBook& book) {
  auto [padded, dummy] = pad_with_dummy(book);
  std::vector<Order> bids = padded.bids();
  std::vector<Order> asks = padded.asks();
  std::sort(bids.begin(), bids.end(), by_competitiveness);
  std::sort(asks.begin(), asks.end(), by_competitiveness);
  Price bid_min = Price::pos_inf();
  Matching m = greedy_core(bids, asks, {}, &bid_min);
  finalize_uniform_price(m, bid_min);
  return strip_dummy(std::move(m), dummy);
}

Matching maximum_matching(const OrderBook& book) {
  std::vector<Order> bids = book.bids();
  std::vector<Order> asks = book.asks();
  std::sort(bids.begin(), bids.end(), by_competitiveness);
  // Asks by decreasing price, equal prices earlier-timestamp first.
  std::sort(asks.begin(), asks.end(), [](const Order& a, const Order& b) {
    if (a.price != b.price) return a.price > b.price;
    return a.timestamp < b.timestamp;
  });
  Matching m;
  std::size_t bi = 0, ai = 0;
  std::uint64_t bid_left = bids.empty() ? 0 : bids[0].qty;
  std::uint64_t ask_left = asks.empty() ? 0 : asks[0].qty;
  while (bi < bids.size() && ai < asks.size()) {
    if (bids[bi].price < asks[ai].price) {
      if (++ai < asks.size()) ask_left = asks[ai].qty;  // delete the topmost ask
      continue;
    }
    const std::uint64_t q = std::min(bid_left, ask_left);
    m.transactions.push_back(Transaction{bids[bi].id, asks[ai].id, q, asks[ai].price});
    bid_left -= q;
    ask_left -= q;
    if (bid_left == 0 && ++bi < bids.size()) bid_left = bids[bi].qty;
    if (ask_left == 0 && ++ai < asks.size()) ask_left = asks[ai].qty;
  }
  return m;
}

namespace {

// One refill pass. Keeps one side of every transaction, hands the other side
// out to `donors` (sorted most-competitive-first), splitting transactions
// where quantities misalign. Which donors trade (and how much) follows
// competitiveness order, so the pass is fair on the donor side. The pairing
// order differs: transactions arrive sorted by decreasing kept-side limit, and
// donors must be assigned in decreasing price so that the highest bid meets
// the highest ask (the canonical tradable pairing). For bids competitiveness
// already decreases by price; for asks it increases, so the fill prefix is
// reversed before assignment.
Matching refill_side(const Matching& m, std::span<const Order> donors, Side donor_side,
                     const std::unordered_map<std::uint64_t, Price>& kept_price,
                     bool uniform) {
  std::uint64_t volume = vol(m);
  std::vector<std::pair<Order, std::uint64_t>> fills;  // donor, traded qty
  for (const Order& w : donors) {
    if (volume == 0) break;
    const std::uint64_t q = std::min(volume, w.qty);
    fills.emplace_back(w, q);
    volume -= q;
  }
  if (donor_side == Side::Ask) std::reverse(fills.begin(), fills.end());

  Matching out;
  out.transactions.reserve(m.transactions.size());
  std::size_t di = 0;
  for (const Transaction& t : m.transactions) {
    std::uint64_t need = t.qty;
    while (need > 0) {
      const std::uint64_t q = std::min(need, fills[di].second);
      Transaction nt = t;
      nt.qty = q;
      if (donor_side == Side::Bid) {
        nt.bid_id = fills[di].first.id;
        if (!uniform) nt.price = kept_price.at(t.ask_id);  // ask limit stays valid
      } else {
        nt.ask_id = fills[di].first.id;
        if (!uniform) nt.price = fills[di].first.price;  // reprice at the new ask's limit
      }
      out.transactions.push_back(nt);
      need -= q;
      fills[di].second -= q;
      if (fills[di].second == 0) ++di;
    }
  }
  return out;
}

}  // namespace

Matching make_fair(const Matching& m, const OrderBook& book) {
  if (const VerificationReport r = check_valid(m, book); !r.ok())
    throw std::invalid_argument("make_fair: matching invalid over book: " + r.violations.front());
  if (m.transactions.empty()) return m;

  const bool uniform = check_uniform(m).ok();
  const auto bid_price = price_index(book.bids());
  const auto ask_price = price_index(book.asks());

  std::vector<Order> bids = book.bids();
  std::vector<Order> asks = book.asks();
  std::sort(bids.begin(), bids.end(), by_competitiveness);
  std::sort(asks.begin(), asks.end(), by_competitiveness);

  // Pass 1, fair on bids: highest-ask transactions get the best bids.
  Matching pass1 = m;
  std::sort(pass1.transactions.begin(), pass1.transactions.end(),
            [&](const Transaction& x, const Transaction& y) {
              return ask_price.at(x.ask_id) > ask_price.at(y.ask_id);
            });
  pass1 = refill_side(pass1, bids, Side::Bid, ask_price, uniform);

  // Pass 2, fair on asks: highest-bid transactions get the best asks.
  std::sort(pass1.transactions.begin(), pass1.transactions.end(),
            [&](const Transaction& x, const Transaction& y) {
              return bid_price.at(x.bid_id) > bid_price.at(y.bid_id);
            });
  Matching out = refill_side(pass1, asks, Side::Ask, bid_price, uniform);

  if (vol(out) != vol(m)) throw std::logic_error("make_fair changed the matched volume");
  return out;
}

Matching max_fair_matching(const OrderBook& book) {
  return make_fair(maximum_matching(book), book);
}

namespace {

using detail::EngineKey;

std::uint64_t key_vol(std::span<const EngineKey> keys) {
  std::uint64_t total = 0;
  for (const EngineKey& k : keys) total += k.qty;
  return total;
}

// match_greedy over rank-key halves whose volumes are equal and whose pairs
// are all tradable: the pass exhausts both spans regardless of internal
// order. Keys carry ids and price encodings, so no order list is touched.
Matching match_keys(std::span<const EngineKey> bid_keys, std::span<const EngineKey> ask_keys,
                    Matching m, Price& bid_min) {
  std::size_t bi = 0, ai = 0;
  std::uint64_t bid_left = bid_keys.empty() ? 0 : bid_keys[0].qty;
  std::uint64_t ask_left = ask_keys.empty() ? 0 : ask_keys[0].qty;
  while (bi < bid_keys.size() && ai < ask_keys.size()) {
    const EngineKey& b = bid_keys[bi];
    const EngineKey& a = ask_keys[ai];
    bid_min = std::min(bid_min, detail::bid_key_price(b));
    const std::uint64_t q = std::min(bid_left, ask_left);
    m.transactions.push_back(Transaction{b.id, a.id, q, detail::ask_key_price(a)});
    bid_left -= q;
    ask_left -= q;
    if (bid_left == 0 && ++bi < bid_keys.size()) bid_left = bid_keys[bi].qty;
    if (ask_left == 0 && ++ai < ask_keys.size()) ask_left = ask_keys[ai].qty;
  }
  return m;
}

}  // namespace

Matching uniform_star(const OrderBook& book) {
  // The bisection loop runs entirely on packed rank keys built straight from
  // the book; keys carry ids and price encodings, so the loop never touches
  // the order lists again. The volume-balancing dummy exists only as a
  // sentinel key whose rank decodes to the untradable infinity: it is the
  // strictly least competitive element of its side, so it can only ever
  // surface as an untradable median or boundary and is never matched. The
  // working lists shrink via [lo, hi) windows into the key buffers, so
  // discarding a half moves no data.
  std::vector<EngineKey> bid_buf = detail::make_engine_keys(book.bids());
  std::vector<EngineKey> ask_buf = detail::make_engine_keys(book.asks());
  const std::uint64_t bid_vol = key_vol(bid_buf);
  const std::uint64_t ask_vol = key_vol(ask_buf);
  if (bid_vol != ask_vol) {
    // An all-ones rank sorts last on either side (neg_inf bid / pos_inf ask).
    auto& light = bid_vol < ask_vol ? bid_buf : ask_buf;
    const std::uint64_t diff = bid_vol < ask_vol ? ask_vol - bid_vol : bid_vol - ask_vol;
    light.push_back(EngineKey{std::numeric_limits<std::uint64_t>::max(),
                              std::numeric_limits<std::uint64_t>::max(), diff, 0});
  }
  struct Window {
    std::size_t lo = 0, hi = 0;
    std::size_t size() const { return hi - lo; }
  };
  Window bids{0, bid_buf.size()}, asks{0, ask_buf.size()};
  auto view = [](std::vector<EngineKey>& buf, const Window& w) {
    return std::span<EngineKey>(buf.data() + w.lo, w.hi - w.lo);
  };
  Matching m;
  // Each transaction exhausts at least one key, and each tradable level adds
  // at most one straddling pair, so keys + levels bounds the count.
  m.transactions.reserve(bid_buf.size() + ask_buf.size() + 64);
  Price bid_min = Price::pos_inf();
  bool bisect_bids = true;
  while (bids.size() > 0 && asks.size() > 0) {
    if (bids.size() == 1 && asks.size() == 1 &&
        detail::ask_key_price(ask_buf[asks.lo]) > detail::bid_key_price(bid_buf[bids.lo]))
      break;
    auto& hav = bisect_bids ? bids : asks;  // the side halved by rank
    auto& car = bisect_bids ? asks : bids;  // the side carved by volume
    auto& hav_buf = bisect_bids ? bid_buf : ask_buf;
    auto& car_buf = bisect_bids ? ask_buf : bid_buf;
    const std::span<EngineKey> hav_keys = view(hav_buf, hav);
    const std::span<EngineKey> car_keys = view(car_buf, car);
    // Partition the halved side around its median rank in place; the prefix
    // up to the band end is the ⪰-half, the suffix the ≺-half. The partition
    // also reports the prefix volume, so nothing is rescanned.
    const detail::RankBand rb = detail::partition_keys_at_rank(hav_keys, (hav.size() + 1) / 2);
    const std::size_t cut = rb.gt;
    const Price median_price = bisect_bids ? detail::bid_key_price(hav_keys[cut - 1])
                                           : detail::ask_key_price(hav_keys[cut - 1]);
    const std::uint64_t v_hi = rb.vol_less + rb.vol_band;
    // Carve the other side at volume v_hi in place; the boundary's prefix
    // copy sheds the spill quantity so the prefix carries exactly v_hi.
    const QtyCut cc = detail::partition_keys_at_qty(car_keys, v_hi);
    const EngineKey boundary = car_keys[cc.band_lo];
    const Price boundary_price = bisect_bids ? detail::ask_key_price(boundary)
                                             : detail::bid_key_price(boundary);
    const std::uint64_t spill = cc.v_hi - v_hi;  // < boundary qty
    car_keys[cc.band_lo].qty -= spill;
    const Price bid_limit = bisect_bids ? median_price : boundary_price;
    const Price ask_limit = bisect_bids ? boundary_price : median_price;
    if (ask_limit <= bid_limit) {
      // Both halves carry equal volume and every pair is tradable, so the
      // greedy pass exhausts them.
      if (bisect_bids)
        m = match_keys(hav_keys.first(cut), car_keys.first(cc.band_hi), std::move(m), bid_min);
      else
        m = match_keys(car_keys.first(cc.band_hi), hav_keys.first(cut), std::move(m), bid_min);
      hav.lo += cut;
      std::size_t drop = cc.band_hi;
      if (spill > 0) {  // the spill copy survives on the kept side
        car_keys[--drop] = boundary;
        car_keys[drop].qty = spill;
      }
      car.lo += drop;
    } else {
      hav.hi = hav.lo + cut;
      car.hi = car.lo + cc.band_hi;
    }
    bisect_bids = !bisect_bids;
  }
  finalize_uniform_price(m, bid_min);
  return m;
}

}  // namespace xmatch
