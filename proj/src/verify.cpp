#include "xmatch/verify.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "xmatch/engine.hpp"

namespace xmatch {

namespace {

std::unordered_map<std::uint64_t, const Order*> order_index(const std::vector<Order>& orders) {
  std::unordered_map<std::uint64_t, const Order*> index;
  index.reserve(orders.size());
  for (const Order& w : orders) index.emplace(w.id, &w);
  return index;
}

std::string describe(const Transaction& t) {
  return "transaction(bid " + std::to_string(t.bid_id) + ", ask " + std::to_string(t.ask_id) +
         ", qty " + std::to_string(t.qty) + ")";
}

}  // namespace

VerificationReport check_valid(const Matching& m, const OrderBook& book) {
  VerificationReport report;
  report.check = "valid";
  const auto bids = order_index(book.bids());
  const auto asks = order_index(book.asks());
  std::unordered_map<std::uint64_t, std::uint64_t> traded_bid, traded_ask;
  for (const Transaction& t : m.transactions) {
    const auto bit = bids.find(t.bid_id);
    const auto ait = asks.find(t.ask_id);
    if (bit == bids.end()) report.violations.push_back(describe(t) + ": unknown bid id");
    if (ait == asks.end()) report.violations.push_back(describe(t) + ": unknown ask id");
    if (t.qty == 0) report.violations.push_back(describe(t) + ": zero quantity");
    if (bit == bids.end() || ait == asks.end()) continue;
    const Order& b = *bit->second;
    const Order& a = *ait->second;
    if (b.price < a.price) report.violations.push_back(describe(t) + ": bid and ask not tradable");
    if (t.price < a.price || t.price > b.price)
      report.violations.push_back(describe(t) + ": price outside [ask limit, bid limit]");
    traded_bid[t.bid_id] += t.qty;
    traded_ask[t.ask_id] += t.qty;
  }
  for (const auto& [id, traded] : traded_bid) {
    if (traded > bids.at(id)->qty)
      report.violations.push_back("bid " + std::to_string(id) + " overtraded: " +
                                  std::to_string(traded) + " > " +
                                  std::to_string(bids.at(id)->qty));
  }
  for (const auto& [id, traded] : traded_ask) {
    if (traded > asks.at(id)->qty)
      report.violations.push_back("ask " + std::to_string(id) + " overtraded: " +
                                  std::to_string(traded) + " > " +
                                  std::to_string(asks.at(id)->qty));
  }
  return report;
}

namespace {

void scan_side_fairness(const std::vector<Order>& side_orders, Side side, const Matching& m,
                        const char* side_name, VerificationReport& report) {
  std::vector<Order> sorted = side_orders;
  std::sort(sorted.begin(), sorted.end(),
            [](const Order& a, const Order& b) { return more_competitive(a, b); });
  std::unordered_map<std::uint64_t, std::uint64_t> traded;
  traded.reserve(m.transactions.size());
  for (const Transaction& t : m.transactions) {
    traded[side == Side::Bid ? t.bid_id : t.ask_id] += t.qty;
  }
  bool saw_unfilled = false;
  std::uint64_t unfilled_id = 0;
  for (const Order& w : sorted) {
    const std::uint64_t q = traded.count(w.id) ? traded.at(w.id) : 0;
    if (saw_unfilled && q >= 1) {
      report.violations.push_back(std::string(side_name) + " " + std::to_string(w.id) +
                                  " traded while more competitive " + side_name + " " +
                                  std::to_string(unfilled_id) + " is not fully traded");
    }
    if (q < w.qty && !saw_unfilled) {
      saw_unfilled = true;
      unfilled_id = w.id;
    }
  }
}

}  // namespace

VerificationReport check_fair(const Matching& m, const OrderBook& book) {
  VerificationReport report;
  report.check = "fair";
  scan_side_fairness(book.bids(), Side::Bid, m, "bid", report);
  scan_side_fairness(book.asks(), Side::Ask, m, "ask", report);
  return report;
}

VerificationReport check_uniform(const Matching& m) {
  VerificationReport report;
  report.check = "uniform";
  for (const Transaction& t : m.transactions) {
    if (t.price != m.transactions.front().price) {
      report.violations.push_back(describe(t) + ": price differs from the first transaction's");
    }
  }
  return report;
}

std::uint64_t demand_supply_bound(const OrderBook& book, Price p) {
  if (!p.is_finite()) throw std::domain_error("demand_supply_bound needs a finite price");
  std::uint64_t bids_above = 0, bids_at = 0, asks_below = 0, asks_at = 0;
  for (const Order& b : book.bids()) {
    if (b.price > p)
      bids_above += b.qty;
    else if (b.price == p)
      bids_at += b.qty;
  }
  for (const Order& a : book.asks()) {
    if (a.price < p)
      asks_below += a.qty;
    else if (a.price == p)
      asks_at += a.qty;
  }
  return bids_above + asks_below + std::min(bids_at, asks_at);
}

VolumeCertificate certified_upper_bound(const OrderBook& book) {
  VolumeCertificate best;
  for (const std::vector<Order>* part : {&book.bids(), &book.asks()}) {
    for (const Order& w : *part) {
      const std::uint64_t bound = demand_supply_bound(book, w.price);
      if (!best.price || bound < best.bound) {
        best.bound = bound;
        best.price = w.price;
      }
    }
  }
  return best;
}

namespace {

constexpr std::uint64_t kOracleUnitGuard = 10'000;

// Hopcroft-Karp over unit-expanded orders. A bid unit is adjacent to the
// prefix of ask units (sorted by price) it can afford, so adjacency stays
// implicit.
std::size_t hopcroft_karp(const std::vector<std::uint64_t>& bid_prices,
                          std::vector<std::uint64_t> ask_prices) {
  std::sort(ask_prices.begin(), ask_prices.end());
  const std::size_t nl = bid_prices.size();
  const std::size_t nr = ask_prices.size();
  std::vector<std::size_t> reach(nl);  // bid unit u may match ask units [0, reach[u])
  for (std::size_t u = 0; u < nl; ++u) {
    reach[u] = static_cast<std::size_t>(
        std::upper_bound(ask_prices.begin(), ask_prices.end(), bid_prices[u]) -
        ask_prices.begin());
  }

  constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_l(nl, kUnmatched), match_r(nr, kUnmatched);
  std::vector<std::size_t> dist(nl);

  auto bfs = [&]() {
    std::deque<std::size_t> queue;
    bool found_free = false;
    for (std::size_t u = 0; u < nl; ++u) {
      if (match_l[u] == kUnmatched) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kUnmatched;
      }
    }
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < reach[u]; ++v) {
        const std::size_t w = match_r[v];
        if (w == kUnmatched) {
          found_free = true;
        } else if (dist[w] == kUnmatched) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return found_free;
  };

  std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
    for (std::size_t v = 0; v < reach[u]; ++v) {
      const std::size_t w = match_r[v];
      if (w == kUnmatched || (dist[w] == dist[u] + 1 && dfs(w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = kUnmatched;
    return false;
  };

  std::size_t matched = 0;
  while (bfs()) {
    for (std::size_t u = 0; u < nl; ++u) {
      if (match_l[u] == kUnmatched && dfs(u)) ++matched;
    }
  }
  return matched;
}

}  // namespace

std::uint64_t oracle_max_volume(const OrderBook& book) {
  if (vol(book.bids()) + vol(book.asks()) > kOracleUnitGuard)
    throw std::length_error("oracle_max_volume: book exceeds the unit-expansion guard");
  std::vector<std::uint64_t> bid_units, ask_units;
  for (const Order& b : book.bids()) bid_units.insert(bid_units.end(), b.qty, b.price.value());
  for (const Order& a : book.asks()) ask_units.insert(ask_units.end(), a.qty, a.price.value());
  return hopcroft_karp(bid_units, std::move(ask_units));
}

std::uint64_t oracle_uniform_volume(const OrderBook& book) {
  std::uint64_t best = 0;
  for (const std::vector<Order>* part : {&book.bids(), &book.asks()}) {
    for (const Order& w : *part) {
      const Price p = w.price;
      std::uint64_t demand = 0, supply = 0;
      for (const Order& b : book.bids())
        if (b.price >= p) demand += b.qty;
      for (const Order& a : book.asks())
        if (a.price <= p) supply += a.qty;
      best = std::max(best, std::min(demand, supply));
    }
  }
  return best;
}

bool element_distinctness(std::span<const std::uint64_t> xs) {
  const std::uint64_t n = xs.size();
  if (n == 0) throw std::domain_error("element_distinctness needs a non-empty input");
  for (const std::uint64_t x : xs) {
    if (x < 1 || x > n) throw std::domain_error("element outside [n]");
  }
  std::vector<Order> omega(n), lambda(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    omega[i] = Order{i + 1, i + 1, Side::Bid, Price::finite(i + 1), 1};
    lambda[i] = Order{n + i + 1, i + 1, Side::Ask, Price::finite(xs[i]), 1};
  }
  const Matching m1 = maximum_matching(OrderBook(omega, lambda));
  for (Order& w : omega) w.side = Side::Ask;
  for (Order& w : lambda) w.side = Side::Bid;
  const Matching m2 = maximum_matching(OrderBook(lambda, omega));
  return vol(m1) == n && vol(m2) == n;
}

}  // namespace xmatch
