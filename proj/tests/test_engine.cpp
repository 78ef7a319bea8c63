#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "testutil.hpp"
#include "xmatch/engine.hpp"
#include "xmatch/selection.hpp"
#include "xmatch/verify.hpp"

using namespace xmatch;
using test::ask;
using test::bid;

namespace {

std::map<std::uint64_t, std::uint64_t> traded_by_id(const OrderBook& book, const Matching& m) {
  std::map<std::uint64_t, std::uint64_t> traded;
  for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
    for (const Order& w : *side) traded[w.id] = qty_traded(w, m);
  }
  return traded;
}

// Random valid matching for fuzzing make_fair: repeatedly pick a random
// tradable pair with remaining capacity.
Matching random_matching(const OrderBook& book, std::mt19937_64& rng) {
  Matching m;
  std::map<std::uint64_t, std::uint64_t> left;
  for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
    for (const Order& w : *side) left[w.id] = w.qty;
  }
  for (int attempts = 0; attempts < 32; ++attempts) {
    std::vector<std::pair<const Order*, const Order*>> tradable;
    for (const Order& b : book.bids()) {
      for (const Order& a : book.asks()) {
        if (b.price >= a.price && left[b.id] > 0 && left[a.id] > 0) tradable.push_back({&b, &a});
      }
    }
    if (tradable.empty()) break;
    const auto [b, a] = tradable[rng() % tradable.size()];
    const std::uint64_t cap = std::min(left[b->id], left[a->id]);
    const std::uint64_t q = 1 + rng() % cap;
    // any price in [ask limit, bid limit]
    const std::uint64_t lo = a->price.value();
    const std::uint64_t hi = b->price.value();
    m.transactions.push_back(Transaction{b->id, a->id, q, Price::finite(lo + rng() % (hi - lo + 1))});
    left[b->id] -= q;
    left[a->id] -= q;
  }
  return m;
}

}  // namespace

TEST_CASE("match_greedy pinned traces") {
  SUBCASE("untradable top pair stops immediately") {
    const Matching m = match_greedy(std::vector<Order>{bid(1, 1, 10, 1)},
                                    std::vector<Order>{ask(2, 1, 12, 1)});
    CHECK(m.transactions.empty());
  }
  SUBCASE("single pair trades the min quantity at the ask limit") {
    const Matching m = match_greedy(std::vector<Order>{bid(1, 1, 10, 5)},
                                    std::vector<Order>{ask(2, 1, 8, 3)});
    REQUIRE(m.transactions.size() == 1);
    CHECK(m.transactions[0] == Transaction{1, 2, 3, Price::finite(8)});
  }
  SUBCASE("bid remainder carries to the next ask") {
    const std::vector<Order> bids = {bid(1, 1, 10, 2)};
    const std::vector<Order> asks = {ask(2, 1, 5, 1), ask(3, 2, 7, 2)};
    const Matching m = match_greedy(bids, asks);
    REQUIRE(m.transactions.size() == 2);
    CHECK(m.transactions[0] == Transaction{1, 2, 1, Price::finite(5)});
    CHECK(m.transactions[1] == Transaction{1, 3, 1, Price::finite(7)});
    CHECK(vol(m) == 2);
  }
  SUBCASE("appends to the given matching") {
    Matching seed;
    seed.transactions = {{9, 9, 9, Price::finite(1)}};
    const Matching m = match_greedy(std::vector<Order>{bid(1, 1, 10, 1)},
                                    std::vector<Order>{ask(2, 1, 8, 1)}, seed);
    REQUIRE(m.transactions.size() == 2);
    CHECK(m.transactions[0] == seed.transactions[0]);
  }
}

TEST_CASE("assign_uniform_price uses the highest matched ask limit") {
  const OrderBook book({bid(1, 1, 10, 3)}, {ask(2, 1, 5, 1), ask(3, 2, 7, 2)});
  Matching m;
  m.transactions = {{1, 2, 1, Price::finite(5)}, {1, 3, 2, Price::finite(7)}};
  assign_uniform_price(m, book);
  CHECK(m.transactions[0].price == Price::finite(7));
  CHECK(m.transactions[1].price == Price::finite(7));

  Matching empty;
  assign_uniform_price(empty, book);
  CHECK(empty.transactions.empty());

  const OrderBook tight({bid(1, 1, 9, 1)}, {ask(2, 1, 9, 1)});
  Matching single;
  single.transactions = {{1, 2, 1, Price::finite(9)}};
  assign_uniform_price(single, tight);
  CHECK(single.transactions[0].price == Price::finite(9));
}

TEST_CASE("um_star pinned examples") {
  CHECK(um_star(OrderBook{}).transactions.empty());

  const OrderBook book({bid(1, 1, 10, 2)}, {ask(2, 1, 5, 1), ask(3, 2, 7, 2)});
  const Matching m = um_star(book);
  CHECK(vol(m) == 2);
  for (const Transaction& t : m.transactions) CHECK(t.price == Price::finite(7));

  // best uniform volume is 1: the 10-5 pair, unlike the dynamic-price optimum of 2
  const OrderBook crossed({bid(1, 1, 10, 1), bid(2, 2, 6, 1)},
                          {ask(3, 1, 5, 1), ask(4, 2, 7, 1)});
  CHECK(vol(um_star(crossed)) == 1);
}

TEST_CASE("maximum_matching pinned examples") {
  const OrderBook crossed({bid(1, 1, 10, 1), bid(2, 2, 6, 1)},
                          {ask(3, 1, 5, 1), ask(4, 2, 7, 1)});
  CHECK(vol(maximum_matching(crossed)) == 2);

  const OrderBook partial({bid(1, 1, 4, 1), bid(2, 2, 3, 1)}, {ask(3, 1, 2, 1), ask(4, 2, 5, 1)});
  const Matching m = maximum_matching(partial);
  CHECK(vol(m) == 1);  // the 5-ask is deleted, 4 matches 2
  REQUIRE(m.transactions.size() == 1);
  CHECK(m.transactions[0].bid_id == 1);
  CHECK(m.transactions[0].ask_id == 3);

  const OrderBook blocked({bid(1, 1, 3, 2)}, {ask(2, 1, 9, 2)});
  CHECK(maximum_matching(blocked).transactions.empty());
}

TEST_CASE("make_fair pinned examples") {
  SUBCASE("timestamp priority moves the fill to the earlier bid") {
    const OrderBook book({bid(1, 2, 10, 1), bid(2, 1, 10, 1)}, {ask(3, 1, 5, 1)});
    Matching m;
    m.transactions = {{1, 3, 1, Price::finite(5)}};
    const Matching fair = make_fair(m, book);
    CHECK(vol(fair) == 1);
    REQUIRE(fair.transactions.size() == 1);
    CHECK(fair.transactions[0].bid_id == 2);
    CHECK(check_fair(fair, book).ok());
  }
  SUBCASE("already fair keeps per-order quantities") {
    const OrderBook book({bid(1, 1, 10, 2), bid(2, 2, 8, 1)}, {ask(3, 1, 5, 2), ask(4, 2, 6, 1)});
    const Matching m = um_star(book);
    const Matching fair = make_fair(m, book);
    CHECK(traded_by_id(book, fair) == traded_by_id(book, m));
  }
  SUBCASE("empty matching") {
    const OrderBook book({bid(1, 1, 10, 1)}, {ask(2, 1, 5, 1)});
    CHECK(make_fair(Matching{}, book).transactions.empty());
  }
  SUBCASE("invalid matching is rejected") {
    const OrderBook book({bid(1, 1, 10, 1)}, {ask(2, 1, 5, 1)});
    Matching bad;
    bad.transactions = {{1, 2, 5, Price::finite(5)}};  // overtrades both orders
    CHECK_THROWS_AS(make_fair(bad, book), std::invalid_argument);
  }
}

TEST_CASE("make_fair fuzz: fairness, validity, volume, uniformity") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 500; ++round) {
    const OrderBook book = test::random_book(rng);
    Matching m = random_matching(book, rng);
    if (rng() % 2 == 0 && !m.transactions.empty()) {
      // exercise the uniform-preservation path with a common feasible price
      Price lo = Price::neg_inf(), hi = Price::pos_inf();
      const auto by_id = traded_by_id(book, m);
      for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
        for (const Order& w : *side) {
          if (by_id.at(w.id) == 0) continue;
          if (w.side == Side::Bid)
            hi = std::min(hi, w.price);
          else
            lo = std::max(lo, w.price);
        }
      }
      if (lo <= hi) {
        for (Transaction& t : m.transactions) t.price = lo;
      }
    }
    const bool was_uniform = check_uniform(m).ok();
    const Matching fair = make_fair(m, book);
    CHECK(vol(fair) == vol(m));
    CHECK(check_valid(fair, book).ok());
    CHECK(check_fair(fair, book).ok());
    if (was_uniform) CHECK(check_uniform(fair).ok());
  }
}

TEST_CASE("max_fair_matching agrees with the max-flow oracle") {
  const OrderBook crossed({bid(1, 1, 10, 1), bid(2, 2, 6, 1)},
                          {ask(3, 1, 5, 1), ask(4, 2, 7, 1)});
  CHECK(vol(max_fair_matching(crossed)) == 2);
  CHECK(check_fair(max_fair_matching(crossed), crossed).ok());
  CHECK(max_fair_matching(OrderBook{}).transactions.empty());

  std::mt19937_64 rng(43);
  for (int round = 0; round < 300; ++round) {
    const OrderBook book = test::random_book(rng);
    const Matching m = max_fair_matching(book);
    CHECK(vol(m) == oracle_max_volume(book));
    CHECK(check_valid(m, book).ok());
    CHECK(check_fair(m, book).ok());
  }
}

TEST_CASE("uniform_star pinned examples") {
  CHECK(uniform_star(OrderBook{}).transactions.empty());

  const OrderBook book({bid(1, 1, 10, 2)}, {ask(2, 1, 5, 1), ask(3, 2, 7, 2)});
  const Matching m = uniform_star(book);
  const Matching opt = um_star(book);
  CHECK(traded_by_id(book, m) == traded_by_id(book, opt));
  CHECK(qty_traded(book.bids()[0], m) == 2);
  CHECK(qty_traded(book.asks()[0], m) == 1);
  CHECK(qty_traded(book.asks()[1], m) == 1);

  const OrderBook blockedSingles({bid(1, 1, 3, 1)}, {ask(2, 1, 9, 1)});
  CHECK(uniform_star(blockedSingles).transactions.empty());
}

TEST_CASE("uniform_star matches um_star per order on random books") {
  std::mt19937_64 rng(47);
  for (int round = 0; round < 2000; ++round) {
    const OrderBook book = test::random_book(rng, {.max_per_side = 12, .max_price = 20});
    const Matching fast = uniform_star(book);
    const Matching slow = um_star(book);
    CHECK(traded_by_id(book, fast) == traded_by_id(book, slow));
    CHECK(check_valid(fast, book).ok());
    CHECK(check_fair(fast, book).ok());
    CHECK(check_uniform(fast).ok());
    CHECK(check_uniform(slow).ok());
  }
}

TEST_CASE("volume ordering across the matchers") {
  std::mt19937_64 rng(53);
  for (int round = 0; round < 500; ++round) {
    const OrderBook book = test::random_book(rng);
    const std::uint64_t v_max = vol(maximum_matching(book));
    const std::uint64_t v_fair = vol(max_fair_matching(book));
    const std::uint64_t v_uniform = vol(uniform_star(book));
    CHECK(v_max == v_fair);
    CHECK(v_fair >= v_uniform);
    CHECK(v_uniform == vol(um_star(book)));
  }
}

TEST_CASE("demand-supply bound dominates every produced matching") {
  std::mt19937_64 rng(59);
  for (int round = 0; round < 300; ++round) {
    const OrderBook book = test::random_book(rng);
    for (const Matching& m :
         {maximum_matching(book), max_fair_matching(book), um_star(book), uniform_star(book)}) {
      for (std::uint64_t p = 0; p <= 10; ++p) {
        CHECK(vol(m) <= demand_supply_bound(book, Price::finite(p)));
      }
    }
  }
}

TEST_CASE("um_star transactions have intersecting bid/ask ranges") {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 300; ++round) {
    const OrderBook book = test::random_book(rng);
    const Matching m = um_star(book);
    std::map<std::uint64_t, const Order*> by_id;
    for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
      for (const Order& w : *side) by_id[w.id] = &w;
    }
    for (const Transaction& t : m.transactions) {
      const QtyRange rb = range_of(book.bids(), *by_id.at(t.bid_id));
      const QtyRange ra = range_of(book.asks(), *by_id.at(t.ask_id));
      CHECK(rb.intersects(ra));
    }
  }
}

TEST_CASE("um_star output splits at any fully traded bid") {
  std::mt19937_64 rng(67);
  int exercised = 0;
  for (int round = 0; round < 400; ++round) {
    const OrderBook book = test::random_book(rng);
    const Matching m = um_star(book);
    if (book.bids().empty()) continue;
    for (const Order& b_hat : book.bids()) {
      if (qty_traded(b_hat, m) != b_hat.qty) continue;
      const auto [b_hi, b_lo] = split(book.bids(), b_hat);
      const std::uint64_t q = vol(b_hi);
      if (q > vol(book.asks())) continue;
      const QtySplit aq = split_q(book.asks(), q);
      const Matching m1 = um_star(OrderBook(b_hi, aq.more_competitive));
      const Matching m2 = um_star(OrderBook(b_lo, aq.less_competitive));
      ++exercised;
      for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
        for (const Order& w : *side) {
          CHECK(qty_traded(w, m) == qty_traded(w, m1) + qty_traded(w, m2));
        }
      }
    }
  }
  CHECK(exercised > 100);
}
