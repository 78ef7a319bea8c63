#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "testutil.hpp"
#include "xmatch/engine.hpp"
#include "xmatch/io.hpp"

using namespace xmatch;

TEST_CASE("parse_orders csv") {
  SUBCASE("header-only file is an empty book") {
    std::istringstream in("side,id,timestamp,price,qty\n");
    const OrderBook book = parse_orders(in, FileFormat::Csv);
    CHECK(book.bids().empty());
    CHECK(book.asks().empty());
  }
  SUBCASE("rows parse into orders") {
    std::istringstream in("side,id,timestamp,price,qty\nB,1,1,100,5\nA,2,1,90,3\n");
    const OrderBook book = parse_orders(in, FileFormat::Csv);
    REQUIRE(book.bids().size() == 1);
    REQUIRE(book.asks().size() == 1);
    CHECK(book.bids()[0].id == 1);
    CHECK(book.bids()[0].price == Price::finite(100));
    CHECK(book.bids()[0].qty == 5);
  }
  SUBCASE("rejections carry context") {
    std::istringstream dup("side,id,timestamp,price,qty\nB,1,1,100,5\nB,1,2,90,3\n");
    CHECK_THROWS_WITH_AS(parse_orders(dup, FileFormat::Csv), "duplicate order id 1",
                         std::invalid_argument);
    std::istringstream zero("side,id,timestamp,price,qty\nB,1,1,100,0\n");
    CHECK_THROWS_AS(parse_orders(zero, FileFormat::Csv), std::runtime_error);
    std::istringstream side("side,id,timestamp,price,qty\nX,1,1,100,1\n");
    CHECK_THROWS_AS(parse_orders(side, FileFormat::Csv), std::runtime_error);
    std::istringstream header("not,a,header\n");
    CHECK_THROWS_AS(parse_orders(header, FileFormat::Csv), std::runtime_error);
  }
}

TEST_CASE("parse_orders json") {
  std::istringstream in(R"([
    {"side": "B", "id": 1, "timestamp": 1, "price": 100, "qty": 5},
    {"side": "A", "id": 2, "timestamp": 1, "price": 90, "qty": 3}
  ])");
  const OrderBook book = parse_orders(in, FileFormat::Json);
  REQUIRE(book.bids().size() == 1);
  REQUIRE(book.asks().size() == 1);
  CHECK(book.asks()[0].price == Price::finite(90));
}

TEST_CASE("matching round-trips through both formats") {
  Matching m;
  m.transactions = {{1, 2, 3, Price::finite(7)}, {4, 5, 1, Price::finite(7)}};
  for (const FileFormat format : {FileFormat::Csv, FileFormat::Json}) {
    std::stringstream buf;
    write_matching(m, buf, format);
    const Matching back = read_matching(buf, format);
    CHECK(back.transactions == m.transactions);
  }

  std::stringstream empty;
  write_matching(Matching{}, empty, FileFormat::Csv);
  CHECK(empty.str() == "bid_id,ask_id,qty,price\n");
  CHECK(read_matching(empty, FileFormat::Csv).transactions.empty());
}

TEST_CASE("format_from_path") {
  CHECK(format_from_path("orders.json") == FileFormat::Json);
  CHECK(format_from_path("orders.csv") == FileFormat::Csv);
  CHECK(format_from_path("orders") == FileFormat::Csv);
}

TEST_CASE("gen_instance") {
  SUBCASE("empty spec gives an empty book") {
    const OrderBook book = gen_instance(InstanceSpec{});
    CHECK(book.bids().empty());
    CHECK(book.asks().empty());
  }
  SUBCASE("same seed, same book") {
    InstanceSpec spec{.n_bids = 50, .n_asks = 40, .price_high = 99, .qty_high = 7, .seed = 1234};
    const OrderBook a = gen_instance(spec);
    const OrderBook b = gen_instance(spec);
    REQUIRE(a.bids().size() == 50);
    REQUIRE(a.asks().size() == 40);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(a.bids()[i].price == b.bids()[i].price);
      CHECK(a.bids()[i].qty == b.bids()[i].qty);
    }
    spec.seed = 1235;
    const OrderBook c = gen_instance(spec);
    bool any_diff = false;
    for (std::size_t i = 0; i < 50; ++i) any_diff |= a.bids()[i].price != c.bids()[i].price;
    CHECK(any_diff);
  }
  SUBCASE("degenerate quantity range") {
    const OrderBook book =
        gen_instance(InstanceSpec{.n_bids = 10, .n_asks = 10, .qty_high = 1, .seed = 9});
    for (const std::vector<Order>* side : {&book.bids(), &book.asks()}) {
      for (const Order& w : *side) CHECK(w.qty == 1);
    }
  }
  SUBCASE("malformed spec is rejected") {
    CHECK_THROWS_AS(gen_instance(InstanceSpec{.price_low = 5, .price_high = 4}),
                    std::invalid_argument);
  }
}

TEST_CASE("run_bench records volumes that agree across uniform matchers") {
  CHECK(run_bench(std::vector<std::size_t>{}, InstanceSpec{}, std::vector<std::string>{"um_star"})
            .empty());

  const std::vector<std::size_t> sizes = {64, 128};
  const std::vector<std::string> algos = {"um_star", "uniform_star"};
  InstanceSpec spec{.price_high = 50, .qty_high = 10, .seed = 77};
  const auto records = run_bench(sizes, spec, algos);
  REQUIRE(records.size() == 4);
  CHECK(records[0].volume == records[1].volume);
  CHECK(records[2].volume == records[3].volume);

  std::ostringstream out;
  write_bench(records, out);
  CHECK(out.str().starts_with("algorithm,n,millis,volume\n"));

  CHECK_THROWS_AS(run_bench(sizes, spec, std::vector<std::string>{"bogus"}),
                  std::invalid_argument);
}

TEST_CASE("deterministic output bytes for a fixed input") {
  InstanceSpec spec{.n_bids = 30, .n_asks = 30, .price_high = 20, .qty_high = 5, .seed = 5};
  const OrderBook book = gen_instance(spec);
  std::ostringstream first, second;
  write_matching(uniform_star(book), first, FileFormat::Csv);
  write_matching(uniform_star(book), second, FileFormat::Csv);
  CHECK(first.str() == second.str());
}
