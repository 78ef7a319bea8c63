#include "xmatch/io.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "xmatch/engine.hpp"

namespace xmatch {

namespace {

using nlohmann::json;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::uint64_t parse_nat(const std::string& s, const std::string& what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
}

Order order_from_fields(const std::vector<std::string>& f, std::size_t line_no) {
  if (f.size() != 5) fail_line(line_no, "expected 5 fields side,id,timestamp,price,qty");
  Order w;
  if (f[0] == "B")
    w.side = Side::Bid;
  else if (f[0] == "A")
    w.side = Side::Ask;
  else
    fail_line(line_no, "unknown side '" + f[0] + "'");
  w.id = parse_nat(f[1], "id", line_no);
  w.timestamp = parse_nat(f[2], "timestamp", line_no);
  w.price = Price::finite(parse_nat(f[3], "price", line_no));
  w.qty = parse_nat(f[4], "qty", line_no);
  if (w.qty == 0) fail_line(line_no, "qty must be at least 1");
  return w;
}

OrderBook book_from_orders(std::vector<Order> orders) {
  std::vector<Order> bids, asks;
  for (Order& w : orders) (w.side == Side::Bid ? bids : asks).push_back(w);
  return OrderBook(std::move(bids), std::move(asks));
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

FileFormat format_from_path(const std::string& path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? FileFormat::Json
                                                                     : FileFormat::Csv;
}

OrderBook parse_orders(std::istream& in, FileFormat format) {
  std::vector<Order> orders;
  if (format == FileFormat::Csv) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1) {
        if (line != "side,id,timestamp,price,qty")
          fail_line(1, "expected header side,id,timestamp,price,qty");
        continue;
      }
      orders.push_back(order_from_fields(split_fields(line), line_no));
    }
    if (line_no == 0) fail_line(1, "missing header row");
  } else {
    const json doc = json::parse(in);
    for (const json& o : doc) {
      Order w;
      const std::string side = o.at("side").get<std::string>();
      if (side == "B")
        w.side = Side::Bid;
      else if (side == "A")
        w.side = Side::Ask;
      else
        throw std::runtime_error("unknown side '" + side + "'");
      w.id = o.at("id").get<std::uint64_t>();
      w.timestamp = o.at("timestamp").get<std::uint64_t>();
      w.price = Price::finite(o.at("price").get<std::uint64_t>());
      w.qty = o.at("qty").get<std::uint64_t>();
      if (w.qty == 0) throw std::runtime_error("qty must be at least 1 (order " +
                                               std::to_string(w.id) + ")");
      orders.push_back(w);
    }
  }
  return book_from_orders(std::move(orders));
}

OrderBook parse_orders(const std::string& path, FileFormat format) {
  std::ifstream in = open_in(path);
  return parse_orders(in, format);
}

Matching read_matching(std::istream& in, FileFormat format) {
  Matching m;
  if (format == FileFormat::Csv) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1) {
        if (line != "bid_id,ask_id,qty,price")
          fail_line(1, "expected header bid_id,ask_id,qty,price");
        continue;
      }
      const auto f = split_fields(line);
      if (f.size() != 4) fail_line(line_no, "expected 4 fields bid_id,ask_id,qty,price");
      m.transactions.push_back(Transaction{
          parse_nat(f[0], "bid_id", line_no), parse_nat(f[1], "ask_id", line_no),
          parse_nat(f[2], "qty", line_no),
          Price::finite(parse_nat(f[3], "price", line_no))});
    }
    if (line_no == 0) fail_line(1, "missing header row");
  } else {
    const json doc = json::parse(in);
    for (const json& o : doc) {
      m.transactions.push_back(Transaction{
          o.at("bid_id").get<std::uint64_t>(), o.at("ask_id").get<std::uint64_t>(),
          o.at("qty").get<std::uint64_t>(),
          Price::finite(o.at("price").get<std::uint64_t>())});
    }
  }
  return m;
}

Matching read_matching(const std::string& path, FileFormat format) {
  std::ifstream in = open_in(path);
  return read_matching(in, format);
}

void write_matching(const Matching& m, std::ostream& out, FileFormat format) {
  if (format == FileFormat::Csv) {
    out << "bid_id,ask_id,qty,price\n";
    for (const Transaction& t : m.transactions) {
      out << t.bid_id << ',' << t.ask_id << ',' << t.qty << ',' << t.price.value() << '\n';
    }
  } else {
    json doc = json::array();
    for (const Transaction& t : m.transactions) {
      doc.push_back({{"bid_id", t.bid_id},
                     {"ask_id", t.ask_id},
                     {"qty", t.qty},
                     {"price", t.price.value()}});
    }
    out << doc.dump(2) << '\n';
  }
}

void write_matching(const Matching& m, const std::string& path, FileFormat format) {
  std::ofstream out = open_out(path);
  write_matching(m, out, format);
}

namespace {

// Rejection-sampled bounded draw; std::uniform_int_distribution is
// implementation-defined, which would break bit-identical generation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();  // full range
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % span;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return lo + r % span;
}

}  // namespace

OrderBook gen_instance(const InstanceSpec& spec) {
  if (spec.price_low > spec.price_high || spec.qty_low > spec.qty_high || spec.qty_low == 0)
    throw std::invalid_argument("malformed instance spec");
  std::mt19937_64 rng(spec.seed);
  std::vector<Order> bids(spec.n_bids), asks(spec.n_asks);
  for (std::size_t i = 0; i < spec.n_bids; ++i) {
    bids[i] = Order{i + 1, i + 1, Side::Bid,
                    Price::finite(bounded(rng, spec.price_low, spec.price_high)),
                    bounded(rng, spec.qty_low, spec.qty_high)};
  }
  for (std::size_t i = 0; i < spec.n_asks; ++i) {
    asks[i] = Order{spec.n_bids + i + 1, i + 1, Side::Ask,
                    Price::finite(bounded(rng, spec.price_low, spec.price_high)),
                    bounded(rng, spec.qty_low, spec.qty_high)};
  }
  return OrderBook(std::move(bids), std::move(asks));
}

std::vector<BenchRecord> run_bench(std::span<const std::size_t> sizes,
                                   const InstanceSpec& spec_template,
                                   std::span<const std::string> algorithms) {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, Matching (*)(const OrderBook&)>> known = {
      {"um_star", um_star},
      {"uniform_star", uniform_star},
      {"maximum_matching", maximum_matching},
  };
  std::vector<BenchRecord> records;
  for (const std::size_t n : sizes) {
    InstanceSpec spec = spec_template;
    spec.n_bids = n / 2;
    spec.n_asks = n - n / 2;
    spec.seed = spec_template.seed ^ static_cast<std::uint64_t>(n);
    const OrderBook book = gen_instance(spec);

    std::uint64_t um_volume = 0, uniform_volume = 0;
    bool saw_um = false, saw_uniform = false;
    for (const std::string& name : algorithms) {
      Matching (*fn)(const OrderBook&) = nullptr;
      for (const auto& [known_name, known_fn] : known) {
        if (known_name == name) fn = known_fn;
      }
      if (fn == nullptr) throw std::invalid_argument("unknown algorithm '" + name + "'");

      volatile std::uint64_t warmup = vol(fn(book));  // discard the first run
      (void)warmup;
      std::vector<double> times;
      std::uint64_t volume = 0;
      for (int run = 0; run < 3; ++run) {
        const auto start = Clock::now();
        const Matching m = fn(book);
        const auto stop = Clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        volume = vol(m);
      }
      std::sort(times.begin(), times.end());
      records.push_back(BenchRecord{name, n, times[1], volume});
      if (name == "um_star") {
        um_volume = volume;
        saw_um = true;
      } else if (name == "uniform_star") {
        uniform_volume = volume;
        saw_uniform = true;
      }
    }
    if (saw_um && saw_uniform && um_volume != uniform_volume)
      throw std::logic_error("uniform matcher volumes disagree at n=" + std::to_string(n));
  }
  return records;
}

void write_bench(std::span<const BenchRecord> records, std::ostream& out) {
  out << "algorithm,n,millis,volume\n";
  for (const BenchRecord& r : records) {
    out << r.algorithm << ',' << r.n << ',' << r.millis << ',' << r.volume << '\n';
  }
}

}  // namespace xmatch
