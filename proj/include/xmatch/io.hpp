#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "xmatch/orders.hpp"

namespace xmatch {

enum class FileFormat { Csv, Json };

// ".json" selects JSON, everything else CSV.
FileFormat format_from_path(const std::string& path);

// Orders file. CSV columns: side,id,timestamp,price,qty with side in {B, A}
// and a required header row; JSON is an array of objects with the same field
// names. Sentinel prices, qty 0, duplicate ids and duplicate per-side
// timestamps are rejected.
OrderBook parse_orders(const std::string& path, FileFormat format);
OrderBook parse_orders(std::istream& in, FileFormat format);

// Matching file. CSV columns: bid_id,ask_id,qty,price.
Matching read_matching(const std::string& path, FileFormat format);
Matching read_matching(std::istream& in, FileFormat format);
void write_matching(const Matching& m, const std::string& path, FileFormat format);
void write_matching(const Matching& m, std::ostream& out, FileFormat format);

struct InstanceSpec {
  std::size_t n_bids = 0;
  std::size_t n_asks = 0;
  std::uint64_t price_low = 1;
  std::uint64_t price_high = 100;
  std::uint64_t qty_low = 1;
  std::uint64_t qty_high = 10;
  std::uint64_t seed = 0;
};

// Uniform independent prices/quantities; ids are sequential with asks offset
// past the bids, timestamps 1..n per side. Same seed, same book, bit for bit.
OrderBook gen_instance(const InstanceSpec& spec);

struct BenchRecord {
  std::string algorithm;
  std::size_t n = 0;       // total orders
  double millis = 0.0;     // median of 3 timed runs, one warm-up discarded
  std::uint64_t volume = 0;
};

// algorithms may contain "um_star", "uniform_star", "maximum_matching".
// When both uniform matchers run on an instance their volumes must agree.
std::vector<BenchRecord> run_bench(std::span<const std::size_t> sizes,
                                   const InstanceSpec& spec_template,
                                   std::span<const std::string> algorithms);

void write_bench(std::span<const BenchRecord> records, std::ostream& out);

}  // namespace xmatch
