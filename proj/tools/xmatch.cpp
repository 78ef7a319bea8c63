#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xmatch/engine.hpp"
#include "xmatch/io.hpp"
#include "xmatch/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int run_match(const std::string& mode, const std::string& algo, const std::string& input,
              const std::string& output) {
  const xmatch::OrderBook book = xmatch::parse_orders(input, xmatch::format_from_path(input));
  xmatch::Matching m;
  if (mode == "uniform") {
    m = algo == "sort" ? xmatch::um_star(book) : xmatch::uniform_star(book);
  } else {
    m = xmatch::max_fair_matching(book);
  }
  xmatch::write_matching(m, output, xmatch::format_from_path(output));
  std::cout << "matched volume " << xmatch::vol(m) << " in " << m.transactions.size()
            << " transactions\n";
  return kExitPass;
}

int run_verify(const std::string& orders_path, const std::string& matching_path,
               const std::string& checks_csv) {
  const xmatch::OrderBook book =
      xmatch::parse_orders(orders_path, xmatch::format_from_path(orders_path));
  const xmatch::Matching m =
      xmatch::read_matching(matching_path, xmatch::format_from_path(matching_path));

  bool all_ok = true;
  auto show = [&](const xmatch::VerificationReport& report) {
    if (report.ok()) {
      std::cout << "check " << report.check << ": pass\n";
    } else {
      all_ok = false;
      std::cout << "check " << report.check << ": FAIL\n";
      for (const std::string& v : report.violations) std::cout << "  " << v << '\n';
    }
  };

  for (const std::string& check : split_list(checks_csv)) {
    if (check == "valid") {
      show(xmatch::check_valid(m, book));
    } else if (check == "fair") {
      show(xmatch::check_fair(m, book));
    } else if (check == "uniform") {
      show(xmatch::check_uniform(m));
    } else if (check == "bound") {
      xmatch::VerificationReport report{.check = "bound"};
      const std::uint64_t volume = xmatch::vol(m);
      for (const std::vector<xmatch::Order>* part : {&book.bids(), &book.asks()}) {
        for (const xmatch::Order& w : *part) {
          const std::uint64_t bound = xmatch::demand_supply_bound(book, w.price);
          if (volume > bound) {
            report.violations.push_back("volume " + std::to_string(volume) +
                                        " exceeds demand-supply bound " + std::to_string(bound) +
                                        " at price " + std::to_string(w.price.value()));
          }
        }
      }
      show(report);
    } else {
      std::cerr << "unknown check '" << check << "'\n";
      return kExitUsage;
    }
  }
  return all_ok ? kExitPass : kExitCheckFailed;
}

int run_bench_cmd(const std::string& sizes_csv, std::uint64_t seed, const std::string& algos_csv,
                  const std::string& out_path) {
  std::vector<std::size_t> sizes;
  for (const std::string& s : split_list(sizes_csv)) sizes.push_back(std::stoull(s));
  xmatch::InstanceSpec spec;
  spec.price_low = 1;
  spec.price_high = 1'000'000;
  spec.qty_low = 1;
  spec.qty_high = 100;
  spec.seed = seed;
  const auto records = xmatch::run_bench(sizes, spec, split_list(algos_csv));
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return kExitUsage;
  }
  xmatch::write_bench(records, out);
  xmatch::write_bench(records, std::cout);
  return kExitPass;
}

int run_distinct(const std::string& input) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << '\n';
    return kExitUsage;
  }
  std::vector<std::uint64_t> xs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) xs.push_back(std::stoull(line));
  }
  const bool distinct = xmatch::element_distinctness(xs);
  std::cout << (distinct ? "distinct" : "duplicate") << '\n';
  return distinct ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"call-auction matching engine"};
  app.require_subcommand(1);

  auto* match = app.add_subcommand("match", "match an order file");
  std::string mode = "uniform", algo = "linear", input, output;
  match->add_option("--mode", mode, "uniform|max")->check(CLI::IsMember({"uniform", "max"}));
  match->add_option("--algo", algo, "linear|sort (uniform mode only)")
      ->check(CLI::IsMember({"linear", "sort"}));
  match->add_option("--input", input, "orders file (.csv or .json)")->required();
  match->add_option("--output", output, "matching file (.csv or .json)")->required();

  auto* verify = app.add_subcommand("verify", "verify a matching against its order file");
  std::string orders_path, matching_path, checks = "valid,fair,uniform,bound";
  verify->add_option("--orders", orders_path)->required();
  verify->add_option("--matching", matching_path)->required();
  verify->add_option("--checks", checks, "comma list of valid,fair,uniform,bound");

  auto* bench = app.add_subcommand("bench", "time the matchers on generated instances");
  std::string sizes, algos = "um_star,uniform_star";
  std::uint64_t seed = 1;
  std::string bench_out = "bench.csv";
  bench->add_option("--sizes", sizes, "comma list of instance sizes")->required();
  bench->add_option("--seed", seed);
  bench->add_option("--algos", algos, "comma list of um_star,uniform_star,maximum_matching");
  bench->add_option("--out", bench_out);

  auto* distinct = app.add_subcommand("distinct", "element-distinctness via maximum matching");
  std::string distinct_input;
  distinct->add_option("--input", distinct_input, "one integer per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (match->parsed()) return run_match(mode, algo, input, output);
    if (verify->parsed()) return run_verify(orders_path, matching_path, checks);
    if (bench->parsed()) return run_bench_cmd(sizes, seed, algos, bench_out);
    if (distinct->parsed()) return run_distinct(distinct_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
