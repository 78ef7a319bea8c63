#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xmatch/orders.hpp"

namespace xmatch {

struct VerificationReport {
  std::string check;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Matching-definition check: known ids, tradability, transaction price inside
// [ask limit, bid limit], per-order traded quantity within the order's qty.
VerificationReport check_valid(const Matching& m, const OrderBook& book);

// Price-time-priority check: once a partially traded or untraded order
// appears in competitiveness order, nothing less competitive may trade.
VerificationReport check_fair(const Matching& m, const OrderBook& book);

// All transaction prices equal; an empty matching passes.
VerificationReport check_uniform(const Matching& m);

// Vol(B_{>p}) + Vol(A_{<p}) + min(Vol(B_{=p}), Vol(A_{=p})): an upper bound
// on the volume of every matching over the book. p must be finite.
std::uint64_t demand_supply_bound(const OrderBook& book, Price p);

struct VolumeCertificate {
  std::uint64_t bound = 0;
  std::optional<Price> price;  // the minimizing candidate, when the book is non-empty
};

// Tightest demand-supply bound over the limit prices present in the book.
// Between consecutive distinct limit prices the bound is piecewise constant
// in the binding direction, so order prices suffice as candidates.
VolumeCertificate certified_upper_bound(const OrderBook& book);

// Ground truth for maximum volume at desk scale: unit-expands every order
// and runs Hopcroft-Karp on the bipartite tradability graph. Rejects books
// with more than 10^4 total units.
std::uint64_t oracle_max_volume(const OrderBook& book);

// Ground truth for the best uniform volume: max over candidate prices p of
// min(Vol(B_{>=p}), Vol(A_{<=p})).
std::uint64_t oracle_uniform_volume(const OrderBook& book);

// Element distinctness over the small domain [n] via two maximum-matching
// runs on unit-quantity books with prices {1..n} against {x_1..x_n}.
bool element_distinctness(std::span<const std::uint64_t> xs);

}  // namespace xmatch
