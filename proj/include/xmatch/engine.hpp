#pragma once

#include <span>

#include "xmatch/orders.hpp"

namespace xmatch {

// Top-down greedy pass over lists sorted most-competitive-first. Stops at the
// first untradable top pair; transactions are priced at the ask's limit.
// Appends to m, never rewrites existing transactions.
Matching match_greedy(std::span<const Order> bids, std::span<const Order> asks, Matching m = {});

// Rewrites every transaction price to the maximum limit price among matched
// asks. Throws std::logic_error when that price exceeds a matched bid's
// limit, which would indicate a broken matcher, not bad input.
void assign_uniform_price(Matching& m, const OrderBook& book);

// Sort-based uniform matcher: pad, sort both sides by competitiveness,
// greedy match, uniform price. Maximum-volume uniform fair matching.
Matching um_star(const OrderBook& book);

// Maximum-volume matcher (dynamic prices, not necessarily fair): bids by
// competitiveness, asks by decreasing price; untradable top asks are deleted.
Matching maximum_matching(const OrderBook& book);

// Volume-preserving fairness transformation: refills the bid side from bids
// in competitiveness order against transactions sorted by decreasing ask
// limit, then symmetrically refills the ask side. Uniform in, uniform out.
Matching make_fair(const Matching& m, const OrderBook& book);

// make_fair(maximum_matching(book)): fair matching of maximum volume.
Matching max_fair_matching(const OrderBook& book);

// Linear-time uniform matcher: alternating bid/ask bisection with weighted
// selection instead of sorting. Per-order traded quantities equal um_star's.
Matching uniform_star(const OrderBook& book);

}  // namespace xmatch
