#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "xmatch/orders.hpp"
#include "xmatch/selection.hpp"

// Internal selection machinery shared with the matching engine. The hot
// loops run on packed 32-byte rank keys instead of whole Orders: flat swaps
// and a two-integer comparison with no side branches. rank_p ascends toward
// more competitive (bid prices are bit-flipped so higher price sorts first),
// rank_t breaks ties by earlier timestamp. qty is the working quantity and
// may be rewritten by callers that carve a boundary order into parts.
//
// Two payload variants keep the key at 32 bytes: the engine's key carries
// the order id and decodes prices from rank_p, so its loops never touch the
// source list; the permutation key carries the source position for the
// public API, which must rearrange the caller's Orders afterwards.
namespace xmatch::detail {

struct EngineKey {
  std::uint64_t rank_p;
  std::uint64_t rank_t;
  std::uint64_t qty;
  std::uint64_t id;
};

struct PermKey {
  std::uint64_t rank_p;
  std::uint64_t rank_t;
  std::uint64_t qty;
  std::uint32_t pos;
};

template <class Key>
inline bool key_less(const Key& a, const Key& b) {
  return a.rank_p != b.rank_p ? a.rank_p < b.rank_p : a.rank_t < b.rank_t;
}

// Inverses of the rank_p encoding in make_*_keys.
template <class Key>
inline Price bid_key_price(const Key& k) {
  constexpr std::uint64_t kMsb = std::uint64_t{1} << 63;
  return Price::from_ordinal(static_cast<std::int64_t>(~k.rank_p ^ kMsb));
}
template <class Key>
inline Price ask_key_price(const Key& k) {
  constexpr std::uint64_t kMsb = std::uint64_t{1} << 63;
  return Price::from_ordinal(static_cast<std::int64_t>(k.rank_p ^ kMsb));
}

// Equal-rank band [lt, gt) after an in-place partition, with the volume of
// the strictly-more-competitive prefix and of the band itself. The volumes
// are accumulated during the partition passes, so callers never rescan.
struct RankBand {
  std::size_t lt = 0;
  std::size_t gt = 0;
  std::uint64_t vol_less = 0;
  std::uint64_t vol_band = 0;
};

// Requires a same-side list (throws otherwise, mirroring more_competitive).
std::vector<EngineKey> make_engine_keys(std::span<const Order> orders);

// Key-level counterparts of partition_at_rank / partition_at_qty.
RankBand partition_keys_at_rank(std::span<EngineKey> keys, std::size_t t);
QtyCut partition_keys_at_qty(std::span<EngineKey> keys, std::uint64_t q);

}  // namespace xmatch::detail
