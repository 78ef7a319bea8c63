#include "xmatch/selection.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

#include "rank_keys.hpp"

namespace xmatch {

using detail::EngineKey;
using detail::PermKey;
using detail::RankBand;

namespace {

thread_local std::uint64_t g_comparisons = 0;

// "less" = more competitive, so rank 1 sorts to the front.
template <class Key>
inline bool counted_less(const Key& a, const Key& b) {
  ++g_comparisons;
  return detail::key_less(a, b);
}

// splitmix64; cheap and stateless enough for pivot sampling. Every public
// entry point reseeds so results are a pure function of the input, not of
// whatever ran earlier on this thread.
constexpr std::uint64_t kRngSeed = 0x9e3779b97f4a7c15ull;
thread_local std::uint64_t g_rng_state = kRngSeed;
inline void reseed_rng() { g_rng_state = kRngSeed; }
inline std::uint64_t next_rand() {
  std::uint64_t z = (g_rng_state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Rearranges `orders` into the permutation the keys ended up in.
void apply_permutation(std::vector<Order>& orders, const std::vector<PermKey>& keys) {
  thread_local std::vector<Order> scratch;
  scratch.resize(orders.size());
  for (std::size_t i = 0; i < keys.size(); ++i) scratch[i] = orders[keys[i].pos];
  orders.swap(scratch);
}

template <class Key>
void insertion_sort(std::span<Key> v, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo + 1; i < hi; ++i) {
    Key x = v[i];
    std::size_t j = i;
    while (j > lo && counted_less(x, v[j - 1])) {
      v[j] = v[j - 1];
      --j;
    }
    v[j] = x;
  }
}

// Index of the median of v[a..a+5) in six to seven comparisons, moving no
// data: the group pass of every forced selection level runs through here.
template <class Key>
std::size_t median5(std::span<const Key> v, std::size_t a) {
  std::size_t i0 = a, i1 = a + 1, i2 = a + 2, i3 = a + 3, i4 = a + 4;
  if (counted_less(v[i1], v[i0])) std::swap(i0, i1);
  if (counted_less(v[i3], v[i2])) std::swap(i2, i3);
  if (counted_less(v[i2], v[i0])) std::swap(i0, i2);  // i0 = min of first four
  if (counted_less(v[i3], v[i1])) std::swap(i1, i3);  // i3 = max of first four
  if (counted_less(v[i2], v[i1])) std::swap(i1, i2);  // i1 <= i2, median in {i1,i2,i4}
  if (counted_less(v[i4], v[i1])) return i1;
  return counted_less(v[i4], v[i2]) ? i4 : i2;
}

template <class Key>
std::size_t median3(std::span<const Key> v, std::size_t a, std::size_t b, std::size_t c) {
  if (counted_less(v[b], v[a])) std::swap(a, b);
  if (counted_less(v[c], v[b])) {
    b = c;
    if (counted_less(v[b], v[a])) b = a;
  }
  return b;
}

// Dutch-flag partition of [lo, hi) around pivot's rank, accumulating the
// volume of each class on the fly so callers never rescan the range.
// Returns the equal band [lt, gt) with vol_less = vol([lo, lt)).
template <class Key>
RankBand partition3(std::span<Key> v, std::size_t lo, std::size_t hi, const Key& pivot) {
  std::size_t lt = lo, i = lo, gt = hi;
  std::uint64_t vol_less = 0, vol_band = 0;
  while (i < gt) {
    if (counted_less(v[i], pivot)) {
      vol_less += v[i].qty;
      std::swap(v[i++], v[lt++]);
    } else if (counted_less(pivot, v[i])) {
      std::swap(v[i], v[--gt]);
    } else {
      vol_band += v[i].qty;
      ++i;
    }
  }
  return {lt, gt, vol_less, vol_band};
}

// k is 0-based within v. Hybrid selection: a sampled median-of-three pivot
// (ninther on large ranges) by default, with a BFPRT medians-of-fives pivot
// forced after any level that failed to shed at least 1/8 of its range. A
// forced level shrinks the range geometrically, so pairing each bad cheap
// level with one BFPRT level keeps the worst case linear while the common
// case skips the group pass entirely. The shrinking keeps every discarded
// segment on the correct side of the eventual answer, so on return the whole
// span is partitioned around rank k's equivalence class; the returned
// volumes cover the strictly-less prefix and the band, accumulated from the
// partition passes (no rescans).
template <class Key>
RankBand select_band(std::span<Key> v, std::size_t k) {
  std::size_t lo = 0, hi = v.size();
  std::uint64_t vol_before = 0;  // vol([0, lo)): every segment shed leftward
  bool force_mom = false;
  for (;;) {
    const std::size_t n = hi - lo;
    if (n <= 10) {
      insertion_sort(v, lo, hi);
      std::size_t lt = lo + k, gt = lo + k + 1;
      while (lt > lo && !counted_less(v[lt - 1], v[lo + k])) --lt;
      while (gt < hi && !counted_less(v[lo + k], v[gt])) ++gt;
      std::uint64_t vol_less = vol_before, vol_band = 0;
      for (std::size_t i = lo; i < lt; ++i) vol_less += v[i].qty;
      for (std::size_t i = lt; i < gt; ++i) vol_band += v[i].qty;
      return {lt, gt, vol_less, vol_band};
    }
    Key pivot;
    if (force_mom) {
      std::size_t medians = 0;
      for (std::size_t g = lo; g + 5 <= hi; g += 5) {
        std::swap(v[lo + medians], v[median5(std::span<const Key>(v), g)]);
        ++medians;
      }
      if (const std::size_t tail = n % 5; tail > 0) {
        insertion_sort(v, hi - tail, hi);
        std::swap(v[lo + medians], v[hi - tail + tail / 2]);
        ++medians;
      }
      std::span<Key> sub = v.subspan(lo, medians);
      pivot = sub[select_band(sub, medians / 2).lt];
    } else {
      auto probe = [&] { return lo + next_rand() % n; };
      std::span<const Key> cv(v);
      if (n > 8192) {
        // Floyd-Rivest style: the k/n quantile of a random sample lands the
        // pivot within a few percent of rank k, so one partition pass leaves
        // only a sliver of the range to recurse on.
        constexpr std::size_t kSample = 512;
        std::array<Key, kSample> sample;
        for (Key& s : sample) s = v[probe()];
        const std::size_t target = k * (kSample - 1) / n;
        std::nth_element(sample.begin(), sample.begin() + target, sample.end(),
                         [](const Key& a, const Key& b) { return counted_less(a, b); });
        pivot = sample[target];
      } else if (n > 2048) {
        const std::size_t a = median3(cv, probe(), probe(), probe());
        const std::size_t b = median3(cv, probe(), probe(), probe());
        const std::size_t c = median3(cv, probe(), probe(), probe());
        pivot = v[median3(cv, a, b, c)];
      } else {
        pivot = v[median3(cv, probe(), probe(), probe())];
      }
    }
    const RankBand part = partition3(v, lo, hi, pivot);
    if (k < part.lt - lo) {
      hi = part.lt;
    } else if (k < part.gt - lo) {
      return {part.lt, part.gt, vol_before + part.vol_less, part.vol_band};
    } else {
      k -= part.gt - lo;
      lo = part.gt;
      vol_before += part.vol_less + part.vol_band;
    }
    force_mom = (hi - lo) * 8 > n * 7;
  }
}

// Volume counterpart of select_band, with the invariant
// v_left < q <= v_left + vol([lo, hi)). Each level partitions around a pivot
// aimed at the volume quantile of a random sample, so the expected survivor
// is a sliver; a count-median pivot is forced after any level that failed to
// shed 1/8 of its range, which keeps the worst case linear exactly as in
// select_band. When the volume point lands inside an equal-rank band, whole
// band members are shed from the prefix tail until the remainder fits inside
// one boundary element (equal ranks make either side of the cut valid).
template <class Key>
QtyCut locate_q(std::span<Key> keys, std::uint64_t q) {
  std::size_t lo = 0, hi = keys.size();
  std::uint64_t v_left = 0;  // vol(keys[0, lo)), always < q
  bool force_median = false;
  for (;;) {
    const std::size_t n = hi - lo;
    if (n == 1) return {lo, hi, v_left + keys[lo].qty};
    Key pivot;
    if (force_median) {
      std::span<Key> sub = keys.subspan(lo, n);
      pivot = sub[select_band(sub, (n - 1) / 2).lt];
    } else if (n > 8192) {
      constexpr std::size_t kSample = 512;
      std::array<Key, kSample> sample;
      std::uint64_t sample_vol = 0;
      for (Key& s : sample) {
        s = keys[lo + next_rand() % n];
        sample_vol += s.qty;
      }
      std::sort(sample.begin(), sample.end(),
                [](const Key& a, const Key& b) { return counted_less(a, b); });
      // vol([lo, hi)) ~ n * sample_vol / kSample, so the volume point
      // q - v_left maps to sample volume (q - v_left) * kSample / n.
      const std::uint64_t target =
          std::min((q - v_left) * kSample / n, sample_vol - 1);
      std::uint64_t acc = 0;
      std::size_t pick = 0;
      while (pick + 1 < kSample && acc + sample[pick].qty <= target) acc += sample[pick++].qty;
      pivot = sample[pick];
    } else {
      auto probe = [&] { return lo + next_rand() % n; };
      pivot = keys[median3(std::span<const Key>(keys), probe(), probe(), probe())];
    }
    const RankBand part = partition3(keys, lo, hi, pivot);
    const std::uint64_t v_lt = v_left + part.vol_less;
    const std::uint64_t v_gt = v_lt + part.vol_band;
    if (q <= v_lt) {
      hi = part.lt;
    } else if (q > v_gt) {
      v_left = v_gt;
      lo = part.gt;
    } else {
      std::size_t j = part.gt;
      std::uint64_t shed = 0;
      while (j > part.lt && shed + keys[j - 1].qty <= v_gt - q) shed += keys[--j].qty;
      return {j - 1, j, v_gt - shed};
    }
    force_median = (hi - lo) * 8 > n * 7;
  }
}

template <class Key>
std::vector<Key> make_keys(std::span<const Order> orders) {
  reseed_rng();  // every public path starts here; see kRngSeed
  constexpr std::uint64_t kMsb = std::uint64_t{1} << 63;
  std::vector<Key> keys(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i].side != orders[0].side)
      throw std::invalid_argument("competitiveness compares same-side orders");
    // Signed ordinal to unsigned ascending; complement flips bids descending.
    const std::uint64_t u = static_cast<std::uint64_t>(orders[i].price.ordinal()) ^ kMsb;
    keys[i].rank_p = orders[i].side == Side::Bid ? ~u : u;
    keys[i].rank_t = orders[i].timestamp;
    keys[i].qty = orders[i].qty;
    if constexpr (std::is_same_v<Key, EngineKey>)
      keys[i].id = orders[i].id;
    else
      keys[i].pos = static_cast<std::uint32_t>(i);
  }
  return keys;
}

}  // namespace

namespace detail {

std::vector<EngineKey> make_engine_keys(std::span<const Order> orders) {
  return make_keys<EngineKey>(orders);
}

RankBand partition_keys_at_rank(std::span<EngineKey> keys, std::size_t t) {
  return select_band(keys, t - 1);
}

QtyCut partition_keys_at_qty(std::span<EngineKey> keys, std::uint64_t q) {
  return locate_q(keys, q);
}

}  // namespace detail

Order select_kth(std::span<const Order> orders, std::size_t t) {
  if (t < 1 || t > orders.size()) throw std::out_of_range("select_kth rank out of range");
  std::vector<PermKey> keys = make_keys<PermKey>(orders);
  return orders[keys[select_band(std::span<PermKey>(keys), t - 1).lt].pos];
}

std::pair<std::size_t, std::size_t> partition_at_rank(std::vector<Order>& orders, std::size_t t) {
  if (t < 1 || t > orders.size()) throw std::out_of_range("partition_at_rank rank out of range");
  std::vector<PermKey> keys = make_keys<PermKey>(orders);
  const RankBand band = select_band(std::span<PermKey>(keys), t - 1);
  apply_permutation(orders, keys);
  return {band.lt, band.gt};
}

QtyCut partition_at_qty(std::vector<Order>& orders, std::uint64_t q) {
  if (q < 1 || q > vol(orders)) throw std::out_of_range("partition_at_qty quantity out of range");
  std::vector<PermKey> keys = make_keys<PermKey>(orders);
  const QtyCut at = locate_q(std::span<PermKey>(keys), q);
  apply_permutation(orders, keys);
  return at;
}

Order select_q(std::span<const Order> orders, std::uint64_t q) {
  if (q < 1 || q > vol(orders)) throw std::out_of_range("select_q quantity out of range");
  std::vector<PermKey> keys = make_keys<PermKey>(orders);
  return orders[keys[locate_q(std::span<PermKey>(keys), q).band_lo].pos];
}

QtySplit split_q(std::span<const Order> orders, std::uint64_t q) {
  if (q < 1 || q > vol(orders)) throw std::out_of_range("split_q quantity out of range");
  std::vector<Order> buf(orders.begin(), orders.end());
  const QtyCut at = partition_at_qty(buf, q);
  QtySplit out;
  out.boundary = buf[at.band_lo];
  const std::uint64_t q_extra = at.v_hi - q;  // < boundary qty by construction
  if (q_extra > 0) buf[at.band_lo].qty -= q_extra;
  out.more_competitive.assign(buf.begin(), buf.begin() + at.band_hi);
  out.less_competitive.reserve(buf.size() - at.band_hi + (q_extra > 0 ? 1 : 0));
  if (q_extra > 0) {
    Order spill = out.boundary;
    spill.qty = q_extra;
    out.less_competitive.push_back(spill);
  }
  out.less_competitive.insert(out.less_competitive.end(), buf.begin() + at.band_hi, buf.end());
  return out;
}

std::uint64_t selection_comparisons() { return g_comparisons; }

void reset_selection_comparisons() { g_comparisons = 0; }

}  // namespace xmatch
