#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "fracdim/error.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

/// Largest ambient dimension the mesh machinery is instantiated for.
inline constexpr int kMaxCellDim = 4;

template <int D>
using CellKey = std::array<std::int64_t, D>;

/// Half-open mesh convention: coordinate x lies in cell floor(x / r), i.e. in
/// [k*r, (k+1)*r).
inline std::int64_t cell_index(double x, double r) {
  return static_cast<std::int64_t>(std::floor(x / r));
}

/// Rejects scales at which some cell index would not fit the 64-bit packed
/// representation (|x|/r > 2^62).
inline void check_cell_range(const Box& box, double r) {
  constexpr double kLimit = 4611686018427387904.0;  // 2^62
  for (int k = 0; k < box.dim(); ++k) {
    const double m = std::max(std::abs(box.lo[k]), std::abs(box.hi[k]));
    if (m / r > kLimit)
      throw ResourceLimit("cell index overflow: |x|/r exceeds 2^62 at r=" + num_text(r));
  }
}

/// Runs fn(std::integral_constant<int, D>{}) for the runtime dimension d.
template <class Fn>
decltype(auto) dispatch_dim(int d, Fn&& fn) {
  switch (d) {
    case 1: return fn(std::integral_constant<int, 1>{});
    case 2: return fn(std::integral_constant<int, 2>{});
    case 3: return fn(std::integral_constant<int, 3>{});
    case 4: return fn(std::integral_constant<int, 4>{});
    default:
      throw InvalidArgument("mesh covering supports ambient dimension 1.." +
                            std::to_string(kMaxCellDim) + ", got " + std::to_string(d));
  }
}

/// Open-addressing hash set of packed cell keys. Only insertion and size are
/// needed, so there is no erase and no tombstone handling.
template <int D>
class CellSet {
 public:
  using Key = CellKey<D>;

  explicit CellSet(std::size_t expected = 64) { rehash(capacity_for(expected)); }

  /// Returns true when the key was not present.
  bool insert(const Key& key) {
    if ((size_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
    return insert_unchecked(key);
  }

  std::size_t size() const noexcept { return size_; }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), empty_key());
    size_ = 0;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& k : slots_)
      if (k != empty_key()) fn(k);
  }

 private:
  // Valid indices satisfy |k| <= 2^62, so INT64_MIN never collides.
  static Key empty_key() {
    Key k;
    k.fill(std::numeric_limits<std::int64_t>::min());
    return k;
  }

  static std::size_t capacity_for(std::size_t n) {
    std::size_t c = 16;
    while (c < 2 * n) c <<= 1;
    return c;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash(const Key& key) {
    std::uint64_t h = 0;
    for (int k = 0; k < D; ++k) h = mix(h ^ static_cast<std::uint64_t>(key[k]));
    return h;
  }

  bool insert_unchecked(const Key& key) {
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = hash(key) & mask;
    for (;;) {
      Key& slot = slots_[i];
      if (slot == key) return false;
      if (slot == empty_key()) {
        slot = key;
        ++size_;
        return true;
      }
      i = (i + 1) & mask;
    }
  }

  void rehash(std::size_t capacity) {
    std::vector<Key> old(capacity, empty_key());
    old.swap(slots_);
    size_ = 0;
    for (const auto& k : old)
      if (k != empty_key()) insert_unchecked(k);
  }

  std::vector<Key> slots_;
  std::size_t size_ = 0;
};

/// Number of distinct cells occupied by a range of row-major points.
/// Consecutive points falling into the same cell skip the hash probe.
template <int D>
std::size_t count_cells(const double* coords, std::size_t n_points, double r, CellSet<D>& cells) {
  cells.clear();
  CellKey<D> last;
  bool have_last = false;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double* p = coords + i * D;
    CellKey<D> key;
    for (int k = 0; k < D; ++k) key[k] = cell_index(p[k], r);
    if (have_last && key == last) continue;
    cells.insert(key);
    last = key;
    have_last = true;
  }
  return cells.size();
}

}  // namespace fracdim
