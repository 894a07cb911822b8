#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "fracdim/cell_set.hpp"
#include "fracdim/error.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

/// Bucket size giving roughly `per_bucket` points per occupied bucket when
/// the sample lies on a (d-1)-dimensional set.
inline double suggested_bucket_size(const SampleSet& s, double per_bucket = 32.0) {
  const Box b = bounding_box(s);
  double extent = 0.0;
  for (int k = 0; k < b.dim(); ++k) extent = std::max(extent, b.hi[k] - b.lo[k]);
  if (extent <= 0.0) return 1.0;
  const double n = static_cast<double>(s.size());
  const double manifold_dim = std::max(1, s.dim() - 1);
  const double per_axis = std::max(1.0, std::pow(n / per_bucket, 1.0 / manifold_dim));
  return extent / per_axis;
}

/// Uniform-grid spatial hash over a sample. Points are copied into bucket
/// order so each bucket is a contiguous row-major range.
template <int D>
class GridIndex {
 public:
  using Key = CellKey<D>;

  GridIndex(const SampleSet& s, double bucket_size) : h_(bucket_size) {
    if (s.dim() != D) throw DimensionMismatch("grid index dimension mismatch");
    if (!(h_ > 0.0)) throw InvalidArgument("bucket size must be positive");
    check_cell_range(bounding_box(s), h_);
    const std::size_t n = s.size();
    const double* c = s.coords().data();

    std::unordered_map<Key, std::size_t, KeyHash> counts;
    std::vector<std::size_t> slot_of(n);
    {
      Key last{};
      std::size_t last_slot = 0;
      bool have = false;
      std::vector<std::size_t> sizes;
      for (std::size_t i = 0; i < n; ++i) {
        const Key k = key_of(c + i * D);
        if (!have || k != last) {
          auto [it, fresh] = counts.try_emplace(k, sizes.size());
          if (fresh) sizes.push_back(0);
          last = k;
          last_slot = it->second;
          have = true;
        }
        ++sizes[last_slot];
        slot_of[i] = last_slot;
      }
      // order buckets by key so iteration is deterministic
      std::vector<std::pair<Key, std::size_t>> order(counts.begin(), counts.end());
      std::sort(order.begin(), order.end());
      buckets_.resize(order.size());
      std::vector<std::size_t> rank(order.size());
      std::size_t offset = 0;
      for (std::size_t b = 0; b < order.size(); ++b) {
        rank[order[b].second] = b;
        buckets_[b] = Bucket{order[b].first, offset, offset + sizes[order[b].second]};
        offset += sizes[order[b].second];
        lookup_.emplace(order[b].first, b);
      }
      for (auto& sl : slot_of) sl = rank[sl];
    }
    coords_.resize(n * D);
    std::vector<std::size_t> cursor(buckets_.size());
    for (std::size_t b = 0; b < buckets_.size(); ++b) cursor[b] = buckets_[b].begin;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t dst = cursor[slot_of[i]]++;
      std::copy_n(c + i * D, D, coords_.data() + dst * D);
    }
    key_lo_ = key_hi_ = buckets_.front().key;
    for (const auto& b : buckets_)
      for (int k = 0; k < D; ++k) {
        key_lo_[k] = std::min(key_lo_[k], b.key[k]);
        key_hi_[k] = std::max(key_hi_[k], b.key[k]);
      }
  }

  double bucket_size() const noexcept { return h_; }
  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  std::size_t size() const noexcept { return coords_.size() / D; }

  /// Visits every point y with |y - x| < radius. Buckets lying entirely
  /// inside the ball are passed as whole ranges: fn(const double* rows, n).
  template <class Fn>
  void for_each_in_ball(std::span<const double> x, double radius, Fn&& fn) const {
    auto visit = [&](const Bucket& b) {
      const auto [lo, hi] = bucket_distance_range(b.key, x);
      if (lo >= radius) return;
      const double* rows = coords_.data() + b.begin * D;
      const std::size_t n = b.end - b.begin;
      if (hi < radius) {
        fn(rows, n);
        return;
      }
      const double r2 = radius * radius;
      std::size_t run = 0;  // contiguous run of accepted rows
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) {
          const double dlt = rows[i * D + k] - x[k];
          s += dlt * dlt;
        }
        if (s < r2) {
          ++run;
        } else {
          if (run) fn(rows + (i - run) * D, run);
          run = 0;
        }
      }
      if (run) fn(rows + (n - run) * D, run);
    };

    Key lo, hi;
    double box_cells = 1.0;
    for (int k = 0; k < D; ++k) {
      lo[k] = std::max(key_lo_[k], cell_index(x[k] - radius, h_));
      hi[k] = std::min(key_hi_[k], cell_index(x[k] + radius, h_));
      if (lo[k] > hi[k]) return;
      box_cells *= static_cast<double>(hi[k] - lo[k] + 1);
    }
    if (box_cells > static_cast<double>(buckets_.size())) {
      for (const auto& b : buckets_) visit(b);
      return;
    }
    Key k = lo;
    for (;;) {
      if (auto it = lookup_.find(k); it != lookup_.end()) visit(buckets_[it->second]);
      int axis = D - 1;
      while (axis >= 0 && k[axis] == hi[axis]) {
        k[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
      ++k[axis];
    }
  }

 private:
  struct Bucket {
    Key key;
    std::size_t begin;
    std::size_t end;
  };

  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 0x100000001b3ULL;
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  Key key_of(const double* p) const {
    Key k;
    for (int a = 0; a < D; ++a) k[a] = cell_index(p[a], h_);
    return k;
  }

  /// Min and max distance from x to the closed box of bucket `key`.
  std::pair<double, double> bucket_distance_range(const Key& key, std::span<const double> x) const {
    double lo2 = 0.0, hi2 = 0.0;
    for (int k = 0; k < D; ++k) {
      const double a = static_cast<double>(key[k]) * h_;
      const double b = a + h_;
      const double below = a - x[k];
      const double above = x[k] - b;
      const double gap = std::max({below, above, 0.0});
      const double far = std::max(std::abs(x[k] - a), std::abs(x[k] - b));
      lo2 += gap * gap;
      hi2 += far * far;
    }
    return {std::sqrt(lo2), std::sqrt(hi2)};
  }

  double h_;
  std::vector<double> coords_;
  std::vector<Bucket> buckets_;
  std::unordered_map<Key, std::size_t, KeyHash> lookup_;
  Key key_lo_{};
  Key key_hi_{};
};

}  // namespace fracdim
