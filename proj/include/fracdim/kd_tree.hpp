#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "fracdim/sample_set.hpp"

namespace fracdim {

/// Static k-d tree over a sample, for nearest-neighbour queries.
template <int D>
class KdTree {
 public:
  explicit KdTree(const SampleSet& s) : coords_(s.coords()) {
    const std::size_t n = s.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    nodes_.reserve(2 * n / kLeaf + 2);
    build(order, 0, n);
    std::vector<double> sorted(coords_.size());
    for (std::size_t i = 0; i < n; ++i) std::copy_n(&coords_[order[i] * D], D, &sorted[i * D]);
    coords_.swap(sorted);
  }

  /// Distance from q to the nearest point, or `upper` if none is closer.
  double nearest_distance(std::span<const double> q,
                          double upper = std::numeric_limits<double>::infinity()) const {
    double best2 = upper * upper;
    search(0, q.data(), best2);
    return std::sqrt(best2);
  }

 private:
  static constexpr std::size_t kLeaf = 16;

  struct Node {
    std::size_t begin, end;
    int axis;  // -1 for leaves
    double split;
    std::int64_t left, right;
  };

  std::int64_t build(std::vector<std::uint32_t>& order, std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back({begin, end, -1, 0.0, -1, -1});
    if (end - begin <= kLeaf) return id;
    int axis = 0;
    double widest = -1.0;
    for (int k = 0; k < D; ++k) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, coords_[order[i] * D + k]);
        hi = std::max(hi, coords_[order[i] * D + k]);
      }
      if (hi - lo > widest) widest = hi - lo, axis = k;
    }
    if (widest <= 0.0) return id;  // all points coincide
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return coords_[a * D + axis] < coords_[b * D + axis]; });
    const double split = coords_[order[mid] * D + axis];
    const auto left = build(order, begin, mid);
    const auto right = build(order, mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::int64_t id, const double* q, double& best2) const {
    const Node& nd = nodes_[id];
    if (nd.axis < 0) {
      for (std::size_t i = nd.begin; i < nd.end; ++i) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) {
          const double t = coords_[i * D + k] - q[k];
          s += t * t;
        }
        best2 = std::min(best2, s);
      }
      return;
    }
    // left holds coordinates <= split, right holds >= split
    const double diff = q[nd.axis] - nd.split;
    const std::int64_t near = diff < 0.0 ? nd.left : nd.right;
    const std::int64_t far = diff < 0.0 ? nd.right : nd.left;
    search(near, q, best2);
    if (diff * diff < best2) search(far, q, best2);
  }

  std::vector<double> coords_;
  std::vector<Node> nodes_;
};

}  // namespace fracdim
