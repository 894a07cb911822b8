#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracdim/error.hpp"

namespace fracdim {

/// Axis-aligned box, used for bounding boxes and for oracle enumeration.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double diagonal() const {
    double s = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(s);
  }
};

namespace detail {

template <int D>
void sort_rows_fixed(std::vector<double>& coords) {
  using Row = std::array<double, D>;
  const std::size_t n = coords.size() / D;
  std::vector<Row> rows(n);
  std::memcpy(rows.data(), coords.data(), n * sizeof(Row));
  std::sort(rows.begin(), rows.end());
  std::memcpy(coords.data(), rows.data(), n * sizeof(Row));
}

inline bool rows_sorted(const std::vector<double>& c, int dim) {
  const std::size_t n = c.size() / dim;
  for (std::size_t i = 1; i < n; ++i) {
    const double* a = &c[(i - 1) * dim];
    const double* b = &c[i * dim];
    if (std::lexicographical_compare(b, b + dim, a, a + dim)) return false;
  }
  return true;
}

inline void sort_rows(std::vector<double>& coords, int dim) {
  if (rows_sorted(coords, dim)) return;
  switch (dim) {
    case 1: std::sort(coords.begin(), coords.end()); return;
    case 2: sort_rows_fixed<2>(coords); return;
    case 3: sort_rows_fixed<3>(coords); return;
    case 4: sort_rows_fixed<4>(coords); return;
    default: break;
  }
  const std::size_t n = coords.size() / dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(&coords[a * dim], &coords[a * dim] + dim,
                                        &coords[b * dim], &coords[b * dim] + dim);
  });
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(&coords[order[i] * dim], dim, &out[i * dim]);
  coords.swap(out);
}

}  // namespace detail

/// Finite delta-dense sample of a bounded set in R^d: every point of the
/// underlying set lies within delta() of some sample point.
///
/// Points are stored row-major and kept in lexicographic order, so two
/// samples built from the same points compare and serialize identically
/// regardless of how they were produced.
class SampleSet {
 public:
  SampleSet(int dim, double delta, std::vector<double> coords, std::string family = "custom")
      : dim_(dim), delta_(delta), coords_(std::move(coords)), family_(std::move(family)) {
    if (dim_ < 1) throw InvalidArgument("sample dimension must be >= 1");
    if (!(delta_ > 0.0) || !std::isfinite(delta_))
      throw InvalidArgument("sample delta must be positive and finite");
    if (coords_.empty()) throw InvalidArgument("sample must contain at least one point");
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
      throw InvalidArgument("coordinate count is not a multiple of the dimension");
    for (double v : coords_)
      if (!std::isfinite(v)) throw InvalidArgument("sample coordinates must be finite");
    detail::sort_rows(coords_, dim_);
  }

  int dim() const noexcept { return dim_; }
  double delta() const noexcept { return delta_; }
  const std::string& family() const noexcept { return family_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  SampleSet with_delta(double delta) const { return SampleSet(dim_, delta, coords_, family_); }

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.dim_ == b.dim_ && a.delta_ == b.delta_ && a.coords_ == b.coords_;
  }

 private:
  int dim_;
  double delta_;
  std::vector<double> coords_;
  std::string family_;
};

inline Box bounding_box(const SampleSet& s) {
  const int d = s.dim();
  Box b{std::vector<double>(s.point(0).begin(), s.point(0).end()),
        std::vector<double>(s.point(0).begin(), s.point(0).end())};
  const auto& c = s.coords();
  for (std::size_t i = 0; i < c.size(); i += d)
    for (int k = 0; k < d; ++k) {
      b.lo[k] = std::min(b.lo[k], c[i + k]);
      b.hi[k] = std::max(b.hi[k], c[i + k]);
    }
  return b;
}

/// Upper bound on the diameter (bounding-box diagonal).
inline double diameter_bound(const SampleSet& s) { return bounding_box(s).diagonal(); }

/// Union of two samples; the density of the union is the coarser of the two.
inline SampleSet merge(const SampleSet& a, const SampleSet& b, std::string family = "union") {
  if (a.dim() != b.dim()) throw DimensionMismatch("cannot merge samples of different dimension");
  std::vector<double> c;
  c.reserve(a.coords().size() + b.coords().size());
  c.insert(c.end(), a.coords().begin(), a.coords().end());
  c.insert(c.end(), b.coords().begin(), b.coords().end());
  return SampleSet(a.dim(), std::max(a.delta(), b.delta()), std::move(c), std::move(family));
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace fracdim
