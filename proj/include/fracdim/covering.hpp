#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracdim/cell_set.hpp"
#include "fracdim/error.hpp"
#include "fracdim/grid_index.hpp"
#include "fracdim/parallel.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

inline constexpr const char* kCellConvention = "half-open-floor-mesh";

struct CoveringOptions {
  /// Scales must satisfy r >= density_factor * delta.
  double density_factor = 10.0;
};

struct BallRestriction {
  std::vector<double> center;
  double radius = 0.0;
};

struct CoverResult {
  double scale_r = 0.0;
  std::size_t count = 0;
  std::string convention = kCellConvention;
  std::optional<BallRestriction> restricted_to;
  /// Set when a restricted count found no sample point in the ball.
  bool empty = false;
  double density_factor = 10.0;
};

/// Throws UnderResolution unless r >= factor * delta.
inline void check_density(const SampleSet& s, double r, const CoveringOptions& opt) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("scale r must be positive and finite");
  if (!(opt.density_factor > 0.0)) throw InvalidArgument("density factor must be positive");
  if (r < opt.density_factor * s.delta())
    throw UnderResolution("scale r=" + num_text(r) + " is below " +
                              num_text(opt.density_factor) + " * delta=" + num_text(s.delta()) +
                              "; resample with delta <= " + num_text(r / opt.density_factor),
                          r / opt.density_factor);
}

namespace detail {

template <int D>
std::size_t count_sample_cells(const SampleSet& s, double r) {
  CellSet<D> cells(std::min<std::size_t>(s.size(), 1u << 16));
  return count_cells<D>(s.coords().data(), s.size(), r, cells);
}

}  // namespace detail

/// Number of distinct half-open r-mesh cells floor(x / r) met by the sample.
inline CoverResult covering_number(const SampleSet& s, double r, const CoveringOptions& opt = {}) {
  check_density(s, r, opt);
  check_cell_range(bounding_box(s), r);
  CoverResult out;
  out.scale_r = r;
  out.density_factor = opt.density_factor;
  out.count = dispatch_dim(s.dim(), [&]<int D>(std::integral_constant<int, D>) {
    return detail::count_sample_cells<D>(s, r);
  });
  return out;
}

namespace detail {

inline void check_local_args(const SampleSet& s, std::span<const double> x, double big_r, double r) {
  if (static_cast<int>(x.size()) != s.dim()) throw DimensionMismatch("center has the wrong dimension");
  if (!(big_r > r)) throw InvalidArgument("ball radius R must exceed the scale r");
}

inline CoverResult local_result(std::span<const double> x, double big_r, double r, std::size_t count,
                                const CoveringOptions& opt) {
  CoverResult out;
  out.scale_r = r;
  out.count = count;
  out.empty = count == 0;
  out.density_factor = opt.density_factor;
  out.restricted_to = BallRestriction{std::vector<double>(x.begin(), x.end()), big_r};
  return out;
}

}  // namespace detail

/// Covering number of {y in S : |y - x| < R}, by a linear scan.
inline CoverResult local_covering_number(const SampleSet& s, std::span<const double> x, double big_r, double r,
                                         const CoveringOptions& opt = {}) {
  detail::check_local_args(s, x, big_r, r);
  check_density(s, r, opt);
  const std::size_t count = dispatch_dim(s.dim(), [&]<int D>(std::integral_constant<int, D>) {
    CellSet<D> cells;
    const double r2 = big_r * big_r;
    const auto& c = s.coords();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double* p = &c[i * D];
      double d2 = 0.0;
      for (int k = 0; k < D; ++k) d2 += (p[k] - x[k]) * (p[k] - x[k]);
      if (d2 >= r2) continue;
      CellKey<D> key;
      for (int k = 0; k < D; ++k) key[k] = cell_index(p[k], r);
      cells.insert(key);
    }
    return cells.size();
  });
  return detail::local_result(x, big_r, r, count, opt);
}

/// Same count through a spatial index built over S. `cells` is scratch
/// storage so repeated calls avoid reallocation.
template <int D>
std::size_t local_cell_count(const GridIndex<D>& index, std::span<const double> x, double big_r, double r,
                             CellSet<D>& cells) {
  cells.clear();
  index.for_each_in_ball(x, big_r, [&](const double* rows, std::size_t n) {
    CellKey<D> last{};
    bool have_last = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = rows + i * D;
      CellKey<D> key;
      for (int k = 0; k < D; ++k) key[k] = cell_index(p[k], r);
      if (have_last && key == last) continue;
      cells.insert(key);
      last = key;
      have_last = true;
    }
  });
  return cells.size();
}

template <int D>
CoverResult local_covering_number(const SampleSet& s, const GridIndex<D>& index, std::span<const double> x,
                                  double big_r, double r, const CoveringOptions& opt = {}) {
  detail::check_local_args(s, x, big_r, r);
  if (s.dim() != D) throw DimensionMismatch("index dimension differs from the sample");
  check_density(s, r, opt);
  CellSet<D> cells;
  return detail::local_result(x, big_r, r, local_cell_count<D>(index, x, big_r, r, cells), opt);
}

/// Covering numbers at several scales, returned in descending order of r.
inline std::vector<CoverResult> covering_profile(const SampleSet& s, std::vector<double> scales,
                                                 const CoveringOptions& opt = {}) {
  if (scales.empty()) throw InvalidArgument("no scales given");
  std::sort(scales.begin(), scales.end(), std::greater<>());
  check_density(s, scales.back(), opt);
  check_cell_range(bounding_box(s), scales.back());
  std::vector<CoverResult> out(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) { out[i] = covering_number(s, scales[i], opt); });
  return out;
}

/// Limit on the number of cells brute_force_covering will enumerate.
inline constexpr std::size_t kBruteForceCellLimit = 1000000;

/// Oracle: walks every mesh cell of `region` and counts the cells holding at
/// least one sample point. Points outside the region's cells are ignored.
inline std::size_t brute_force_covering(const SampleSet& s, double r, const Box& region) {
  if (!(r > 0.0)) throw InvalidArgument("scale r must be positive");
  const int d = s.dim();
  if (region.dim() != d) throw DimensionMismatch("region has the wrong dimension");
  check_cell_range(region, r);
  std::vector<std::int64_t> lo(d), extent(d);
  double total = 1.0;
  for (int k = 0; k < d; ++k) {
    if (region.hi[k] < region.lo[k]) return 0;
    lo[k] = cell_index(region.lo[k], r);
    extent[k] = cell_index(region.hi[k], r) - lo[k] + 1;
    total *= static_cast<double>(extent[k]);
  }
  if (total > static_cast<double>(kBruteForceCellLimit))
    throw ResourceLimit("region spans " + std::to_string(static_cast<long long>(total)) +
                        " cells, above the brute-force limit of " + std::to_string(kBruteForceCellLimit));

  // occupancy grid addressed by the linearized cell offset
  std::vector<char> occupied(static_cast<std::size_t>(total), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    std::size_t flat = 0;
    bool inside = true;
    for (int k = 0; k < d && inside; ++k) {
      const std::int64_t off = cell_index(p[k], r) - lo[k];
      if (off < 0 || off >= extent[k]) inside = false;
      flat = flat * static_cast<std::size_t>(extent[k]) + static_cast<std::size_t>(off);
    }
    if (inside) occupied[flat] = 1;
  }
  std::size_t count = 0;
  for (char c : occupied) count += c != 0;
  return count;
}

}  // namespace fracdim
