#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fracdim/cell_set.hpp"
#include "fracdim/covering.hpp"
#include "fracdim/error.hpp"
#include "fracdim/grid_index.hpp"
#include "fracdim/parallel.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr double kQualityGate = 0.98;

/// Least-squares fit of log(count) against a log-scale variable.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> scales_used;  // strictly decreasing
  std::vector<double> counts_used;  // positive
  /// All counts equal: slope is reported as 0.
  bool degenerate = false;

  bool passes_quality_gate(double gate = kQualityGate) const { return !degenerate && r_squared >= gate; }
};

/// Ordinary least squares y = slope * x + intercept.
inline RegressionFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("regression needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("regression abscissae are all equal");
  RegressionFit f;
  if (!(syy > 0.0)) {
    f.degenerate = true;
    f.slope = 0.0;
    f.intercept = my;
    f.r_squared = 0.0;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return f;
}

/// n scales geometrically spaced from r_max down to r_min.
inline std::vector<double> geometric_scales(double r_min, double r_max, int n) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw InvalidArgument("need 0 < r_min < r_max");
  if (n < 2) throw InvalidArgument("need at least two scales");
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = r_max * std::pow(r_min / r_max, static_cast<double>(i) / (n - 1));
  s.front() = r_max;
  s.back() = r_min;
  return s;
}

struct ScaleRange {
  double r_min = 1e-3;
  double r_max = 1e-1;
  int n_scales = 16;
};

/// Slope of log N_r against log(1/r) over a geometric grid.
inline RegressionFit estimate_box_dimension(const SampleSet& s, double r_min, double r_max, int n_scales = 16,
                                            const CoveringOptions& opt = {}) {
  if (n_scales < 4) throw InvalidArgument("box dimension needs at least 4 scales");
  if (r_max > diameter_bound(s))
    throw InvalidArgument("r_max exceeds the diameter of the sample");
  const auto scales = geometric_scales(r_min, r_max, n_scales);
  const auto profile = covering_profile(s, scales, opt);
  std::vector<double> x, y;
  for (const auto& c : profile) {
    x.push_back(-std::log(c.scale_r));
    y.push_back(std::log(static_cast<double>(c.count)));
  }
  auto fit = fit_line(x, y);
  for (const auto& c : profile) {
    fit.scales_used.push_back(c.scale_r);
    fit.counts_used.push_back(static_cast<double>(c.count));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Assouad spectrum estimation
// ---------------------------------------------------------------------------

/// Centers at which local counts are taken. The maximum over all of them
/// stands in for the supremum over x.
struct CenterPolicy {
  /// Accumulation point of the set; empty means the origin.
  std::vector<double> anchor;
  bool include_anchor = true;
  int random_centers = 32;
  std::uint64_t seed = kDefaultSeed;
};

/// Resolves a center policy to explicit coordinates (row-major). Random
/// centers are sample points drawn with a fixed-seed mt19937_64.
inline std::vector<double> select_centers(const SampleSet& s, const CenterPolicy& policy) {
  const int d = s.dim();
  std::vector<double> out;
  if (policy.include_anchor) {
    if (policy.anchor.empty()) {
      out.assign(d, 0.0);
    } else {
      if (static_cast<int>(policy.anchor.size()) != d) throw DimensionMismatch("anchor has the wrong dimension");
      out = policy.anchor;
    }
  }
  if (policy.random_centers < 0) throw InvalidArgument("random center count must be >= 0");
  std::mt19937_64 rng(policy.seed);
  for (int i = 0; i < policy.random_centers; ++i) {
    const auto p = s.point(static_cast<std::size_t>(rng() % s.size()));
    out.insert(out.end(), p.begin(), p.end());
  }
  if (out.empty()) throw InvalidArgument("center policy selects no centers");
  return out;
}

namespace detail {

/// M(r) = max over centers of N_r(B(x, r^theta) ∩ S), one entry per scale.
template <int D>
std::vector<double> max_local_counts(const GridIndex<D>& index, std::span<const double> centers,
                                     std::span<const double> scales, double theta) {
  const std::size_t n_centers = centers.size() / D;
  const std::size_t tasks = n_centers * scales.size();
  std::vector<std::size_t> counts(tasks, 0);
  parallel_for(tasks, [&](std::size_t t) {
    const std::size_t c = t / scales.size();
    const std::size_t j = t % scales.size();
    const double r = scales[j];
    CellSet<D> cells;
    counts[t] = local_cell_count<D>(index, centers.subspan(c * D, D), std::pow(r, theta), r, cells);
  });
  std::vector<double> m(scales.size(), 0.0);
  for (std::size_t t = 0; t < tasks; ++t)
    m[t % scales.size()] = std::max(m[t % scales.size()], static_cast<double>(counts[t]));
  return m;
}

inline void check_spectrum_args(const SampleSet& s, double theta, const ScaleRange& range,
                                const CoveringOptions& opt) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0,1)");
  if (range.n_scales < 4) throw InvalidArgument("spectrum estimation needs at least 4 scales");
  if (!(range.r_max < 1.0)) throw InvalidArgument("scales must be below 1 so that r^theta > r");
  check_density(s, range.r_min, opt);
  if (std::pow(range.r_max, theta) > diameter_bound(s))
    throw InvalidArgument("r_max^theta exceeds the diameter of the sample");
}

template <int D>
RegressionFit spectrum_point(const GridIndex<D>& index, std::span<const double> centers, double theta,
                             const ScaleRange& range) {
  const auto scales = geometric_scales(range.r_min, range.r_max, range.n_scales);
  const auto m = max_local_counts<D>(index, centers, scales, theta);
  std::vector<double> x, y;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (m[j] <= 0.0) throw InvalidArgument("every center has an empty neighbourhood at some scale");
    x.push_back((theta - 1.0) * std::log(scales[j]));
    y.push_back(std::log(m[j]));
  }
  auto fit = fit_line(x, y);
  fit.scales_used = scales;
  fit.counts_used = m;
  return fit;
}

}  // namespace detail

/// Slope of log M(r) against log(r^theta / r), where M(r) is the largest
/// local covering number N_r(B(x, r^theta) ∩ S) over the policy's centers.
inline RegressionFit estimate_assouad_spectrum_point(const SampleSet& s, double theta, const ScaleRange& range,
                                                     const CenterPolicy& centers = {},
                                                     const CoveringOptions& opt = {}) {
  detail::check_spectrum_args(s, theta, range, opt);
  const auto c = select_centers(s, centers);
  return dispatch_dim(s.dim(), [&]<int D>(std::integral_constant<int, D>) {
    const GridIndex<D> index(s, suggested_bucket_size(s));
    return detail::spectrum_point<D>(index, c, theta, range);
  });
}

struct SpectrumCurve {
  enum class Kind { Estimated, ClosedForm, Regularized };
  std::vector<double> thetas;
  std::vector<double> values;
  Kind kind = Kind::Estimated;
  std::vector<RegressionFit> fits;  // estimated curves only
};

inline const char* kind_name(SpectrumCurve::Kind k) {
  switch (k) {
    case SpectrumCurve::Kind::Estimated: return "estimated";
    case SpectrumCurve::Kind::ClosedForm: return "closed-form";
    case SpectrumCurve::Kind::Regularized: return "regularized";
  }
  return "unknown";
}

inline void check_theta_grid(std::span<const double> thetas) {
  if (thetas.empty()) throw InvalidArgument("empty theta grid");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0 && thetas[i] < 1.0)) throw InvalidArgument("theta values must lie in (0,1)");
    if (i > 0 && !(thetas[i] > thetas[i - 1])) throw InvalidArgument("theta grid must be strictly increasing");
  }
}

inline SpectrumCurve estimate_spectrum_curve(const SampleSet& s, std::span<const double> thetas,
                                             const ScaleRange& range, const CenterPolicy& centers = {},
                                             const CoveringOptions& opt = {}) {
  check_theta_grid(thetas);
  for (double t : thetas) detail::check_spectrum_args(s, t, range, opt);
  const auto c = select_centers(s, centers);
  SpectrumCurve curve;
  curve.thetas.assign(thetas.begin(), thetas.end());
  dispatch_dim(s.dim(), [&]<int D>(std::integral_constant<int, D>) {
    const GridIndex<D> index(s, suggested_bucket_size(s));
    for (double t : thetas) curve.fits.push_back(detail::spectrum_point<D>(index, c, t, range));
  });
  for (const auto& f : curve.fits) curve.values.push_back(f.slope);
  return curve;
}

/// Running maximum over the theta grid.
inline SpectrumCurve regularize(const SpectrumCurve& curve) {
  if (curve.thetas.size() != curve.values.size()) throw InvalidArgument("curve arrays differ in length");
  SpectrumCurve out;
  out.thetas = curve.thetas;
  out.kind = SpectrumCurve::Kind::Regularized;
  double run = -std::numeric_limits<double>::infinity();
  for (double v : curve.values) {
    run = std::max(run, v);
    out.values.push_back(run);
  }
  return out;
}

struct PhaseTransition {
  bool found = false;
  double theta_star = 0.0;
  /// First grid index whose value reaches d - tol.
  std::size_t index = 0;
};

/// Smallest theta at which the curve reaches d - tol, linearly interpolated
/// between the bracketing grid points. tol < 0 selects 0.05 d.
inline PhaseTransition detect_phase_transition(const SpectrumCurve& curve, int d, double tol = -1.0) {
  if (curve.thetas.size() != curve.values.size()) throw InvalidArgument("curve arrays differ in length");
  if (tol < 0.0) tol = 0.05 * d;
  const double target = d - tol;
  PhaseTransition pt;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i] < target) continue;
    pt.found = true;
    pt.index = i;
    if (i == 0) {
      pt.theta_star = curve.thetas[0];
    } else {
      const double t0 = curve.thetas[i - 1], t1 = curve.thetas[i];
      const double v0 = curve.values[i - 1], v1 = curve.values[i];
      pt.theta_star = v1 > v0 ? t0 + (target - v0) / (v1 - v0) * (t1 - t0) : t1;
    }
    return pt;
  }
  return pt;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Box dimension of a p-concentric collection of (d-1)-spheres.
inline double formula_box_dim(double p, int d) {
  if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
  if (d < 2) throw InvalidArgument("d must be >= 2");
  return std::max(d / (1.0 + p), d - 1.0);
}

/// Assouad spectrum of a p-concentric collection of (d-1)-spheres.
inline double formula_assouad_spectrum(double p, int d, double theta) {
  if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
  if (d < 2) throw InvalidArgument("d must be >= 2");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0,1)");
  if (p * (d - 1) <= 1.0) return std::min(d / ((1.0 + p) * (1.0 - theta)), static_cast<double>(d));
  return std::min(d - 1.0 + theta / (p * (1.0 - theta)), static_cast<double>(d));
}

/// General upper bound min{d0 / (1 - theta), d} from the box dimension d0.
inline double formula_spectrum_upper_bound(double d0, int d, double theta) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (!(d0 >= d - 1.0 && d0 <= d)) throw InvalidArgument("d0 must lie in [d-1, d]");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0,1)");
  return std::min(d0 / (1.0 - theta), static_cast<double>(d));
}

/// Spectrum of an exponentially shrinking collection: the box dimension d0
/// of the generating sphere, at every theta.
inline double formula_exponential_spectrum(double d0) { return d0; }

inline SpectrumCurve closed_form_curve(double p, int d, std::span<const double> thetas) {
  check_theta_grid(thetas);
  SpectrumCurve c;
  c.kind = SpectrumCurve::Kind::ClosedForm;
  c.thetas.assign(thetas.begin(), thetas.end());
  for (double t : thetas) c.values.push_back(formula_assouad_spectrum(p, d, t));
  return c;
}

/// Range of theta on which a p-polynomial collection generated by a sphere
/// of box dimension d0 in (d-1, d] would need spectrum above d.
struct ImpossibilityWindow {
  double p = 0.0;
  int d = 0;
  double d0 = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  /// p * d0 > 1: bound d0 + theta/(p(1-theta)); otherwise (d0+1)/((1-theta)(p+1)).
  bool high_rate_branch = false;

  double bound(double theta) const {
    if (high_rate_branch) return d0 + theta / (p * (1.0 - theta));
    return (d0 + 1.0) / ((1.0 - theta) * (p + 1.0));
  }
  bool nonempty() const { return lo < hi; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

inline ImpossibilityWindow impossibility_window(double p, int d, double d0) {
  if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
  if (d < 2) throw InvalidArgument("d must be >= 2");
  if (!(d0 > d - 1.0)) throw InvalidArgument("d0 must exceed d-1; no contradiction exists otherwise");
  if (!(d0 <= d)) throw InvalidArgument("d0 must not exceed d");
  ImpossibilityWindow w;
  w.p = p;
  w.d = d;
  w.d0 = d0;
  w.hi = p / (p + 1.0);
  w.high_rate_branch = p * d0 > 1.0;
  if (w.high_rate_branch) {
    const double a = p * (d - d0);
    w.lo = a / (a + 1.0);
  } else {
    // negative when d0 is close to d; the window then starts at 0
    w.lo = std::max(0.0, (d * (p + 1.0) - (d0 + 1.0)) / (d * (p + 1.0)));
  }
  return w;
}

}  // namespace fracdim
