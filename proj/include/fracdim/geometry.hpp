#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracdim/cell_set.hpp"
#include "fracdim/error.hpp"
#include "fracdim/kd_tree.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

enum class Family { ConcentricSpheres, Spiral, Shell, SnowflakeCollection };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::ConcentricSpheres: return "concentric";
    case Family::Spiral: return "spiral";
    case Family::Shell: return "shell";
    case Family::SnowflakeCollection: return "snowflake-collection";
  }
  return "unknown";
}

/// Decay law of the radii a_n: n^{-p} or e^{-lambda n}.
struct Rate {
  enum class Kind { Polynomial, Exponential };
  Kind kind = Kind::Polynomial;
  double value = 1.0;

  static Rate polynomial(double p) { return {Kind::Polynomial, p}; }
  static Rate exponential(double lambda) { return {Kind::Exponential, lambda}; }

  double operator()(double n) const {
    return kind == Kind::Polynomial ? std::pow(n, -value) : std::exp(-value * n);
  }
};

/// Budget for generated samples, in bytes of coordinate storage.
inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{3} << 30;

struct CollectionSpec {
  Family family = Family::ConcentricSpheres;
  Rate rate;
  int ambient_dim = 2;
  double c1 = 1.0;
  double c2 = 1.0;
  int n_max = 1000000;
  double delta = 1e-3;
  bool include_core_ball = true;
  std::size_t memory_budget = kDefaultMemoryBudget;

  void validate() const {
    if (!(rate.value > 0.0)) throw InvalidArgument("rate parameter (p or lambda) must be > 0");
    if (ambient_dim < 2) throw InvalidArgument("ambient dimension must be >= 2");
    if (!(c1 > 0.0 && c1 <= 1.0)) throw InvalidArgument("c1 must lie in (0,1]");
    if (!(c2 > 0.0 && c2 <= 1.0)) throw InvalidArgument("c2 must lie in (0,1]");
    if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
    if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
    if (family == Family::Shell && ambient_dim != 3)
      throw InvalidArgument("shell family lives in R^3");
    if ((family == Family::Spiral || family == Family::SnowflakeCollection) && ambient_dim != 2)
      throw InvalidArgument("spiral and snowflake families live in R^2");
  }

  double radius(int n) const { return c1 * rate(n); }
};

/// Truncated polynomial spiral shell over [1, u_max] x [1, v_max].
struct ShellSpec {
  double p = 1.0;
  double u_max = 0.0;  // 0 selects delta^{-1/p}
  double v_max = 1.0 + 2.0 * std::numbers::pi;
  double delta = 1e-3;
  std::size_t memory_budget = kDefaultMemoryBudget;

  double effective_u_max() const { return u_max > 0.0 ? u_max : std::pow(delta, -1.0 / p); }

  void validate() const {
    if (!(p > 0.0)) throw InvalidArgument("shell exponent p must be > 0");
    if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
    if (!(effective_u_max() > 1.0)) throw InvalidArgument("u_max must be > 1");
    if (!(v_max > 1.0)) throw InvalidArgument("v_max must be > 1");
  }
};

// ---------------------------------------------------------------------------
// Primitive samplers. Each appends row-major points to `out` and guarantees
// that every point of the primitive lies within delta of an appended point.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_budget(double points, int dim, std::size_t budget, std::string_view what) {
  const double bytes = points * dim * sizeof(double);
  if (bytes > static_cast<double>(budget))
    throw ResourceLimit(std::string(what) + " needs about " +
                        std::to_string(static_cast<long long>(points)) +
                        " points, over the memory budget of " + std::to_string(budget) + " bytes");
}

inline std::size_t circle_points(double radius, double delta) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::numbers::pi * radius / delta)));
}

// Meridian arcs and ring arcs are each at most delta/2 from a sample.
inline std::size_t sphere_rings(double radius, double delta) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::numbers::pi * radius / delta)));
}

inline std::size_t ring_points(double radius, double polar, double delta) {
  const double len = 2.0 * std::numbers::pi * radius * std::sin(polar);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(len / delta)));
}

inline double sphere_point_estimate(int dim, double radius, double delta) {
  if (dim == 2) return static_cast<double>(circle_points(radius, delta));
  return 4.0 * std::numbers::pi * radius * radius / (delta * delta) + 2.0 * std::numbers::pi * radius / delta + 2.0;
}

inline double ball_point_estimate(int dim, double radius, double delta) {
  const double s = 2.0 * delta / std::sqrt(static_cast<double>(dim));
  const double side = 2.0 * (radius + delta) / s + 1.0;
  return std::pow(side, dim);
}

}  // namespace detail

/// Round sphere S(0, radius) in R^dim for dim 2 or 3.
inline void sample_sphere(int dim, double radius, double delta, std::vector<double>& out) {
  constexpr double kPi = std::numbers::pi;
  if (dim == 2) {
    const std::size_t m = detail::circle_points(radius, delta);
    for (std::size_t k = 0; k < m; ++k) {
      const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
      out.push_back(radius * std::cos(t));
      out.push_back(radius * std::sin(t));
    }
    return;
  }
  if (dim == 3) {
    const std::size_t rings = detail::sphere_rings(radius, delta);
    for (std::size_t i = 0; i <= rings; ++i) {
      const double polar = kPi * static_cast<double>(i) / static_cast<double>(rings);
      const std::size_t m = detail::ring_points(radius, polar, delta);
      const double z = radius * std::cos(polar);
      const double rho = radius * std::sin(polar);
      for (std::size_t k = 0; k < m; ++k) {
        const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
        out.push_back(rho * std::cos(t));
        out.push_back(rho * std::sin(t));
        out.push_back(z);
      }
    }
    return;
  }
  throw InvalidArgument("round spheres are generated for d = 2 or 3 only");
}

/// Solid closed ball B(0, radius): cubic lattice with covering radius delta,
/// lattice points outside the ball (but within delta of it) are projected
/// onto the boundary sphere.
inline void sample_ball(int dim, double radius, double delta, std::vector<double>& out) {
  if (dim < 1 || dim > kMaxCellDim) throw InvalidArgument("ball sampling supports d = 1..4");
  const double s = 2.0 * delta / std::sqrt(static_cast<double>(dim));
  const auto reach = static_cast<long long>(std::ceil((radius + delta) / s));
  const double outer2 = (radius + delta) * (radius + delta);
  std::vector<long long> idx(dim, -reach);
  std::vector<double> z(dim);
  for (;;) {
    double n2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      z[k] = static_cast<double>(idx[k]) * s;
      n2 += z[k] * z[k];
    }
    if (n2 <= outer2) {
      const double n = std::sqrt(n2);
      const double scale = n > radius ? radius / n : 1.0;
      for (int k = 0; k < dim; ++k) out.push_back(z[k] * scale);
    }
    int axis = dim - 1;
    while (axis >= 0 && idx[axis] == reach) {
      idx[axis] = -reach;
      --axis;
    }
    if (axis < 0) break;
    ++idx[axis];
  }
}

// ---------------------------------------------------------------------------
// Concentric collections
// ---------------------------------------------------------------------------

/// Number of spheres kept before the tail is replaced by the core ball:
/// sphere n is kept, and the next one considered, while the gap
/// c1 (a_n - a_{n+1}) is at least 4 delta.
inline int retained_sphere_count(const CollectionSpec& spec) {
  int n = 1;
  while (n < spec.n_max && spec.radius(n) - spec.radius(n + 1) >= 4.0 * spec.delta) ++n;
  return n;
}

namespace detail {

inline void check_resolvable(const CollectionSpec& spec, int retained) {
  // The smallest gap that must be resolved is the one between the two
  // largest spheres when nothing else survives truncation.
  if (retained == 1 && spec.n_max > 1) {
    const double gap = spec.radius(1) - spec.radius(2);
    if (spec.delta >= gap)
      throw UnderResolution("delta " + num_text(spec.delta) +
                                " does not resolve the first inter-sphere gap " + num_text(gap),
                            gap / 4.0);
  }
}

}  // namespace detail

/// The individual round spheres S_1..S_N of a concentric collection.
inline std::vector<SampleSet> concentric_members(const CollectionSpec& spec) {
  spec.validate();
  if (spec.family != Family::ConcentricSpheres)
    throw InvalidArgument("concentric_members expects the concentric-spheres family");
  const int retained = retained_sphere_count(spec);
  detail::check_resolvable(spec, retained);
  std::vector<SampleSet> out;
  out.reserve(retained);
  for (int n = 1; n <= retained; ++n) {
    std::vector<double> c;
    sample_sphere(spec.ambient_dim, spec.radius(n), spec.delta, c);
    out.emplace_back(spec.ambient_dim, spec.delta, std::move(c), "sphere");
  }
  return out;
}

/// Union of the retained round spheres c1 a_n S^{d-1}, optionally with the
/// solid ball B(0, c1 a_N) standing in for the unresolved tail.
inline SampleSet generate_concentric_spheres(const CollectionSpec& spec) {
  spec.validate();
  if (spec.family != Family::ConcentricSpheres)
    throw InvalidArgument("generate_concentric_spheres expects the concentric-spheres family");
  if (spec.ambient_dim > 3) throw InvalidArgument("round spheres are generated for d = 2 or 3 only");
  const int retained = retained_sphere_count(spec);
  detail::check_resolvable(spec, retained);

  double estimate = 0.0;
  for (int n = 1; n <= retained; ++n)
    estimate += detail::sphere_point_estimate(spec.ambient_dim, spec.radius(n), spec.delta);
  if (spec.include_core_ball)
    estimate += detail::ball_point_estimate(spec.ambient_dim, spec.radius(retained), spec.delta);
  detail::check_budget(estimate, spec.ambient_dim, spec.memory_budget, "concentric collection");

  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(estimate * 1.05) * spec.ambient_dim);
  for (int n = 1; n <= retained; ++n) sample_sphere(spec.ambient_dim, spec.radius(n), spec.delta, c);
  if (spec.include_core_ball) sample_ball(spec.ambient_dim, spec.radius(retained), spec.delta, c);
  return SampleSet(spec.ambient_dim, spec.delta, std::move(c), std::string(family_name(spec.family)));
}

// ---------------------------------------------------------------------------
// Spirals and shells
// ---------------------------------------------------------------------------

inline std::vector<double> shell_point(double p, double u, double v) {
  const double rho = std::pow(u, -p);
  return {rho * std::cos(u) * std::sin(v), rho * std::sin(u) * std::sin(v), rho * std::cos(v)};
}

/// Parameter grid on the shell. u-steps use the bound
/// |dx/du| <= u^{-p} sqrt(1 + p^2/u^2) (decreasing in u), v-steps the exact
/// |dx/dv| = u^{-p}; each half-step contributes at most delta/2.
inline SampleSet generate_shell(const ShellSpec& spec) {
  spec.validate();
  const double p = spec.p;
  const double delta = spec.delta;
  const double u_max = spec.effective_u_max();
  const double v_span = spec.v_max - 1.0;
  auto speed_u = [p](double u) { return std::pow(u, -p) * std::sqrt(1.0 + p * p / (u * u)); };

  // integral of (speed_u/delta) * (v_span u^{-p}/delta + 1) du, by stepping
  double estimate = 0.0;
  for (double u = 1.0; u < u_max;) {
    const double h = delta / speed_u(u);
    estimate += v_span * std::pow(u, -p) / delta + 2.0;
    u += h;
    if (estimate > 1e12) break;
  }
  detail::check_budget(estimate, 3, spec.memory_budget, "spiral shell");

  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(estimate * 1.05) * 3);
  auto emit_row = [&](double u) {
    const double h_v = delta * std::pow(u, p);
    const auto steps = static_cast<std::size_t>(std::ceil(v_span / h_v));
    const double rho = std::pow(u, -p);
    const double cu = std::cos(u), su = std::sin(u);
    for (std::size_t k = 0; k <= steps; ++k) {
      const double v = 1.0 + v_span * static_cast<double>(k) / static_cast<double>(steps);
      const double sv = std::sin(v);
      c.push_back(rho * cu * sv);
      c.push_back(rho * su * sv);
      c.push_back(rho * std::cos(v));
    }
  };
  double u = 1.0;
  for (;;) {
    emit_row(u);
    if (u >= u_max) break;
    u = std::min(u_max, u + delta / speed_u(u));
  }
  return SampleSet(3, delta, std::move(c), "shell");
}

/// Planar spiral t^{-p} e^{it}, t in [1, t_max]; t_max <= 0 selects
/// delta^{-1/p}. Consecutive samples are at most 2 delta apart.
inline SampleSet generate_spiral(double p, double t_max, double delta,
                                 std::size_t memory_budget = kDefaultMemoryBudget) {
  if (!(p > 0.0)) throw InvalidArgument("spiral exponent p must be > 0");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
  if (t_max <= 0.0) t_max = std::pow(delta, -1.0 / p);
  if (!(t_max > 1.0)) throw InvalidArgument("t_max must be > 1");
  auto speed = [p](double t) { return std::pow(t, -p) * std::sqrt(1.0 + p * p / (t * t)); };

  double estimate = 0.0;
  for (double t = 1.0; t < t_max && estimate < 1e12; t += 2.0 * delta / speed(t)) estimate += 1.0;
  detail::check_budget(estimate + 1.0, 2, memory_budget, "spiral");

  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(estimate + 2.0) * 2);
  double t = 1.0;
  for (;;) {
    const double rho = std::pow(t, -p);
    c.push_back(rho * std::cos(t));
    c.push_back(rho * std::sin(t));
    if (t >= t_max) break;
    t = std::min(t_max, t + 2.0 * delta / speed(t));
  }
  return SampleSet(2, delta, std::move(c), "spiral");
}

/// Sample points of a spiral in generation (parameter) order, used to check
/// connectivity. Same points as generate_spiral before canonical sorting.
inline std::vector<double> spiral_parameters(double p, double t_max, double delta) {
  if (t_max <= 0.0) t_max = std::pow(delta, -1.0 / p);
  auto speed = [p](double t) { return std::pow(t, -p) * std::sqrt(1.0 + p * p / (t * t)); };
  std::vector<double> ts;
  for (double t = 1.0;;) {
    ts.push_back(t);
    if (t >= t_max) break;
    t = std::min(t_max, t + 2.0 * delta / speed(t));
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Koch snowflake
// ---------------------------------------------------------------------------

/// Vertices of the level-`level` Koch snowflake polygon, counterclockwise,
/// centroid at the origin, initial triangle of side `scale`. There are
/// 3 * 4^level vertices (one per segment), all lying on the limit curve.
inline std::vector<double> koch_polygon(int level, double scale) {
  if (level < 0) throw InvalidArgument("snowflake level must be >= 0");
  if (level > 12) throw ResourceLimit("snowflake level above 12 exceeds the vertex budget");
  const double circum = scale / std::sqrt(3.0);
  std::vector<double> v;
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
    v.push_back(circum * std::cos(a));
    v.push_back(circum * std::sin(a));
  }
  const double c60 = 0.5, s60 = std::sqrt(3.0) / 2.0;
  for (int l = 0; l < level; ++l) {
    const std::size_t n = v.size() / 2;
    std::vector<double> next;
    next.reserve(v.size() * 4);
    for (std::size_t i = 0; i < n; ++i) {
      const double ax = v[2 * i], ay = v[2 * i + 1];
      const double bx = v[2 * ((i + 1) % n)], by = v[2 * ((i + 1) % n) + 1];
      const double dx = (bx - ax) / 3.0, dy = (by - ay) / 3.0;
      const double p1x = ax + dx, p1y = ay + dy;
      // outward bump for a counterclockwise polygon: rotate by -60 degrees
      const double p2x = p1x + c60 * dx + s60 * dy;
      const double p2y = p1y - s60 * dx + c60 * dy;
      next.insert(next.end(), {ax, ay, p1x, p1y, p2x, p2y, ax + 2 * dx, ay + 2 * dy});
    }
    v.swap(next);
  }
  return v;
}

/// Koch snowflake boundary sampled by its level-L vertices;
/// delta = scale * 3^{-level} (the diameter of each sub-arc).
inline SampleSet generate_snowflake(int level, double scale = 1.0) {
  if (!(scale > 0.0)) throw InvalidArgument("snowflake scale must be > 0");
  auto v = koch_polygon(level, scale);
  return SampleSet(2, scale * std::pow(3.0, -level), std::move(v), "snowflake");
}

namespace detail {

/// Even-odd point-in-polygon test.
inline bool inside_polygon(const std::vector<double>& poly, double x, double y) {
  const std::size_t n = poly.size() / 2;
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = poly[2 * i], yi = poly[2 * i + 1];
    const double xj = poly[2 * j], yj = poly[2 * j + 1];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

}  // namespace detail

/// Collection of Koch snowflakes c1 a_n K centred at the origin, where K is
/// the snowflake normalized to circumradius 1. Each member is refined until
/// its segments are shorter than delta. Returns the members S_1..S_N.
inline std::vector<SampleSet> snowflake_members(const CollectionSpec& spec) {
  spec.validate();
  if (spec.family != Family::SnowflakeCollection)
    throw InvalidArgument("snowflake_members expects the snowflake-collection family");
  const int retained = retained_sphere_count(spec);
  const double side_for_unit_circumradius = std::sqrt(3.0);
  std::vector<SampleSet> out;
  for (int n = 1; n <= retained; ++n) {
    const double side = side_for_unit_circumradius * spec.radius(n);
    const int level = std::max(0, static_cast<int>(std::ceil(std::log(side / spec.delta) / std::log(3.0))));
    out.push_back(generate_snowflake(level, side).with_delta(spec.delta));
  }
  return out;
}

/// Union of the snowflake members; with include_core_ball the innermost
/// snowflake is filled by lattice rasterization of its polygon.
inline SampleSet generate_snowflake_collection(const CollectionSpec& spec) {
  const auto members = snowflake_members(spec);
  std::vector<double> c;
  for (const auto& m : members) c.insert(c.end(), m.coords().begin(), m.coords().end());
  if (spec.include_core_ball) {
    const int retained = static_cast<int>(members.size());
    const double side = std::sqrt(3.0) * spec.radius(retained);
    // boundary at delta/2 and interior lattice with covering radius delta/2
    const double half = spec.delta / 2.0;
    const int level = std::max(0, static_cast<int>(std::ceil(std::log(side / half) / std::log(3.0))));
    const auto poly = koch_polygon(level, side);
    const double s = half * std::sqrt(2.0);
    const double reach = spec.radius(retained);
    const auto steps = static_cast<long long>(std::ceil(reach / s));
    detail::check_budget(std::pow(2.0 * steps + 1.0, 2), 2, spec.memory_budget, "snowflake core");
    c.insert(c.end(), poly.begin(), poly.end());
    for (long long i = -steps; i <= steps; ++i)
      for (long long j = -steps; j <= steps; ++j) {
        const double x = static_cast<double>(i) * s, y = static_cast<double>(j) * s;
        if (x * x + y * y <= reach * reach && detail::inside_polygon(poly, x, y)) {
          c.push_back(x);
          c.push_back(y);
        }
      }
  }
  return SampleSet(2, spec.delta, std::move(c), "snowflake-collection");
}

/// Generates the union sample for any collection family.
inline SampleSet generate_collection(const CollectionSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::ConcentricSpheres: return generate_concentric_spheres(spec);
    case Family::SnowflakeCollection: return generate_snowflake_collection(spec);
    case Family::Spiral: return generate_spiral(spec.rate.value, 0.0, spec.delta, spec.memory_budget);
    case Family::Shell:
      return generate_shell(ShellSpec{spec.rate.value, 0.0, 1.0 + 2.0 * std::numbers::pi, spec.delta,
                                      spec.memory_budget});
  }
  throw InvalidArgument("unknown family");
}

// ---------------------------------------------------------------------------
// Metric primitives
// ---------------------------------------------------------------------------

/// sup over a in A of dist(a, B).
inline double directed_hausdorff(const SampleSet& a, const SampleSet& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("samples live in different dimensions");
  return dispatch_dim(a.dim(), [&]<int D>(std::integral_constant<int, D>) {
    const KdTree<D> index(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, index.nearest_distance(a.point(i)));
    return worst;
  });
}

/// Hausdorff distance between two samples; accurate to a.delta() + b.delta()
/// as an estimate of the distance between the underlying sets.
inline double hausdorff_distance(const SampleSet& a, const SampleSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

/// Minimum pairwise distance between two samples.
inline double set_distance(const SampleSet& a, const SampleSet& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("samples live in different dimensions");
  const SampleSet& small = a.size() <= b.size() ? a : b;
  const SampleSet& large = a.size() <= b.size() ? b : a;
  return dispatch_dim(a.dim(), [&]<int D>(std::integral_constant<int, D>) {
    const KdTree<D> index(large);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < small.size() && best > 0.0; ++i)
      best = std::min(best, index.nearest_distance(small.point(i), best));
    return best;
  });
}

/// Radial stretch |x|^{q/p - 1} x, fixing the origin. Maps the shell S_p
/// onto S_q and is (p/q)-quasiconformal for p >= q.
inline std::vector<double> radial_stretch(std::span<const double> x, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw InvalidArgument("stretch exponents must be positive");
  const double n = norm(x);
  std::vector<double> y(x.begin(), x.end());
  if (n == 0.0) return y;
  const double f = std::pow(n, q / p - 1.0);
  for (double& v : y) v *= f;
  return y;
}

// ---------------------------------------------------------------------------
// Concentric-collection conditions
// ---------------------------------------------------------------------------

struct ConcentricReport {
  /// d_H(S_n, {x0}) / a_n for n = 1..N.
  std::vector<double> hausdorff_ratio;
  /// dist(S_n, S_{n+1}) / (a_n - a_{n+1}) for n = 1..N-1.
  std::vector<double> gap_ratio;
  double c1 = 0.0;
  double c2 = 0.0;
  double tolerance = 0.0;
  /// 1-based indices n at which a ratio leaves its band.
  std::vector<int> failing_indices;
  bool passed = false;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Checks the two concentric-collection conditions on sampled members:
/// each ratio must lie in [c - tol, c + tol] around its fitted (median)
/// constant, and both constants must lie in (0, 1].
inline ConcentricReport verify_concentric_conditions(std::span<const SampleSet> collection,
                                                     std::span<const double> a, double tol,
                                                     std::span<const double> center = {}) {
  if (collection.empty()) throw InvalidArgument("empty collection");
  if (a.size() < collection.size()) throw InvalidArgument("need one a_n per collection member");
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(a[i] < a[i - 1])) throw InvalidArgument("sequence a_n must be strictly decreasing");
  const int d = collection.front().dim();
  std::vector<double> x0(center.begin(), center.end());
  if (x0.empty()) x0.assign(d, 0.0);
  if (static_cast<int>(x0.size()) != d) throw DimensionMismatch("center dimension mismatch");

  ConcentricReport rep;
  rep.tolerance = tol;
  for (std::size_t n = 0; n < collection.size(); ++n) {
    const auto& s = collection[n];
    if (s.dim() != d) throw DimensionMismatch("collection members differ in dimension");
    double far = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) far = std::max(far, distance(s.point(i), x0));
    rep.hausdorff_ratio.push_back(far / a[n]);
    if (n + 1 < collection.size())
      rep.gap_ratio.push_back(set_distance(s, collection[n + 1]) / (a[n] - a[n + 1]));
  }
  rep.c1 = detail::median(rep.hausdorff_ratio);
  rep.c2 = detail::median(rep.gap_ratio);

  std::vector<bool> bad(collection.size(), false);
  for (std::size_t n = 0; n < rep.hausdorff_ratio.size(); ++n)
    if (std::abs(rep.hausdorff_ratio[n] - rep.c1) > tol) bad[n] = true;
  for (std::size_t n = 0; n < rep.gap_ratio.size(); ++n)
    if (std::abs(rep.gap_ratio[n] - rep.c2) > tol) bad[n] = true;
  for (std::size_t n = 0; n < bad.size(); ++n)
    if (bad[n]) rep.failing_indices.push_back(static_cast<int>(n) + 1);

  const bool c1_ok = rep.c1 > 0.0 && rep.c1 <= 1.0 + tol;
  const bool c2_ok = rep.gap_ratio.empty() || (rep.c2 > 0.0 && rep.c2 <= 1.0 + tol);
  rep.passed = rep.failing_indices.empty() && c1_ok && c2_ok;
  return rep;
}

}  // namespace fracdim
