#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracdim/dimension.hpp"
#include "fracdim/error.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

/// Exponents of two spiral shells, ordered so that p >= q > 0.
struct ShellPair {
  double p = 1.0;
  double q = 1.0;

  static ShellPair normalized(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("shell exponents must be positive");
    return a >= b ? ShellPair{a, b} : ShellPair{b, a};
  }
};

/// Smallest K for which a K-quasiconformal map takes one shell onto the other.
inline double min_dilatation(const ShellPair& pair) { return pair.p / pair.q; }

struct Classification {
  bool admissible = false;
  double K = 1.0;
  double min_K = 1.0;
  // admissible: exponent of the radial stretch |x|^{q/p-1} x
  double stretch_exponent = 0.0;
  // impossible: theta(t) with t = 1/q, where the S_q spectrum reaches d,
  // and theta(t/K), which stays below the S_p transition p/(p+1)
  double theta_t = 0.0;
  double theta_t_over_K = 0.0;
  double transition_p = 0.0;
  bool witness_holds = false;
};

inline Classification classify(const ShellPair& pair, double K) {
  if (!(K >= 1.0)) throw InvalidArgument("dilatation K must be >= 1");
  const ShellPair sp = ShellPair::normalized(pair.p, pair.q);
  Classification c;
  c.K = K;
  c.min_K = min_dilatation(sp);
  c.transition_p = sp.p / (sp.p + 1.0);
  c.admissible = K >= c.min_K;
  if (c.admissible) {
    c.stretch_exponent = sp.q / sp.p - 1.0;
    c.witness_holds = true;
  } else {
    c.theta_t = sp.q / (1.0 + sp.q);
    c.theta_t_over_K = sp.q * K / (sp.q * K + 1.0);
    c.witness_holds = c.theta_t_over_K < c.transition_p;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Dimension distortion evaluator
// ---------------------------------------------------------------------------

struct DistortionParams {
  int d = 2;
  double K = 1.0;
  double s = 4.0;  // the distortion exponent; 2d is used when unknown
  double t = 1.0;

  static double theta(double t) { return 1.0 / (t + 1.0); }
  double theta_t() const { return theta(t); }
  double theta_t_over_K() const { return theta(t / K); }
  double theta_Kt() const { return theta(K * t); }

  void validate() const {
    if (d < 2) throw InvalidArgument("d must be >= 2");
    if (!(K >= 1.0)) throw InvalidArgument("K must be >= 1");
    if (!(s > d)) throw InvalidArgument("s must exceed d");
    if (!(t > 0.0)) throw InvalidArgument("t must be > 0");
  }
};

/// Regularized spectrum values supplied by the caller.
struct DistortionInputs {
  double dim_E_at_t_over_K = 0.0;  // E at theta(t/K)
  double dim_FE_at_t = 0.0;        // F(E) at theta(t)
  double dim_E_at_Kt = 0.0;        // E at theta(Kt)
};

struct DistortionReport {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  bool left_ok = false;
  bool right_ok = false;
  double left_margin = 0.0;   // middle - lower
  double right_margin = 0.0;  // upper - middle
};

inline DistortionReport distortion_bounds(const DistortionParams& prm, const DistortionInputs& in,
                                          double slack = 1e-12) {
  prm.validate();
  for (double v : {in.dim_E_at_t_over_K, in.dim_FE_at_t, in.dim_E_at_Kt})
    if (!(v > 0.0 && v <= prm.d)) throw InvalidArgument("spectrum values must lie in (0, d]");
  const double f = 1.0 - prm.d / prm.s;
  const double inv_d = 1.0 / prm.d;
  DistortionReport r;
  r.lower = f * (1.0 / in.dim_E_at_t_over_K - inv_d);
  r.middle = 1.0 / in.dim_FE_at_t - inv_d;
  r.upper = (1.0 / f) * (1.0 / in.dim_E_at_Kt - inv_d);
  r.left_margin = r.middle - r.lower;
  r.right_margin = r.upper - r.middle;
  r.left_ok = r.left_margin >= -slack;
  r.right_ok = r.right_margin >= -slack;
  return r;
}

struct DistortionRow {
  double t = 0.0;
  DistortionReport report;
};

/// Evaluates the inequality for the radial stretch S_p -> S_q (K = p/q)
/// using closed-form spectra, over a list of t values. Diagnostic only.
inline std::vector<DistortionRow> distortion_sweep(const ShellPair& pair, int d, double s,
                                                   std::span<const double> ts) {
  const ShellPair sp = ShellPair::normalized(pair.p, pair.q);
  std::vector<DistortionRow> rows;
  for (double t : ts) {
    DistortionParams prm{d, min_dilatation(sp), s, t};
    prm.validate();
    DistortionInputs in{formula_assouad_spectrum(sp.p, d, prm.theta_t_over_K()),
                        formula_assouad_spectrum(sp.q, d, prm.theta_t()),
                        formula_assouad_spectrum(sp.p, d, prm.theta_Kt())};
    rows.push_back({t, distortion_bounds(prm, in)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Mapping samples
// ---------------------------------------------------------------------------

struct MappedSample {
  SampleSet sample;
  /// Lipschitz constant of the stretch on the delta-neighbourhood of the
  /// input; the output is (lipschitz * delta)-dense.
  double lipschitz = 1.0;
  double delta_prime = 0.0;
};

/// Applies x -> |x|^{to/from - 1} x to every point.
inline MappedSample stretch_sample(const SampleSet& s, double from, double to) {
  if (!(from > 0.0) || !(to > 0.0)) throw InvalidArgument("stretch exponents must be positive");
  const double alpha = to / from - 1.0;
  double rho_min = std::numeric_limits<double>::infinity(), rho_max = 0.0;
  std::vector<double> c;
  c.reserve(s.coords().size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    const double n = norm(p);
    rho_min = std::min(rho_min, n);
    rho_max = std::max(rho_max, n);
    const auto y = radial_stretch(p, from, to);
    c.insert(c.end(), y.begin(), y.end());
  }
  // |DF(z)| = max(1, to/from) |z|^alpha, maximized at an end of the radial range
  const double inner = rho_min - s.delta();
  const double outer = rho_max + s.delta();
  double extreme;
  if (alpha < 0.0) {
    if (!(inner > 0.0))
      throw InvalidArgument("sample reaches within delta of the origin; the stretch is not Lipschitz there");
    extreme = std::pow(inner, alpha);
  } else {
    extreme = std::pow(outer, alpha);
  }
  MappedSample out{SampleSet(s.dim(), s.delta(), std::move(c), s.family()), 1.0, 0.0};
  out.lipschitz = std::max(1.0, to / from) * extreme;
  out.delta_prime = out.lipschitz * s.delta();
  out.sample = out.sample.with_delta(std::max(out.delta_prime, s.delta()));
  return out;
}

/// Maps a sample of the shell with exponent pair.p onto the shell with
/// exponent pair.q.
inline MappedSample map_shell_sample(const SampleSet& s, const ShellPair& pair) {
  return stretch_sample(s, pair.p, pair.q);
}

struct EquivalenceReport {
  SpectrumCurve shell;
  SpectrumCurve collection;
  std::vector<double> differences;
  double max_difference = 0.0;
  double tolerance = 0.2;
  bool passed = false;
};

/// Estimates the spectrum of a shell sample and of a concentric sample on
/// the same theta grid and compares them pointwise.
inline EquivalenceReport spectrum_equivalence_check(const SampleSet& shell, const SampleSet& collection,
                                                    std::span<const double> thetas, const ScaleRange& range,
                                                    const CenterPolicy& centers = {}, double tolerance = 0.2) {
  if (shell.dim() != collection.dim()) throw DimensionMismatch("samples live in different dimensions");
  EquivalenceReport rep;
  rep.tolerance = tolerance;
  rep.shell = estimate_spectrum_curve(shell, thetas, range, centers);
  rep.collection = estimate_spectrum_curve(collection, thetas, range, centers);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    rep.differences.push_back(std::abs(rep.shell.values[i] - rep.collection.values[i]));
    rep.max_difference = std::max(rep.max_difference, rep.differences.back());
  }
  rep.passed = rep.max_difference <= tolerance;
  return rep;
}

}  // namespace fracdim
