#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracdim/dimension.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/verify.hpp"

using namespace fracdim;

namespace {

// high-precision reference values from tests/oracles/closed_form_oracle.py
constexpr double kKoch = 1.2618595071429148742;

SampleSet segment(double delta, double y = 0.3) {
  std::vector<double> c;
  const int n = static_cast<int>(std::ceil(1.0 / delta));
  for (int i = 0; i <= n; ++i) c.insert(c.end(), {0.1 + static_cast<double>(i) / n, y});
  return SampleSet(2, delta, std::move(c), "segment");
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST(Regression, ExactLine) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  EXPECT_FALSE(f.degenerate);
}

TEST(Regression, ConstantCountsAreDegenerate) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {2, 2, 2, 2};
  const auto f = fit_line(x, y);
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_FALSE(f.passes_quality_gate());
  EXPECT_THROW(fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}), InvalidArgument);
  EXPECT_THROW(fit_line(std::vector<double>{1, 1}, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(Regression, NoisyFitHasBoundedRSquared) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) x.push_back(i), y.push_back(0.5 * i + g(rng));
  const auto f = fit_line(x, y);
  EXPECT_GT(f.r_squared, 0.0);
  EXPECT_LE(f.r_squared, 1.0);
}

TEST(Regression, GeometricScales) {
  const auto s = geometric_scales(1e-4, 1e-2, 16);
  ASSERT_EQ(s.size(), 16u);
  EXPECT_EQ(s.front(), 1e-2);
  EXPECT_EQ(s.back(), 1e-4);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(s[i] / s[i - 1], std::pow(1e-2, 1.0 / 15), 1e-12);
  EXPECT_THROW(geometric_scales(1e-2, 1e-4, 16), InvalidArgument);
}

TEST(BoxDimension, LineSegment) {
  const auto s = segment(1e-5);
  const auto f = estimate_box_dimension(s, 1e-4, 1e-1, 16);
  EXPECT_NEAR(f.slope, 1.0, 0.05);
  EXPECT_TRUE(f.passes_quality_gate());
  ASSERT_EQ(f.scales_used.size(), 16u);
  for (std::size_t i = 1; i < f.scales_used.size(); ++i) EXPECT_GT(f.scales_used[i - 1], f.scales_used[i]);
  for (double c : f.counts_used) EXPECT_GT(c, 0.0);
}

TEST(BoxDimension, KochSnowflakeLevelSeven) {
  const auto s = generate_snowflake(7, 1.0);
  const auto f = estimate_box_dimension(s, 10 * s.delta(), 0.2, 16);
  EXPECT_NEAR(f.slope, kKoch, 0.08);
  EXPECT_TRUE(f.passes_quality_gate());
}

TEST(BoxDimension, FiniteStabilityOfUnions) {
  const auto a = segment(2e-4, 2.0);
  const auto b = generate_snowflake(7, 1.0);
  const double r_min = 10 * b.delta(), r_max = 0.2;
  const double da = estimate_box_dimension(a, r_min, r_max).slope;
  const double db = estimate_box_dimension(b, r_min, r_max).slope;
  const double du = estimate_box_dimension(merge(a, b), r_min, r_max).slope;
  EXPECT_NEAR(du, std::max(da, db), 0.1);
}

TEST(BoxDimension, Preconditions) {
  const auto s = segment(1e-3);
  EXPECT_THROW(estimate_box_dimension(s, 1e-3, 1e-1), UnderResolution);
  EXPECT_THROW(estimate_box_dimension(s, 1e-2, 5.0), InvalidArgument);
  EXPECT_THROW(estimate_box_dimension(s, 1e-2, 1e-1, 3), InvalidArgument);
}

TEST(Centers, AnchorFirstThenSeededSamples) {
  const auto s = segment(1e-3);
  const auto c = select_centers(s, {});
  ASSERT_EQ(c.size(), 2u * 33u);
  EXPECT_EQ(c[0], 0.0);
  EXPECT_EQ(c[1], 0.0);
  EXPECT_EQ(select_centers(s, {}), c);
  CenterPolicy other;
  other.seed = 42;
  EXPECT_NE(select_centers(s, other), c);
  CenterPolicy none;
  none.include_anchor = false;
  none.random_centers = 0;
  EXPECT_THROW(select_centers(s, none), InvalidArgument);
  CenterPolicy bad;
  bad.anchor = {1.0};
  EXPECT_THROW(select_centers(s, bad), DimensionMismatch);
}

TEST(Spectrum, SegmentIsOneDimensionalAtEveryTheta) {
  const auto s = segment(1e-5);
  for (double theta : {0.2, 0.5}) {
    const auto f = estimate_assouad_spectrum_point(s, theta, {1e-4, 1e-2, 12});
    EXPECT_NEAR(f.slope, 1.0, 0.1) << theta;
  }
}

TEST(Spectrum, Preconditions) {
  const auto s = segment(1e-4);
  EXPECT_THROW(estimate_assouad_spectrum_point(s, 0.0, {1e-3, 1e-2, 8}), InvalidArgument);
  EXPECT_THROW(estimate_assouad_spectrum_point(s, 1.0, {1e-3, 1e-2, 8}), InvalidArgument);
  EXPECT_THROW(estimate_assouad_spectrum_point(s, 0.5, {1e-4, 1e-2, 8}), UnderResolution);
  EXPECT_THROW(estimate_assouad_spectrum_point(s, 0.5, {1e-3, 1e-2, 3}), InvalidArgument);
  // r_max^theta larger than the set
  std::vector<double> small;
  sample_sphere(2, 0.1, 1e-4, small);
  EXPECT_THROW(estimate_assouad_spectrum_point(SampleSet(2, 1e-4, small), 0.1, {1e-3, 0.5, 8}), InvalidArgument);
}

TEST(Spectrum, EmptyNeighbourhoodsEverywhereIsAnError) {
  const auto s = segment(1e-4, 50.0);
  CenterPolicy far;
  far.anchor = {-100.0, -100.0};
  far.random_centers = 0;
  EXPECT_THROW(estimate_assouad_spectrum_point(s, 0.5, {1e-3, 1e-2, 8}, far), InvalidArgument);
}

TEST(SpectrumCurve, SingletonGridAndBounds) {
  CollectionSpec spec;
  spec.rate = Rate::polynomial(1.0);
  spec.delta = 1e-4;
  const auto s = generate_concentric_spheres(spec);
  const std::vector<double> one = {0.3};
  const auto c1 = estimate_spectrum_curve(s, one, {1e-3, 1e-1, 10});
  ASSERT_EQ(c1.values.size(), 1u);
  ASSERT_EQ(c1.fits.size(), 1u);
  EXPECT_EQ(c1.kind, SpectrumCurve::Kind::Estimated);
  const auto thetas = grid(0.1, 0.9, 9);
  const auto c = estimate_spectrum_curve(s, thetas, {1e-3, 1e-1, 10});
  for (double v : c.values) EXPECT_LE(v, 2.1);
  EXPECT_EQ(c.values[2], c1.values[0]);
  const std::vector<double> bad = {0.3, 0.2};
  EXPECT_THROW(estimate_spectrum_curve(s, bad, {1e-3, 1e-1, 10}), InvalidArgument);
}

TEST(SpectrumCurve, DeterministicAcrossThreadCaps) {
  CollectionSpec spec;
  spec.rate = Rate::polynomial(2.0);
  spec.delta = 1e-4;
  const auto s = generate_concentric_spheres(spec);
  const std::vector<double> thetas = {0.2, 0.6};
  const auto a = estimate_spectrum_curve(s, thetas, {1e-3, 1e-1, 8});
  setenv("FRACDIM_THREADS", "1", 1);
  const auto b = estimate_spectrum_curve(s, thetas, {1e-3, 1e-1, 8});
  unsetenv("FRACDIM_THREADS");
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.fits[0].counts_used, b.fits[0].counts_used);
}

TEST(SpectrumCurve, SmallThetaExtrapolatesToBoxDimension) {
  CollectionSpec spec;
  spec.rate = Rate::polynomial(2.0);
  spec.delta = 1e-5;
  const auto s = generate_concentric_spheres(spec);
  const double box = estimate_box_dimension(s, 1e-4, 1e-2).slope;
  const std::vector<double> thetas = {0.05, 0.1, 0.15};
  const auto c = estimate_spectrum_curve(s, thetas, {1e-4, 1e-2, 12});
  const auto line = fit_line(thetas, c.values);
  EXPECT_NEAR(line.intercept, box, 0.1);
}

TEST(Regularize, RunningMax) {
  SpectrumCurve c;
  c.thetas = {0.1, 0.2, 0.3};
  c.values = {1.5, 1.2, 1.8};
  const auto r = regularize(c);
  EXPECT_EQ(r.values, (std::vector<double>{1.5, 1.5, 1.8}));
  EXPECT_EQ(r.kind, SpectrumCurve::Kind::Regularized);
  EXPECT_EQ(regularize(r).values, r.values);
}

TEST(Regularize, MonotoneInputUnchanged) {
  SpectrumCurve c;
  c.thetas = {0.1, 0.2, 0.3, 0.4};
  c.values = {1.0, 1.1, 1.1, 1.7};
  EXPECT_EQ(regularize(c).values, c.values);
}

TEST(Regularize, ClosedFormCurvesAreFixedPoints) {
  const auto thetas = grid(0.02, 0.98, 49);
  for (double p : {0.2, 0.5, 1.0, 2.0, 4.0})
    for (int d : {2, 3}) {
      const auto c = closed_form_curve(p, d, thetas);
      EXPECT_EQ(regularize(c).values, c.values);
    }
}

TEST(Regularize, PointwiseAtLeastInput) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  SpectrumCurve c;
  c.thetas = grid(0.05, 0.95, 19);
  for (std::size_t i = 0; i < c.thetas.size(); ++i) c.values.push_back(u(rng));
  const auto r = regularize(c);
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    EXPECT_GE(r.values[i], c.values[i]);
    if (i) {
      EXPECT_GE(r.values[i], r.values[i - 1]);
    }
  }
}

TEST(PhaseTransition, ClosedFormCurves) {
  const std::vector<double> g1 = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  const auto pt1 = detect_phase_transition(closed_form_curve(1.0, 2, g1), 2, 1e-9);
  ASSERT_TRUE(pt1.found);
  EXPECT_NEAR(pt1.theta_star, 0.5, 1e-8);
  EXPECT_EQ(pt1.index, 4u);

  const std::vector<double> g2 = {0.2, 0.4, 0.6, 2.0 / 3.0, 0.8};
  const auto pt2 = detect_phase_transition(closed_form_curve(2.0, 2, g2), 2, 1e-9);
  ASSERT_TRUE(pt2.found);
  EXPECT_NEAR(pt2.theta_star, 2.0 / 3.0, 1e-8);
}

TEST(PhaseTransition, DefaultToleranceInterpolates) {
  const auto thetas = grid(0.1, 0.8, 8);
  const auto pt = detect_phase_transition(closed_form_curve(1.0, 2, thetas), 2);
  ASSERT_TRUE(pt.found);
  // 2 / (2 (1 - theta)) = 1.9 between the 0.4 and 0.5 grid points
  const double v4 = 1.0 / 0.6;
  EXPECT_NEAR(pt.theta_star, 0.4 + (1.9 - v4) / (2.0 - v4) * 0.1, 1e-12);
}

TEST(PhaseTransition, MissingAndImmediate) {
  SpectrumCurve c;
  c.thetas = {0.1, 0.2};
  c.values = {1.0, 1.2};
  EXPECT_FALSE(detect_phase_transition(c, 2).found);
  c.values = {2.0, 2.0};
  const auto pt = detect_phase_transition(c, 2);
  ASSERT_TRUE(pt.found);
  EXPECT_EQ(pt.theta_star, 0.1);
}

TEST(Formulas, BoxDimension) {
  EXPECT_DOUBLE_EQ(formula_box_dim(1.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(formula_box_dim(1.0 / 3.0, 2), 1.5);
  EXPECT_DOUBLE_EQ(formula_box_dim(9.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(formula_box_dim(0.5, 2), 4.0 / 3.0);
  EXPECT_THROW(formula_box_dim(0.0, 2), InvalidArgument);
  EXPECT_THROW(formula_box_dim(1.0, 1), InvalidArgument);
}

TEST(Formulas, AssouadSpectrum) {
  EXPECT_NEAR(formula_assouad_spectrum(1.0, 2, 0.25), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(formula_assouad_spectrum(2.0, 2, 0.5), 1.5, 1e-15);
  EXPECT_NEAR(formula_assouad_spectrum(1.0, 3, 0.3), 17.0 / 7.0, 1e-15);
  EXPECT_NEAR(formula_assouad_spectrum(0.25, 3, 0.1), 8.0 / 3.0, 1e-15);
  EXPECT_NEAR(formula_assouad_spectrum(1.0, 2, 0.3), 10.0 / 7.0, 1e-15);
  for (double p : {0.1, 0.5, 1.0, 2.0, 7.0})
    for (int d : {2, 3, 4}) EXPECT_NEAR(formula_assouad_spectrum(p, d, p / (p + 1)), d, 1e-12);
  EXPECT_THROW(formula_assouad_spectrum(1.0, 2, 1.0), InvalidArgument);
}

TEST(Formulas, UpperBoundLemma) {
  EXPECT_DOUBLE_EQ(formula_spectrum_upper_bound(1.0, 2, 0.5), 2.0);
  EXPECT_NEAR(formula_spectrum_upper_bound(1.0, 2, 0.25), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(formula_spectrum_upper_bound(1.3, 2, 1e-12), 1.3, 1e-10);
  EXPECT_THROW(formula_spectrum_upper_bound(0.5, 2, 0.5), InvalidArgument);
}

TEST(Formulas, InvariantGrid) {
  const auto thetas = grid(0.01, 0.99, 99);
  for (double p : {0.05, 0.3, 0.5, 1.0, 1.7, 3.0, 10.0})
    for (int d : {2, 3, 5}) {
      const double box = formula_box_dim(p, d);
      for (double t : thetas) {
        const double a = formula_assouad_spectrum(p, d, t);
        EXPECT_LE(box, a + 1e-12);
        EXPECT_LE(a, d + 1e-12);
        const double ub = formula_spectrum_upper_bound(box, d, t);
        EXPECT_LE(a, ub + 1e-12);
        if (p * (d - 1) > 1 && t < p / (p + 1) - 1e-9) {
          EXPECT_LT(a, ub);
        }
      }
    }
}

TEST(Formulas, VerifySuitePasses) {
  const auto rep = verify_formulas();
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Window, SnowflakeGeneratorUnitRate) {
  const auto w = impossibility_window(1.0, 2, kKoch);
  EXPECT_TRUE(w.high_rate_branch);
  EXPECT_NEAR(w.lo, 0.42467251404042696376, 1e-15);
  EXPECT_EQ(w.hi, 0.5);
  EXPECT_NEAR(w.bound(0.45), 2.080041325324733056, 1e-14);
  EXPECT_NEAR(w.bound(w.midpoint()), 2.1217580274669736699, 1e-14);
}

TEST(Window, SnowflakeGeneratorHalfRate) {
  const auto w = impossibility_window(0.5, 2, kKoch);
  EXPECT_FALSE(w.high_rate_branch);
  EXPECT_NEAR(w.lo, 0.2460468309523617086, 1e-15);
  EXPECT_DOUBLE_EQ(w.hi, 1.0 / 3.0);
  EXPECT_NEAR(w.bound(0.3), 2.1541519115646808326, 1e-14);
  EXPECT_NEAR(w.bound(w.midpoint()), 2.1228850959089739981, 1e-14);
}

TEST(Window, SnowflakeGeneratorDoubleRate) {
  const auto w = impossibility_window(2.0, 2, kKoch);
  EXPECT_NEAR(w.lo, 0.59616860696784148168, 1e-15);
  EXPECT_DOUBLE_EQ(w.hi, 2.0 / 3.0);
  EXPECT_NEAR(w.bound(w.midpoint()), 2.1184084089472484012, 1e-14);
}

TEST(Window, BoundExceedsAmbientInsideWindow) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 2);
    const double p = 0.05 + 5.0 * u(rng);
    const double d0 = d - 1 + 1e-3 + (1 - 1e-3) * u(rng);
    const auto w = impossibility_window(p, d, d0);
    ASSERT_TRUE(w.nonempty());
    EXPECT_GE(w.lo, 0.0);
    EXPECT_DOUBLE_EQ(w.hi, p / (p + 1));
    for (int k = 1; k < 10; ++k) {
      const double t = w.lo + (w.hi - w.lo) * k / 10.0;
      EXPECT_GT(w.bound(t), d) << "p=" << p << " d0=" << d0 << " t=" << t;
    }
  }
}

TEST(Window, RejectsTrivialGenerator) {
  EXPECT_THROW(impossibility_window(1.0, 2, 1.0), InvalidArgument);
  EXPECT_THROW(impossibility_window(1.0, 2, 0.7), InvalidArgument);
  EXPECT_THROW(impossibility_window(1.0, 2, 2.5), InvalidArgument);
}

TEST(Formulas, ExponentialCollection) { EXPECT_EQ(formula_exponential_spectrum(1.0), 1.0); }
