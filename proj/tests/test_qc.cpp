#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracdim/qc.hpp"
#include "fracdim/verify.hpp"

using namespace fracdim;

TEST(ShellPair, NormalizesOrder) {
  const auto a = ShellPair::normalized(1.0, 2.0);
  EXPECT_EQ(a.p, 2.0);
  EXPECT_EQ(a.q, 1.0);
  EXPECT_THROW(ShellPair::normalized(0.0, 1.0), InvalidArgument);
}

TEST(MinDilatation, Examples) {
  EXPECT_EQ(min_dilatation(ShellPair::normalized(2, 1)), 2.0);
  EXPECT_EQ(min_dilatation(ShellPair::normalized(1.7, 1.7)), 1.0);
  EXPECT_EQ(min_dilatation(ShellPair::normalized(3, 0.5)), 6.0);
}

TEST(Classify, ImpossibleBelowRatio) {
  const auto c = classify(ShellPair::normalized(2, 1), 1.5);
  EXPECT_FALSE(c.admissible);
  // exact rational values: theta(t/K) = 3/5, theta(t) = 1/2, transition 2/3
  EXPECT_DOUBLE_EQ(c.theta_t_over_K, 0.6);
  EXPECT_DOUBLE_EQ(c.theta_t, 0.5);
  EXPECT_DOUBLE_EQ(c.transition_p, 2.0 / 3.0);
  EXPECT_TRUE(c.witness_holds);
  EXPECT_LT(c.theta_t_over_K, c.transition_p);
}

TEST(Classify, AdmissibleAtRatio) {
  const auto c = classify(ShellPair::normalized(2, 1), 2.0);
  EXPECT_TRUE(c.admissible);
  EXPECT_DOUBLE_EQ(c.stretch_exponent, -0.5);
}

TEST(Classify, IdentityForEqualExponents) {
  const auto c = classify(ShellPair::normalized(1, 1), 1.0);
  EXPECT_TRUE(c.admissible);
  EXPECT_EQ(c.stretch_exponent, 0.0);
  EXPECT_THROW(classify(ShellPair::normalized(1, 1), 0.99), InvalidArgument);
}

TEST(Classify, ExhaustiveGridIffAndSwap) {
  const auto rep = verify_classification();
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Classify, ImpossibleWitnessIsConsistentWithClosedForms) {
  for (double p : {0.5, 1.0, 2.0, 3.0})
    for (double q : {0.25, 0.5, 1.0})
      for (double K : {1.0, 1.2, 2.0, 5.0}) {
        if (p < q) continue;
        const auto c = classify(ShellPair::normalized(p, q), K);
        if (c.admissible) continue;
        // the S_q spectrum is d at theta(t), while S_p stays below d at theta(t/K)
        EXPECT_NEAR(formula_assouad_spectrum(q, 3, c.theta_t), 3.0, 1e-12);
        EXPECT_LT(formula_assouad_spectrum(p, 3, c.theta_t_over_K), 3.0);
      }
}

TEST(Distortion, EqualFullDimensionIsTight) {
  const DistortionParams prm{3, 2.0, 6.0, 1.0};
  const auto r = distortion_bounds(prm, {3.0, 3.0, 3.0});
  EXPECT_TRUE(r.left_ok);
  EXPECT_TRUE(r.right_ok);
  EXPECT_EQ(r.lower, 0.0);
  EXPECT_EQ(r.middle, 0.0);
  EXPECT_EQ(r.upper, 0.0);
}

TEST(Distortion, UnitDilatationLargeExponent) {
  const DistortionParams prm{2, 1.0, 1e12, 0.7};
  const auto r = distortion_bounds(prm, {1.4, 1.4, 1.4});
  EXPECT_TRUE(r.left_ok);
  EXPECT_TRUE(r.right_ok);
  EXPECT_NEAR(r.left_margin, 0.0, 1e-9);
  EXPECT_NEAR(r.right_margin, 0.0, 1e-9);
}

TEST(Distortion, ThetaHelpers) {
  const DistortionParams prm{3, 2.0, 6.0, 1.0};
  EXPECT_DOUBLE_EQ(prm.theta_t(), 0.5);
  EXPECT_DOUBLE_EQ(prm.theta_t_over_K(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(prm.theta_Kt(), 1.0 / 3.0);
}

TEST(Distortion, Preconditions) {
  EXPECT_THROW(distortion_bounds({2, 1.0, 2.0, 1.0}, {1, 1, 1}), InvalidArgument);
  EXPECT_THROW(distortion_bounds({2, 0.5, 4.0, 1.0}, {1, 1, 1}), InvalidArgument);
  EXPECT_THROW(distortion_bounds({2, 1.0, 4.0, 1.0}, {2.5, 1, 1}), InvalidArgument);
}

TEST(Distortion, RadialStretchSweepReportsEveryT) {
  std::vector<double> ts;
  for (int i = 1; i <= 100; ++i) ts.push_back(0.1 * i);
  const auto rows = distortion_sweep(ShellPair::normalized(2, 1), 3, 6.0, ts);
  ASSERT_EQ(rows.size(), ts.size());
  for (const auto& row : rows) {
    EXPECT_TRUE(std::isfinite(row.report.left_margin));
    EXPECT_TRUE(std::isfinite(row.report.right_margin));
  }
}

TEST(MapShell, UnitNormPointsFixedAndNormsTransform) {
  const double p = 2.0, q = 1.0;
  ShellSpec spec{p, 6.0, 1.0 + 2 * std::numbers::pi, 1e-2};
  const auto s = generate_shell(spec);
  const auto m = map_shell_sample(s, ShellPair::normalized(p, q));
  ASSERT_EQ(m.sample.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.point(i);
    const auto y = radial_stretch(x, p, q);
    const double u = std::pow(norm(x), -1.0 / p);
    EXPECT_NEAR(norm(y), std::pow(u, -q), 1e-12);
    if (std::abs(norm(x) - 1.0) < 1e-15) {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(y[k], x[k], 1e-15);
    }
  }
  EXPECT_GT(m.delta_prime, 0.0);
  EXPECT_GE(m.sample.delta(), s.delta());
}

TEST(MapShell, CloseToDirectlyGeneratedShell) {
  const double delta = 2e-3;
  ShellSpec sp{2.0, 8.0, 1.0 + 2 * std::numbers::pi, delta};
  ShellSpec sq{1.0, 8.0, 1.0 + 2 * std::numbers::pi, delta};
  const auto mapped = map_shell_sample(generate_shell(sp), ShellPair::normalized(2, 1));
  const auto direct = generate_shell(sq);
  EXPECT_LE(hausdorff_distance(mapped.sample, direct), direct.delta() + mapped.delta_prime);
}

TEST(MapShell, RoundTripIsExactToRoundoff) {
  ShellSpec spec{1.5, 5.0, 1.0 + 2 * std::numbers::pi, 1e-2};
  const auto s = generate_shell(spec);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.point(i);
    const auto back = radial_stretch(radial_stretch(x, 1.5, 0.5), 0.5, 1.5);
    EXPECT_LT(distance(back, x), 1e-9 * norm(x));
  }
}

TEST(MapShell, SampleTouchingOriginIsRejected) {
  const SampleSet s(3, 0.1, {0.05, 0.0, 0.0, 1.0, 0.0, 0.0});
  EXPECT_THROW(map_shell_sample(s, ShellPair::normalized(2, 1)), InvalidArgument);
}

TEST(Equivalence, IdenticalInputsGiveIdenticalCurves) {
  CollectionSpec cs;
  cs.rate = Rate::polynomial(1.0);
  cs.ambient_dim = 3;
  cs.delta = 1e-2;
  const auto s = generate_concentric_spheres(cs);
  const std::vector<double> thetas = {0.3};
  const auto rep = spectrum_equivalence_check(s, s, thetas, {0.1, 0.5, 6});
  EXPECT_EQ(rep.shell.values, rep.collection.values);
  EXPECT_EQ(rep.max_difference, 0.0);
  EXPECT_TRUE(rep.passed);
}
