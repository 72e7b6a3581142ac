#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "heins_lab/catalog.hpp"
#include "heins_lab/dynamics.hpp"
#include "heins_lab/map_parser.hpp"
#include "heins_lab/straightening.hpp"

using namespace heins_lab;

namespace {

const Complex I(0.0, 1.0);

double atanh_log(double t) { return 0.5 * std::log((1.0 + t) / (1.0 - t)); }

double pseudo(Complex a, Complex b) {
  return atanh_log(std::abs((b - a) / (1.0 - std::conj(a) * b)));
}

DynamicsFrame frame_of(const std::string& name) {
  const Classification c = classify(parse_map(find_catalog_entry(name)->dsl));
  return *c.frame;
}

}  // namespace

TEST(Straightening, DefaultGridLayout) {
  const auto g = default_grid(0.0, 0.5);
  ASSERT_EQ(g.size(), 25u);
  EXPECT_EQ(g[0], Complex(0.0));
  EXPECT_EQ(g[1], Complex(0.5));
  for (std::size_t k = 2; k < 13; ++k) EXPECT_NEAR(std::abs(g[k]), 0.3, 1e-15);
  for (std::size_t k = 13; k < 25; ++k) EXPECT_NEAR(std::abs(g[k]), 0.6, 1e-15);
}

TEST(Straightening, ZeroStepMapHasConstantLimit) {
  const DynamicsFrame fr = frame_of("parabolic_zero");
  const auto grid = default_grid();
  const StraighteningRecord r1 = straightened_iterate(fr, 0.0, 0.5, 16, grid);
  const StraighteningRecord r2 = straightened_iterate(fr, 0.0, 0.5, 4096, grid);
  double sup1 = 0.0, sup2 = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sup1 = std::max(sup1, std::abs(r1.values[k]));
    sup2 = std::max(sup2, std::abs(r2.values[k]));
  }
  EXPECT_LT(sup2, sup1);
  EXPECT_LT(sup2, 1e-2);
  const StraighteningLimit lim = straightening_limit(fr);
  EXPECT_TRUE(lim.converged);
  EXPECT_TRUE(lim.constant);
  EXPECT_LT(lim.constancy, 1e-3);
}

TEST(Straightening, AutomorphismLimitIsAnIsometricEmbedding) {
  const DynamicsFrame fr = frame_of("parabolic_aut_pos");
  const StraighteningLimit lim = straightening_limit(fr);
  ASSERT_TRUE(lim.converged);
  EXPECT_FALSE(lim.constant);
  EXPECT_GT(lim.ref_value, 0.0);
  EXPECT_LT(lim.ref_value, 1.0);
  // omega(h(z), h(z0)) = omega(z, z0) on the whole grid.
  for (std::size_t k = 0; k < lim.grid.size(); ++k) {
    EXPECT_NEAR(pseudo(lim.values[k], lim.values[0]), pseudo(lim.grid[k], lim.grid[0]), 1e-9);
  }
  // The aligned reference value lies on the positive real axis.
  EXPECT_NEAR(lim.values[1].imag(), 0.0, 1e-15);
  EXPECT_NEAR(lim.values[1].real(), std::tanh(pseudo(0.0, 0.5)), 1e-9);
}

TEST(Straightening, StepViaStraighteningMatchesClosedForms) {
  const DynamicsFrame zero = frame_of("parabolic_zero");
  const StraighteningLimit lz = straightening_limit(zero);
  EXPECT_LT(step_via_straightening(lz, zero, 0.0), 1e-3);

  const DynamicsFrame aut = frame_of("parabolic_aut_pos");
  const StraighteningLimit la = straightening_limit(aut);
  EXPECT_NEAR(step_via_straightening(la, aut, 0.0), atanh_log(1.0 / std::sqrt(5.0)), 1e-9);

  const DynamicsFrame hyp = frame_of("hyperbolic_2");
  const StraighteningLimit lh = straightening_limit(hyp);
  ASSERT_TRUE(lh.converged);
  EXPECT_NEAR(step_via_straightening(lh, hyp, 0.0), 0.5 * std::log(2.0), 1e-9);
}

TEST(Straightening, StepViaStraighteningNeedsConvergence) {
  const DynamicsFrame fr = frame_of("parabolic_aut_pos");
  StraighteningLimit lim = straightening_limit(fr, 0.0, 0.5, default_grid(), 1, 1e-4);
  EXPECT_FALSE(lim.converged);
  EXPECT_THROW(step_via_straightening(lim, fr, 0.0), PreconditionError);
}

TEST(Straightening, EquivalenceOfTwoBasePoints) {
  const DynamicsFrame fr = frame_of("parabolic_aut_pos");
  const auto grid = default_grid();
  const StraighteningLimit a = straightening_limit(fr, 0.0, 0.5, grid);
  const StraighteningLimit b = straightening_limit(fr, 0.3, 0.5, grid);
  const EquivalenceResult same = straightening_equivalence(a, a);
  ASSERT_EQ(same.status, FitStatus::Fitted);
  EXPECT_LT(same.residual, 1e-9);
  EXPECT_LT(std::abs(same.aut->center()), 1e-9);

  const EquivalenceResult fit = straightening_equivalence(a, b);
  ASSERT_EQ(fit.status, FitStatus::Fitted);
  EXPECT_LT(fit.residual, 1e-6);
}

TEST(Straightening, ConstantAgainstNonConstantDoesNotFit) {
  const auto grid = default_grid();
  const StraighteningLimit c = straightening_limit(frame_of("parabolic_zero"), 0.0, 0.5, grid);
  const StraighteningLimit n = straightening_limit(frame_of("parabolic_aut_pos"), 0.0, 0.5, grid);
  EXPECT_EQ(straightening_equivalence(c, n).status, FitStatus::NoFit);
  EXPECT_EQ(straightening_equivalence(n, c).status, FitStatus::NoFit);
  EXPECT_EQ(straightening_equivalence(c, c).status, FitStatus::Fitted);
  const StraighteningLimit other =
      straightening_limit(frame_of("parabolic_zero"), 0.1, 0.5, default_grid(0.1, 0.5));
  EXPECT_THROW(straightening_equivalence(c, other), ConstraintError);
}

TEST(Straightening, CollapsedPairIsReported) {
  // z^2 identifies 0.5 and -0.5 after one step.
  const DynamicsFrame fr = frame_of("square");
  const StraighteningRecord r = straightened_iterate(fr, 0.5, -0.5, 1, {Complex(0.1, 0.2)});
  EXPECT_TRUE(r.collapsed);
  EXPECT_EQ(r.ref_value, 0.0);
  EXPECT_THROW(straightened_iterate(fr, 0.3, 0.3, 1, {}), ConstraintError);
}

TEST(Straightening, HorizonTruncatesHyperbolicOrbits) {
  const DynamicsFrame fr = frame_of("hyperbolic_2");
  EXPECT_THROW(straightened_iterate(fr, 0.0, 0.5, 200, {}), OverflowError);
}
