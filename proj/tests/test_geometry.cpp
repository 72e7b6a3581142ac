#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "heins_lab/geometry.hpp"

using namespace heins_lab;

namespace {

const Complex I(0.0, 1.0);

// Independent oracles: the logarithmic form of atanh and the textbook
// pseudo-hyperbolic quotients.
double atanh_log(double t) { return 0.5 * std::log((1.0 + t) / (1.0 - t)); }

double disk_oracle(Complex a, Complex b) {
  return atanh_log(std::abs((b - a) / (1.0 - std::conj(a) * b)));
}

double half_plane_oracle(Complex a, Complex b) {
  return atanh_log(std::abs((b - a) / (b - std::conj(a))));
}

Complex psi(Complex z) { return I * (1.0 + z) / (1.0 - z); }
Complex psi_inv(Complex w) { return (w - I) / (w + I); }

Complex random_disk(std::mt19937_64& rng, double r = 0.95) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(r * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

Complex random_half(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-5.0, 5.0), lg(-2.0, 2.0);
  return {re(rng), std::pow(10.0, lg(rng))};
}

double dist(DiskPoint a, DiskPoint b) { return poincare_disk(a, b).value(); }

}  // namespace

TEST(Geometry, DiskDistanceValues) {
  EXPECT_EQ(dist(DiskPoint(0.0), DiskPoint(0.0)), 0.0);
  EXPECT_NEAR(dist(DiskPoint(0.0), DiskPoint(0.5)), 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(dist(DiskPoint(0.0), DiskPoint(0.5)), 0.5493061443, 1e-10);
}

TEST(Geometry, DiskDistanceFromOriginIsAtanhModulus) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const Complex z = random_disk(rng);
    EXPECT_NEAR(dist(DiskPoint(0.0), DiskPoint(z)), atanh_log(std::abs(z)), 1e-13);
  }
}

TEST(Geometry, DiskDistanceMetricAxioms) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const Complex a = random_disk(rng), b = random_disk(rng), c = random_disk(rng);
    const double ab = dist(DiskPoint(a), DiskPoint(b));
    EXPECT_DOUBLE_EQ(ab, dist(DiskPoint(b), DiskPoint(a)));
    EXPECT_GT(ab, 0.0);
    EXPECT_NEAR(ab, disk_oracle(a, b), 1e-12 * std::max(1.0, ab));
    EXPECT_LE(ab, dist(DiskPoint(a), DiskPoint(c)) + dist(DiskPoint(c), DiskPoint(b)) +
                      1e-12);
  }
}

TEST(Geometry, DiskDistanceNearBoundaryKeepsPrecision) {
  // 1 - |z| = 1e-12: the naive 1 - |z|^2 loses most digits.
  const double r = 1.0 - 1e-12;
  const double expect = 0.5 * std::log((2.0 - 1e-12) / 1e-12);
  EXPECT_NEAR(dist(DiskPoint(0.0), DiskPoint(r)), expect, 1e-3);
}

TEST(Geometry, HalfPlaneDistanceValues) {
  const auto d = [](Complex a, Complex b) {
    return poincare_halfplane(HalfPlanePoint(a), HalfPlanePoint(b)).value();
  };
  EXPECT_EQ(d(I, I), 0.0);
  EXPECT_NEAR(d(I, 2.0 * I), 0.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(d(I, 1.0 + I), std::atanh(1.0 / std::sqrt(5.0)), 1e-15);
}

TEST(Geometry, HalfPlaneDistanceMatchesDiskThroughCayley) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Complex a = random_half(rng), b = random_half(rng);
    const double h = poincare_halfplane(HalfPlanePoint(a), HalfPlanePoint(b)).value();
    EXPECT_NEAR(h, half_plane_oracle(a, b), 1e-12 * std::max(1.0, h));
    const double dd = disk_oracle(psi_inv(a), psi_inv(b));
    EXPECT_NEAR(h, dd, 1e-9 * std::max(1.0, h));
  }
}

TEST(Geometry, RuntimePointDistanceRejectsMixedModels) {
  EXPECT_THROW(poincare(Point(Model::Disk, 0.0), Point(Model::HalfPlane, I)), TypeError);
  EXPECT_NEAR(poincare(Point(Model::HalfPlane, I), Point(Model::HalfPlane, 2.0 * I)).value(),
              0.5 * std::log(2.0), 1e-15);
}

TEST(Geometry, PointsOutsideTheModelAreRejected) {
  EXPECT_THROW(DiskPoint(1.0), DomainError);
  EXPECT_THROW(DiskPoint(Complex(0.8, 0.7)), DomainError);
  EXPECT_THROW(HalfPlanePoint(1.0), DomainError);
  EXPECT_THROW(HalfPlanePoint(Complex(0.0, -1.0)), DomainError);
  EXPECT_THROW(DiskPoint(Complex(NAN, 0.0)), DomainError);
  EXPECT_THROW(Point(Model::HalfPlane, Complex(3.0, 0.0)), DomainError);
  EXPECT_THROW(Point(Model::Disk, 0.5).as<Model::HalfPlane>(), TypeError);
}

TEST(Geometry, CayleyValues) {
  EXPECT_NEAR(std::abs(cayley(DiskPoint(0.0)).coordinate() - I), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(cayley(DiskPoint(0.5)).coordinate() - 3.0 * I), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cayley_inverse(HalfPlanePoint(I)).coordinate()), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(cayley_inverse(HalfPlanePoint(1.0 + I)).coordinate() -
                       Complex(0.2, -0.4)),
              0.0, 1e-15);
}

TEST(Geometry, CayleyRoundTripAndCodomain) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Complex z = random_disk(rng);
    const Complex w = cayley(DiskPoint(z)).coordinate();
    EXPECT_NEAR(std::abs(w - psi(z)), 0.0, 1e-12 * std::abs(w));
    EXPECT_NEAR(std::abs(cayley_inverse(HalfPlanePoint(w)).coordinate() - z), 0.0, 1e-14);
  }
  for (int k = 0; k < 1000; ++k) {
    EXPECT_LT(std::abs(cayley_inverse(HalfPlanePoint(random_half(rng))).coordinate()), 1.0);
  }
}

TEST(Geometry, DiskAutomorphismBasics) {
  const DiskAut id = DiskAut::identity();
  EXPECT_EQ(id(Complex(0.3, -0.2)), Complex(0.3, -0.2));
  const DiskAut g(0.0, 0.3);
  EXPECT_NEAR(std::abs(g(0.0) - 0.3), 0.0, 1e-16);
  EXPECT_THROW(DiskAut(0.0, 1.0), DomainError);
  const DiskAut inv = aut_inverse(g);
  EXPECT_NEAR(std::abs(inv(0.3)), 0.0, 1e-16);
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.5, 0.4), Complex(0.0, -0.9)}) {
    EXPECT_NEAR(std::abs(inv(g(z)) - z), 0.0, 1e-14);
  }
  const DiskAut t = aut_sending_center_to(DiskPoint(0.5));
  EXPECT_NEAR(std::abs(t(0.0) - 0.5), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(t(0.2) - (0.2 + 0.5) / (1.0 + 0.1)), 0.0, 1e-15);
  EXPECT_EQ(aut_sending_center_to(DiskPoint(0.0))(Complex(0.4, 0.1)), Complex(0.4, 0.1));
}

TEST(Geometry, HalfPlaneAutomorphismBasics) {
  const HalfPlaneAut s(std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(std::abs(s(I) - 2.0 * I), 0.0, 1e-15);
  const HalfPlaneAut t = aut_sending_center_to(HalfPlanePoint(3.0 + 2.0 * I));
  EXPECT_NEAR(std::abs(t(I) - (3.0 + 2.0 * I)), 0.0, 1e-15);
  EXPECT_NEAR(t.alpha() * t.delta() - t.beta() * t.gamma(), 1.0, 1e-15);
  EXPECT_THROW(HalfPlaneAut(0.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_NEAR(std::abs(aut_inverse(t)(3.0 + 2.0 * I) - I), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(aut_apply(t, HalfPlanePoint(I)).coordinate() - (3.0 + 2.0 * I)), 0.0,
              1e-15);
}

TEST(Geometry, CompositionMatchesPointwise) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const DiskAut g(ang(rng), random_disk(rng, 0.9)), h(ang(rng), random_disk(rng, 0.9));
    const DiskAut gh = aut_compose(g, h);
    const Complex z = random_disk(rng, 0.9);
    EXPECT_NEAR(std::abs(gh(z) - g(h(z))), 0.0, 1e-12);
    const HalfPlaneAut G = conjugate_to_half_plane(g);
    const Complex w = psi(z);
    EXPECT_NEAR(std::abs(psi_inv(G(w)) - g(z)), 0.0, 1e-9);
  }
}

TEST(Geometry, AutomorphismsAreIsometries) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  for (int k = 0; k < 300; ++k) {
    const DiskAut g(ang(rng), random_disk(rng, 0.8));
    const Complex a = random_disk(rng, 0.8), b = random_disk(rng, 0.8);
    const double before = disk_oracle(a, b);
    EXPECT_NEAR(dist(aut_apply(g, DiskPoint(a)), aut_apply(g, DiskPoint(b))), before,
                1e-11 * std::max(1.0, before));
  }
}

TEST(Geometry, ThreePointFitRecoversIdentityAndRotation) {
  const std::array<DiskPoint, 3> src{DiskPoint(0.0), DiskPoint(0.5), DiskPoint(-0.5 * I)};
  const AutFit id = disk_aut_through_three_points(src, src);
  ASSERT_EQ(id.status, FitStatus::Fitted);
  EXPECT_LT(std::abs(id.aut->center()), 1e-12);
  EXPECT_LT(std::abs(std::remainder(id.aut->angle(), 2.0 * std::numbers::pi)), 1e-12);

  const double th = std::numbers::pi / 3.0;
  const Complex e = std::polar(1.0, th);
  const std::array<DiskPoint, 3> s2{DiskPoint(0.0), DiskPoint(0.5), DiskPoint(-0.5)};
  const std::array<DiskPoint, 3> d2{DiskPoint(0.0), DiskPoint(0.5 * e), DiskPoint(-0.5 * e)};
  const AutFit rot = disk_aut_through_three_points(s2, d2);
  ASSERT_EQ(rot.status, FitStatus::Fitted);
  EXPECT_NEAR(rot.aut->angle(), th, 1e-12);
  EXPECT_LT(std::abs(rot.aut->center()), 1e-12);
}

TEST(Geometry, ThreePointFitRecoversRandomAutomorphisms) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const DiskAut g(ang(rng), random_disk(rng, 0.7));
    std::array<DiskPoint, 3> src{DiskPoint(random_disk(rng, 0.6)),
                                 DiskPoint(random_disk(rng, 0.6)),
                                 DiskPoint(random_disk(rng, 0.6))};
    std::array<DiskPoint, 3> dst{aut_apply(g, src[0]), aut_apply(g, src[1]),
                                 aut_apply(g, src[2])};
    const AutFit fit = disk_aut_through_three_points(src, dst);
    ASSERT_EQ(fit.status, FitStatus::Fitted);
    const Complex z = random_disk(rng, 0.9);
    EXPECT_NEAR(std::abs((*fit.aut)(z) - g(z)), 0.0, 1e-8);
  }
}

TEST(Geometry, ThreePointFitRejectsNonAutomorphicData) {
  const std::array<DiskPoint, 3> src{DiskPoint(0.1), DiskPoint(0.5), DiskPoint(-0.5 * I)};
  const auto sq = [](const DiskPoint& p) { return DiskPoint(p.coordinate() * p.coordinate()); };
  const std::array<DiskPoint, 3> dst{sq(src[0]), sq(src[1]), sq(src[2])};
  EXPECT_EQ(disk_aut_through_three_points(src, dst).status, FitStatus::NoFit);
  const std::array<DiskPoint, 3> rep{DiskPoint(0.1), DiskPoint(0.1), DiskPoint(0.2)};
  EXPECT_EQ(disk_aut_through_three_points(rep, src).status, FitStatus::Degenerate);
}
