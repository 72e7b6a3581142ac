// Randomized invariants. Every case is seeded, so failures reproduce.

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "heins_lab/dynamics.hpp"
#include "heins_lab/eval.hpp"
#include "heins_lab/geometry.hpp"
#include "heins_lab/map_parser.hpp"

using namespace heins_lab;

namespace {

const Complex I(0.0, 1.0);

double atanh_log(double t) { return 0.5 * std::log((1.0 + t) / (1.0 - t)); }

double disk_oracle(Complex a, Complex b) {
  return atanh_log(std::abs((b - a) / (1.0 - std::conj(a) * b)));
}

double half_oracle(Complex a, Complex b) {
  return atanh_log(std::abs((b - a) / (b - std::conj(a))));
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Complex disk(double r = 0.9) {
    return std::polar(r * std::sqrt(uniform(0.0, 1.0)), uniform(-3.14, 3.14));
  }
  Complex upper() { return {uniform(-4.0, 4.0), std::pow(10.0, uniform(-1.5, 1.5))}; }

  // Text of a random self-map of the given model, built from the grammar
  // directly rather than through the library's formatter.
  std::string endo_text(Model m, int depth) {
    const int pick = integer(0, depth > 0 ? 5 : 3);
    if (m == Model::Disk) {
      switch (pick) {
        case 0: return "rot(" + num(-3.0, 3.0) + ")";
        case 1: return "diskaut(" + num(-3.0, 3.0) + ";" + cnum(disk(0.8)) + ")";
        case 2: {
          std::string s = "blaschke(" + num(-3.0, 3.0);
          for (int k = integer(1, 3); k > 0; --k) {
            s += ";(" + cnum(disk(0.8)) + "," + std::to_string(integer(1, 3)) + ")";
          }
          return s + ")";
        }
        case 3: return "invcayley . " + endo_text(Model::HalfPlane, depth - 1) + " . cayley";
        case 4: return "(" + endo_text(m, depth - 1) + ") . (" + endo_text(m, depth - 1) + ")";
        default: return "(" + endo_text(m, depth - 1) + ")^" + std::to_string(integer(1, 3));
      }
    }
    switch (pick) {
      case 0: return "hshift(" + cnum({uniform(-2.0, 2.0), uniform(0.0, 2.0) + 0.01}) + ")";
      case 1: return "hscale(" + num(0.2, 3.0) + ")";
      case 2: return "hnudge(" + cnum({uniform(-2.0, 2.0), uniform(0.0, 2.0)}) + ")";
      case 3: return "cayley . " + endo_text(Model::Disk, depth - 1) + " . invcayley";
      case 4: return "(" + endo_text(m, depth - 1) + ") . (" + endo_text(m, depth - 1) + ")";
      default: return "(" + endo_text(m, depth - 1) + ")^" + std::to_string(integer(1, 3));
    }
  }

 private:
  std::string num(double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", uniform(lo, hi));
    return buf;
  }
  std::string cnum(Complex c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", c.real(), c.imag());
    return buf;
  }

  std::mt19937_64 rng_;
};

}  // namespace

// Schwarz-Pick: holomorphic self-maps do not increase the Poincare distance.
TEST(Property, RandomDiskMapsAreContractions) {
  Gen g(101);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const std::string text = g.endo_text(Model::Disk, 2);
    const CompiledMap f(parse_map(text));
    for (int k = 0; k < 5; ++k) {
      const Complex a = g.disk(0.7), b = g.disk(0.7);
      const Complex fa = f(a), fb = f(b);
      if (!(std::abs(fa) < 1.0 - 1e-6 && std::abs(fb) < 1.0 - 1e-6)) continue;
      const double before = disk_oracle(a, b);
      EXPECT_LE(disk_oracle(fa, fb), before + 1e-9 * std::max(1.0, before)) << text;
      ++checked;
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Property, RandomHalfPlaneMapsAreContractions) {
  Gen g(102);
  for (int t = 0; t < 300; ++t) {
    const std::string text = g.endo_text(Model::HalfPlane, 2);
    const CompiledMap f(parse_map(text));
    const Complex a = g.upper(), b = g.upper();
    const Complex fa = f(a), fb = f(b);
    if (!(fa.imag() > 1e-9 && fb.imag() > 1e-9)) continue;
    const double before = half_oracle(a, b);
    EXPECT_LE(half_oracle(fa, fb), before + 1e-8 * std::max(1.0, before)) << text;
  }
}

// Orbit steps are non-increasing along every orbit of a self-map.
TEST(Property, OrbitStepsNeverIncrease) {
  Gen g(103);
  for (int t = 0; t < 60; ++t) {
    const MapExpr m = parse_map(g.endo_text(Model::HalfPlane, 1));
    const OrbitRecord r = orbit(m, Point(Model::HalfPlane, g.upper()), 500);
    // Automorphism orbits may pass arbitrarily close to infinity, where the
    // step itself is no longer representable.
    bool finite = true;
    for (double s : r.step) finite = finite && std::isfinite(s);
    if (!finite) continue;
    EXPECT_LE(r.monotonicity_excess, 1e-12 * std::max(1.0, r.step.front()))
        << format_map(m);
  }
}

TEST(Property, ParserRoundTripOnGeneratedText) {
  Gen g(104);
  for (int t = 0; t < 500; ++t) {
    const Model model = t % 2 ? Model::Disk : Model::HalfPlane;
    const std::string text = g.endo_text(model, 3);
    const MapExpr m = parse_map(text);
    EXPECT_EQ(m.domain(), model);
    const std::string canon = format_map(m);
    EXPECT_EQ(parse_map(canon), m) << text;
    EXPECT_EQ(format_map(parse_map(canon)), canon);
  }
}

TEST(Property, SimplifyAndCompilationPreserveValues) {
  Gen g(105);
  for (int t = 0; t < 300; ++t) {
    const MapExpr m = parse_map(g.endo_text(Model::Disk, 2));
    const CompiledMap a(m), b(simplify(m));
    const Complex z = g.disk(0.6);
    const Complex va = a(z), vb = b(z);
    if (!(std::abs(va) < 1.0 - 1e-6)) continue;
    // Compare in the Poincare metric: values may sit near the circle.
    EXPECT_LT(disk_oracle(va, vb), 1e-6) << format_map(m);
  }
}

TEST(Property, DerivativeMatchesComplexDifference) {
  Gen g(106);
  for (int t = 0; t < 200; ++t) {
    const MapExpr m = parse_map(g.endo_text(Model::Disk, 1));
    const CompiledMap f(m);
    const Complex z = g.disk(0.5);
    const double h = 1e-5;
    const Complex fd = (f(z + h) - f(z - h)) / (2.0 * h);
    const Complex d = f.with_derivative(z).second;
    EXPECT_NEAR(std::abs(d - fd), 0.0, 1e-5 * std::max(1.0, std::abs(d))) << format_map(m);
  }
}

TEST(Property, AutomorphismGroupLaws) {
  Gen g(107);
  for (int t = 0; t < 1000; ++t) {
    const DiskAut a(g.uniform(-3.0, 3.0), g.disk(0.8));
    const DiskAut b(g.uniform(-3.0, 3.0), g.disk(0.8));
    const DiskAut c(g.uniform(-3.0, 3.0), g.disk(0.8));
    const Complex z = g.disk(0.8);
    EXPECT_LT(std::abs(aut_compose(aut_compose(a, b), c)(z) - aut_compose(a, aut_compose(b, c))(z)),
              1e-12);
    EXPECT_LT(std::abs(aut_compose(a, aut_inverse(a))(z) - z), 1e-12);
    const HalfPlaneAut A = conjugate_to_half_plane(a);
    const HalfPlaneAut B = conjugate_to_half_plane(b);
    const Complex w = g.upper();
    const Complex lhs = aut_compose(A, B)(w), rhs = A(B(w));
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Property, TwoPointDistancesContractAlongOrbits) {
  Gen g(108);
  for (int t = 0; t < 40; ++t) {
    const MapExpr m = parse_map(g.endo_text(Model::Disk, 1));
    std::vector<double> d;
    try {
      d = two_point_contraction(m, Point(Model::Disk, g.disk(0.5)),
                                Point(Model::Disk, g.disk(0.5)), 8);
    } catch (const DomainError&) {
      continue;  // an orbit reached the circle in binary64
    }
    for (std::size_t k = 1; k < d.size(); ++k) {
      EXPECT_LE(d[k], d[k - 1] + 1e-8 * std::max(1.0, d[k - 1])) << format_map(m);
    }
  }
}
