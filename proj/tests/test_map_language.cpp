#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "heins_lab/eval.hpp"
#include "heins_lab/map_expr.hpp"
#include "heins_lab/map_parser.hpp"

using namespace heins_lab;

namespace {

const Complex I(0.0, 1.0);

std::size_t offset_of(const std::string& text) {
  try {
    (void)parse_map(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "'" << text << "' parsed";
  return std::string::npos;
}

std::string message_of(const std::string& text) {
  try {
    (void)parse_map(text);
  } catch (const ParseError& e) {
    return e.message();
  }
  return {};
}

Point disk(Complex z) { return Point(Model::Disk, z); }
Point half(Complex w) { return Point(Model::HalfPlane, w); }

}  // namespace

TEST(Parser, Primitives) {
  const MapExpr m = parse_map("hshift(1+0i)");
  EXPECT_EQ(m, maps::hshift(1.0));
  EXPECT_EQ(parse_map("hshift(1)"), maps::hshift(1.0));
  EXPECT_EQ(parse_map("hshift(2i)"), maps::hshift(2.0 * I));
  EXPECT_EQ(parse_map("rot(-1.5e-1)"), maps::rot(-0.15));
  EXPECT_EQ(parse_map("diskaut(0.5;0.1-0.2i)"), maps::diskaut(0.5, Complex(0.1, -0.2)));
  EXPECT_EQ(parse_map("blaschke(0;(0+0i,2))"), maps::blaschke(0.0, {{0.0, 2}}));
  EXPECT_EQ(parse_map("  hscale( 2 )  "), maps::hscale(2.0));
}

TEST(Parser, CompositionIsTyped) {
  const MapExpr m = parse_map("invcayley . hshift(1) . cayley");
  EXPECT_EQ(m.domain(), Model::Disk);
  EXPECT_EQ(m.codomain(), Model::Disk);
  EXPECT_EQ(m, maps::chain({maps::invcayley(), maps::hshift(1.0), maps::cayley()}));
  EXPECT_EQ(parse_map("cayley").codomain(), Model::HalfPlane);
  EXPECT_EQ(parse_map("(rot(1) . rot(2))^3").kind(), MapExpr::Kind::Iterate);
}

TEST(Parser, TypeErrorsCarryOffsets) {
  EXPECT_EQ(offset_of("cayley . cayley"), 7u);
  EXPECT_NE(message_of("cayley . cayley").find("type error"), std::string::npos);
  EXPECT_EQ(offset_of("invcayley . rot(1)"), 10u);
  EXPECT_EQ(offset_of("rot(1) . cayley"), 7u);
  EXPECT_EQ(offset_of("(hshift(1) . invcayley)"), 11u);
  EXPECT_EQ(offset_of("cayley^2"), 6u);
}

TEST(Parser, SyntaxAndConstraintErrors) {
  EXPECT_EQ(offset_of("rot(x)"), 4u);
  EXPECT_EQ(offset_of(""), 0u);
  EXPECT_EQ(offset_of("rot(1"), 5u);
  EXPECT_EQ(offset_of("rot(1) junk"), 7u);
  EXPECT_EQ(offset_of("spin(1)"), 0u);
  EXPECT_EQ(offset_of("hshift(0-1i)"), 0u);
  EXPECT_NE(message_of("hshift(0-1i)").find("Im b >= 0"), std::string::npos);
  EXPECT_NE(message_of("hscale(0)").find("hscale: a > 0"), std::string::npos);
  EXPECT_NE(message_of("diskaut(0;1+0i)").find("|a| < 1"), std::string::npos);
  EXPECT_NE(message_of("blaschke(0;(2+0i,1))").find("|a_k| < 1"), std::string::npos);
  EXPECT_NE(message_of("hshift(0)").find("b != 0"), std::string::npos);
  EXPECT_EQ(offset_of("rot(1)^0"), 7u);
}

TEST(Parser, FormatIsCanonicalAndRoundTrips) {
  EXPECT_EQ(format_map(maps::hshift(1.0)), "hshift(1+0i)");
  EXPECT_EQ(format_complex(Complex(0.5, -2.0)), "0.5-2i");
  const char* texts[] = {
      "invcayley . hshift(1+0i) . cayley",
      "blaschke(0.25;(0.1-0.2i,1);(0+0i,3))",
      "(invcayley . hnudge(1+0i) . cayley)^3 . rot(0.1)",
      "diskaut(-1;0.3+0.3i)",
      "invcayley . (hscale(2) . hshift(0+1i)) . cayley",
  };
  for (const char* t : texts) {
    const MapExpr m = parse_map(t);
    EXPECT_EQ(parse_map(format_map(m)), m) << t;
    EXPECT_EQ(format_map(parse_map(format_map(m))), format_map(m)) << t;
  }
}

TEST(Parser, ComplexLiterals) {
  EXPECT_EQ(parse_complex("0.3-1i"), Complex(0.3, -1.0));
  EXPECT_EQ(parse_complex("-2"), Complex(-2.0, 0.0));
  EXPECT_EQ(parse_complex("1e-3i"), Complex(0.0, 1e-3));
  EXPECT_THROW(parse_complex("1+i"), ParseError);
}

TEST(Parser, MalformedInputNeverEscapesAsOtherExceptions) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcilnorstuyhkdgep()^.;,+-0123456789ei ";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 40);
  for (int k = 0; k < 20000; ++k) {
    std::string s;
    for (std::size_t n = len(rng); n > 0; --n) s += alphabet[pick(rng)];
    try {
      (void)parse_map(s);
    } catch (const ParseError& e) {
      EXPECT_LE(e.offset(), s.size());
    }
  }
  EXPECT_THROW(parse_map(std::string(1000, '(') + "rot(1)" + std::string(1000, ')')),
               ParseError);
}

TEST(Eval, PrimitiveValues) {
  EXPECT_EQ(eval(maps::hshift(1.0), half(I)).coordinate(), 1.0 + I);
  EXPECT_NEAR(std::abs(eval(parse_map("invcayley . hshift(1) . cayley"), disk(0.0))
                           .coordinate() -
                       Complex(0.2, -0.4)),
              0.0, 1e-15);
  const MapExpr id = maps::blaschke(0.0, {{0.0, 1}});
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.7, 0.1), Complex(0.0, 0.99)}) {
    EXPECT_NEAR(std::abs(eval(id, disk(z)).coordinate() - z), 0.0, 1e-16);
  }
  const Complex w(0.3, 2.0);
  EXPECT_NEAR(std::abs(eval(maps::hnudge(1.0), half(w)).coordinate() -
                       (w + 1.0 - 1.0 / (w + I))),
              0.0, 1e-15);
  const Complex a(0.3, -0.1), z(0.2, 0.5);
  EXPECT_NEAR(std::abs(eval(maps::diskaut(1.0, a), disk(z)).coordinate() -
                       std::polar(1.0, 1.0) * (z + a) / (1.0 + std::conj(a) * z)),
              0.0, 1e-15);
}

TEST(Eval, ModelMismatchAndDomainErrors) {
  EXPECT_THROW(eval(maps::hshift(1.0), disk(0.0)), TypeError);
  EXPECT_THROW(MapExpr::compose(maps::cayley(), maps::cayley()), TypeError);
  EXPECT_THROW(MapExpr::iterate(maps::cayley(), 2), TypeError);
  EXPECT_THROW(maps::hscale(-1.0), ConstraintError);
}

TEST(Eval, NonFiniteIntermediateNamesThePath) {
  // Overflow inside the scale: 1e308 * 1e10 = inf.
  const MapExpr m = parse_map("hscale(1e10) . hshift(1e308+1i)");
  try {
    (void)eval(m, half(I));
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_FALSE(e.path().empty());
    EXPECT_EQ(e.path().front(), '$');
  }
}

TEST(Eval, DerivativesMatchClosedFormsAndDifferences) {
  EXPECT_EQ(deriv(maps::hshift(Complex(2.0, 3.0)), half(I)), Complex(1.0, 0.0));
  EXPECT_EQ(deriv(maps::hscale(2.0), half(Complex(1.0, 4.0))), Complex(2.0, 0.0));
  const char* texts[] = {
      "invcayley . hnudge(1+0i) . cayley",
      "blaschke(0.3;(0.2-0.1i,2);(0.5+0i,1))",
      "diskaut(1;0.2+0.4i) . rot(0.3)",
      "(invcayley . hscale(3) . cayley)^2",
  };
  const Complex z(0.12, -0.21);
  const double h = 1e-6;
  for (const char* t : texts) {
    const MapExpr m = parse_map(t);
    const CompiledMap f(m);
    const Complex fd = (f(z + h) - f(z - h)) / (2.0 * h);
    const Complex fdi = (f(z + h * I) - f(z - h * I)) / (2.0 * h * I);
    const Complex d = deriv(m, disk(z));
    EXPECT_NEAR(std::abs(d - fd), 0.0, 1e-7 * std::max(1.0, std::abs(d))) << t;
    EXPECT_NEAR(std::abs(d - fdi), 0.0, 1e-7 * std::max(1.0, std::abs(d))) << t;
  }
}

TEST(Eval, IterationClosedForms) {
  EXPECT_EQ(iterate_eval(maps::hshift(1.0), half(I), 3).coordinate(), 3.0 + I);
  EXPECT_EQ(iterate_eval(maps::hshift(1.0), half(I), 0).coordinate(), I);
  const MapExpr square = parse_map("blaschke(0;(0+0i,2))");
  EXPECT_NEAR(iterate_eval(square, disk(0.5), 4).coordinate().real(), std::pow(0.5, 16),
              1e-20);
  EXPECT_THROW(iterate_eval(maps::hscale(1e100), half(I), 10), OverflowError);
  // An Iterate node evaluates like repeated application.
  const MapExpr g = parse_map("diskaut(0.4;0.1+0.2i)");
  const Complex once = iterate_eval(g, disk(0.3), 5).coordinate();
  const Complex node = eval(MapExpr::iterate(g, 5), disk(0.3)).coordinate();
  EXPECT_NEAR(std::abs(once - node), 0.0, 1e-14);
}

TEST(Eval, CompiledProgramAgreesWithTreeEvaluation) {
  // Folding Cayley pairs must not change values.
  const MapExpr m = parse_map("invcayley . hshift(1) . cayley . invcayley . hscale(2) . cayley");
  const CompiledMap f(m);
  EXPECT_LT(f.program_size(), 6u);
  const Complex z(0.3, -0.4);
  Complex ref = z;
  const auto psi = [](Complex x) { return I * (1.0 + x) / (1.0 - x); };
  const auto psi_inv = [](Complex w) { return (w - I) / (w + I); };
  ref = psi_inv(2.0 * psi(ref));
  ref = psi_inv(psi(ref) + 1.0);
  EXPECT_NEAR(std::abs(f(z) - ref), 0.0, 1e-14);
}

TEST(Simplify, CancelsCayleyPairsAndTrivialRotations) {
  const MapExpr m = parse_map("invcayley . cayley . rot(6.283185307179586) . rot(1) . rot(2)");
  const MapExpr s = simplify(m);
  EXPECT_EQ(s, maps::rot(3.0));
  EXPECT_EQ(simplify(parse_map("invcayley . cayley")), maps::rot(0.0));
  EXPECT_EQ(simplify(parse_map("cayley . invcayley")), maps::hscale(1.0));
  EXPECT_EQ(simplify(parse_map("cayley . rot(0) . invcayley . hshift(1)")), maps::hshift(1.0));
}
