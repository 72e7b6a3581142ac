#pragma once

// Text form of MapExpr.
//
//   map   = term { "." term }        f . g is f o g (g applies first)
//   term  = atom [ "^" nat ]
//   atom  = prim | "(" map ")"
//   prim  = "cayley" | "invcayley" | "rot(" real ")"
//         | "diskaut(" real ";" complex ")"
//         | "hshift(" complex ")" | "hscale(" real ")" | "hnudge(" complex ")"
//         | "blaschke(" real { ";(" complex "," nat ")" } ")"
//
// Complex literals are a, bi or a+bi / a-bi with decimal reals (optional
// exponent). Chains fold to the right: f . g . h is Compose(f, Compose(g, h)).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "heins_lab/errors.hpp"
#include "heins_lab/map_expr.hpp"

namespace heins_lab {

namespace detail {

class MapParser {
 public:
  explicit MapParser(std::string_view text) : s_(text) {}

  MapExpr parse_all() {
    MapExpr m = parse_map();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input", "'.' or end");
    return m;
  }

  Complex parse_complex_all() {
    skip_ws();
    const Complex c = complex_literal();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input", "end");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& message, const std::string& expected,
                         std::size_t at) const {
    throw ParseError(std::min(at, s_.size()), message, expected);
  }
  [[noreturn]] void fail(const std::string& message,
                         const std::string& expected) const {
    fail(message, expected, pos_);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' ||
                         s_[pos_] == '\n' || s_[pos_] == '\r')) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'", std::string(1, c));
    ++pos_;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  MapExpr parse_map() {
    std::vector<MapExpr> terms;
    std::vector<std::size_t> dots;
    terms.push_back(parse_term());
    for (;;) {
      skip_ws();
      if (peek() != '.') break;
      dots.push_back(pos_);
      ++pos_;
      terms.push_back(parse_term());
    }
    MapExpr acc = terms.back();
    for (std::size_t k = terms.size() - 1; k-- > 0;) {
      if (terms[k].domain() != acc.codomain()) {
        fail("type error: " + std::string(model_name(acc.codomain())) +
                 " != " + std::string(model_name(terms[k].domain())) +
                 " at composition",
             "", dots[k]);
      }
      acc = MapExpr::compose(terms[k], acc);
    }
    return acc;
  }

  MapExpr parse_term() {
    MapExpr atom = parse_atom();
    skip_ws();
    if (peek() == '^') {
      const std::size_t caret = pos_;
      ++pos_;
      skip_ws();
      const std::size_t at = pos_;
      const long long n = natural();
      if (n < 1) fail("constraint iterate: n >= 1 violated", "", at);
      if (!atom.is_endo()) {
        fail("type error: cannot iterate a map from " +
                 std::string(model_name(atom.domain())) + " to " +
                 std::string(model_name(atom.codomain())),
             "", caret);
      }
      return MapExpr::iterate(atom, static_cast<int>(n));
    }
    return atom;
  }

  MapExpr parse_atom() {
    skip_ws();
    if (peek() == '(') {
      if (++depth_ > kMaxDepth) fail("nesting too deep", "");
      ++pos_;
      MapExpr m = parse_map();
      expect(')');
      --depth_;
      return m;
    }
    const std::size_t start = pos_;
    while (!at_end() && s_[pos_] >= 'a' && s_[pos_] <= 'z') ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name.empty()) fail("expected a map", "primitive name or '('");
    try {
      return primitive(name, start);
    } catch (const ConstraintError& e) {
      fail(e.what(), "", start);
    }
  }

  MapExpr primitive(std::string_view name, std::size_t start) {
    if (name == "cayley") return maps::cayley();
    if (name == "invcayley") return maps::invcayley();
    if (name == "rot") {
      expect('(');
      const double a = real();
      expect(')');
      return maps::rot(a);
    }
    if (name == "hscale") {
      expect('(');
      const double a = real();
      expect(')');
      return maps::hscale(a);
    }
    if (name == "hshift" || name == "hnudge") {
      expect('(');
      const Complex c = complex_literal();
      expect(')');
      return name == "hshift" ? maps::hshift(c) : maps::hnudge(c);
    }
    if (name == "diskaut") {
      expect('(');
      const double angle = real();
      expect(';');
      const Complex a = complex_literal();
      expect(')');
      return maps::diskaut(angle, a);
    }
    if (name == "blaschke") {
      expect('(');
      const double angle = real();
      std::vector<prim::BlaschkeFactor> factors;
      for (;;) {
        skip_ws();
        if (peek() != ';') break;
        ++pos_;
        expect('(');
        const Complex zero = complex_literal();
        expect(',');
        skip_ws();
        const std::size_t at = pos_;
        const long long m = natural();
        if (m < 1) fail("constraint blaschke: m_k >= 1 violated", "", at);
        factors.push_back({zero, static_cast<int>(m)});
        expect(')');
      }
      expect(')');
      return maps::blaschke(angle, std::move(factors));
    }
    fail("unknown primitive '" + std::string(name) + "'",
         "cayley, invcayley, rot, diskaut, hshift, hscale, hnudge, blaschke",
         start);
  }

  long long natural() {
    constexpr long long kMax = 1'000'000;
    const std::size_t start = pos_;
    long long n = 0;
    while (!at_end() && is_digit(s_[pos_])) {
      n = n * 10 + (s_[pos_] - '0');
      if (n > kMax) fail("natural number too large (max 1000000)", "", start);
      ++pos_;
    }
    if (pos_ == start) fail("expected a natural number", "digits");
    return n;
  }

  // [sign] digits [. digits] [e [sign] digits]; no whitespace inside.
  double number(bool allow_sign) {
    const std::size_t start = pos_;
    if (allow_sign && (peek() == '+' || peek() == '-')) ++pos_;
    const std::size_t digits_start = pos_;
    while (!at_end() && is_digit(s_[pos_])) ++pos_;
    if (pos_ == digits_start) fail("expected a number", "digits");
    if (peek() == '.' && pos_ + 1 < s_.size() && is_digit(s_[pos_ + 1])) {
      ++pos_;
      while (!at_end() && is_digit(s_[pos_])) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && is_digit(s_[p])) {
        pos_ = p;
        while (!at_end() && is_digit(s_[pos_])) ++pos_;
      }
    }
    std::string_view lexeme = s_.substr(start, pos_ - start);
    if (!lexeme.empty() && lexeme.front() == '+') lexeme.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size() ||
        !std::isfinite(value)) {
      fail("number out of range", "finite decimal", start);
    }
    return value;
  }

  double real() {
    skip_ws();
    return number(true);
  }

  Complex complex_literal() {
    skip_ws();
    const double first = number(true);
    if (peek() == 'i') {
      ++pos_;
      return {0.0, first};
    }
    if (peek() == '+' || peek() == '-') {
      const bool negative = peek() == '-';
      ++pos_;
      const double second = number(false);
      if (peek() != 'i') fail("expected 'i' after imaginary part", "i");
      ++pos_;
      return {first, negative ? -second : second};
    }
    return {first, 0.0};
  }

  static constexpr int kMaxDepth = 256;

  std::string_view s_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// Shortest round-trip digits; -0 prints as 0.
inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the map DSL; throws ParseError (syntax, type and constraint
/// errors alike) with the byte offset of the problem.
inline MapExpr parse_map(std::string_view text) {
  return detail::MapParser(text).parse_all();
}

/// Parses a single complex literal such as "0.3-1i".
inline Complex parse_complex(std::string_view text) {
  return detail::MapParser(text).parse_complex_all();
}

/// Canonical literal: both parts, shortest round-trip digits ("1+0i").
inline std::string format_complex(Complex c) {
  std::string s = detail::format_real(c.real());
  s += c.imag() < 0.0 ? '-' : '+';
  s += detail::format_real(std::abs(c.imag()));
  s += 'i';
  return s;
}

inline std::string format_map(const MapExpr& m) {
  using detail::format_real;
  switch (m.kind()) {
    case MapExpr::Kind::Primitive:
      return std::visit(
          detail::Overloaded{
              [](const prim::Cayley&) { return std::string("cayley"); },
              [](const prim::InvCayley&) { return std::string("invcayley"); },
              [](const prim::Rot& r) { return "rot(" + format_real(r.angle) + ")"; },
              [](const prim::DiskAut& g) {
                return "diskaut(" + format_real(g.angle) + ";" +
                       format_complex(g.a) + ")";
              },
              [](const prim::HShift& s) {
                return "hshift(" + format_complex(s.b) + ")";
              },
              [](const prim::HScale& s) {
                return "hscale(" + format_real(s.a) + ")";
              },
              [](const prim::HNudge& n) {
                return "hnudge(" + format_complex(n.c) + ")";
              },
              [](const prim::Blaschke& b) {
                std::string s = "blaschke(" + format_real(b.angle);
                for (const auto& f : b.factors) {
                  s += ";(" + format_complex(f.zero) + "," +
                       std::to_string(f.multiplicity) + ")";
                }
                return s + ")";
              },
          },
          m.primitive());
    case MapExpr::Kind::Compose: {
      std::string outer = format_map(m.outer());
      if (m.outer().kind() == MapExpr::Kind::Compose) outer = "(" + outer + ")";
      return outer + " . " + format_map(m.inner());
    }
    case MapExpr::Kind::Iterate: {
      std::string base = format_map(m.base());
      if (m.base().kind() != MapExpr::Kind::Primitive) base = "(" + base + ")";
      return base + "^" + std::to_string(m.count());
    }
  }
  return {};
}

}  // namespace heins_lab
