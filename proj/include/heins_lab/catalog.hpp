#pragma once

// Built-in maps with closed-form ground truth.

#include <fnmatch.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heins_lab/dynamics.hpp"
#include "heins_lab/errors.hpp"
#include "heins_lab/map_parser.hpp"

namespace heins_lab {

struct CatalogEntry {
  std::string name;
  std::string dsl;
  MapClass expected_class = MapClass::Undecided;
  std::optional<StepClass> expected_step;
  std::optional<double> expected_lambda;
  /// Limit of arg F^n(w) in half-plane coordinates.
  std::optional<double> expected_arg;
  /// Limit of the disk slope (f^n(z) - tau) / |f^n(z) - tau|.
  std::optional<Complex> expected_slope;
  /// Exact d_N at the probe z = 0, when known in closed form.
  double (*step_tail_at_origin)(std::size_t n) = nullptr;
  double step_tail_tol = 0.0;
  std::string note;
};

namespace detail {

inline double translation_step(std::size_t) {
  return std::atanh(1.0 / std::sqrt(5.0));
}
inline double vertical_step(std::size_t n) {
  return std::atanh(1.0 / (2.0 * static_cast<double>(n) + 3.0));
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    constexpr double pi = std::numbers::pi;
    const Complex i(0.0, 1.0);
    std::vector<CatalogEntry> e;
    e.push_back({"elliptic_rot", "rot(2)", MapClass::Elliptic, std::nullopt,
                 std::nullopt, std::nullopt, std::nullopt, nullptr, 0.0,
                 "rotation by 2 rad fixes 0 with |f'(0)| = 1; an isometry, so "
                 "every orbit keeps a constant step"});
    e.push_back({"square", "blaschke(0;(0+0i,2))", MapClass::Elliptic,
                 std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                 nullptr, 0.0,
                 "z^2 fixes 0 with f'(0) = 0; orbits collapse onto 0"});
    e.push_back({"hyperbolic_2", "invcayley . hscale(2) . cayley",
                 MapClass::Hyperbolic, std::nullopt, 0.5, std::nullopt,
                 std::nullopt, nullptr, 0.0,
                 "F(w) = 2w has F'(inf) = 2, so the disk multiplier at tau = 1 "
                 "is 1/2"});
    e.push_back({"hyperbolic_nonaut",
                 "invcayley . hnudge(0+0i) . hscale(2) . cayley",
                 MapClass::Hyperbolic, std::nullopt, 0.5, std::nullopt,
                 std::nullopt, nullptr, 0.0,
                 "F(w) = 2w - 1/(2w + i); F(w)/w -> 2, multiplier 1/2, not an "
                 "automorphism"});
    e.push_back({"parabolic_aut_pos", "invcayley . hshift(1+0i) . cayley",
                 MapClass::Parabolic, StepClass::Positive, 1.0, 0.0, -i,
                 &detail::translation_step, 1e-6,
                 "F(w) = w + 1; from w = i the step is atanh(1/sqrt 5) for "
                 "every n, arg F^n -> 0 and the disk slope -> -i"});
    e.push_back({"parabolic_pos_nonaut", "invcayley . hnudge(1+0i) . cayley",
                 MapClass::Parabolic, StepClass::Positive, 1.0, 0.0, -i,
                 nullptr, 0.0,
                 "F(w) = w + 1 - 1/(w + i); Im F^n(w) increases to a finite "
                 "L, Re grows like n, so the step tends to atanh(1/|2iL + 1|) "
                 "> 0 and arg -> 0"});
    e.push_back({"parabolic_zero", "invcayley . hshift(0+1i) . cayley",
                 MapClass::Parabolic, StepClass::Zero, 1.0, pi / 2.0,
                 Complex(-1.0, 0.0), &detail::vertical_step, 1e-9,
                 "F(w) = w + i; from w = i, d_n = atanh(1/(2n + 3)) -> 0; "
                 "radial approach, arg = pi/2"});
    e.push_back({"parabolic_zero_slanted", "invcayley . hshift(1+1i) . cayley",
                 MapClass::Parabolic, StepClass::Zero, 1.0, pi / 4.0,
                 -i * std::polar(1.0, -pi / 4.0), nullptr, 0.0,
                 "F(w) = w + 1 + i; w_n = w + n(1 + i), zero step, arg -> "
                 "pi/4 (non-tangential)"});
    e.push_back({"parabolic_zero_mirrored", "invcayley . hshift(-1+0i) . cayley",
                 MapClass::Parabolic, StepClass::Positive, 1.0, pi, i,
                 &detail::translation_step, 1e-6,
                 "F(w) = w - 1; the mirror image of parabolic_aut_pos: an "
                 "automorphism with positive step, arg F^n -> pi, disk slope "
                 "-> +i"});
    return e;
  }();
  return entries;
}

inline const CatalogEntry* find_catalog_entry(std::string_view name,
                                              const std::vector<CatalogEntry>& from =
                                                  catalog()) {
  for (const auto& e : from) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

/// "catalog:<name>" expands to the stored DSL; anything else is returned as is.
inline std::string resolve_map_text(std::string_view text) {
  constexpr std::string_view prefix = "catalog:";
  if (text.substr(0, prefix.size()) != prefix) return std::string(text);
  const std::string_view name = text.substr(prefix.size());
  const CatalogEntry* e = find_catalog_entry(name);
  if (!e) {
    throw ParseError(prefix.size(),
                     "unknown catalog entry '" + std::string(name) + "'",
                     "a name listed by the catalog command");
  }
  return e->dsl;
}

/// Shell-style pattern match ("parabolic_*").
inline bool name_matches(const std::string& pattern, const std::string& name) {
  return ::fnmatch(pattern.c_str(), name.c_str(), 0) == 0;
}

inline std::vector<CatalogEntry> filter_catalog(const std::vector<CatalogEntry>& in,
                                                const std::string& pattern) {
  std::vector<CatalogEntry> out;
  for (const auto& e : in) {
    if (pattern.empty() || name_matches(pattern, e.name)) out.push_back(e);
  }
  return out;
}

}  // namespace heins_lab
