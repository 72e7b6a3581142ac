#pragma once

// Acceptance pipeline: per-map checks against catalog ground truth and the
// theorems they instantiate, plus map-independent checks of the geometry and
// the parser. Every check carries the criterion number and invariant name.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ctime>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heins_lab/catalog.hpp"
#include "heins_lab/dynamics.hpp"
#include "heins_lab/geometry.hpp"
#include "heins_lab/map_expr.hpp"
#include "heins_lab/map_parser.hpp"
#include "heins_lab/parallel.hpp"
#include "heins_lab/report.hpp"
#include "heins_lab/straightening.hpp"
#include "heins_lab/valiron.hpp"

namespace heins_lab {

struct Check {
  int criterion = 0;
  std::string invariant;
  bool pass = false;
  std::string detail;
};

inline Json to_json(const Check& c) {
  return Json{{"criterion", c.criterion},
              {"invariant", c.invariant},
              {"pass", c.pass},
              {"detail", c.detail}};
}

/// Pinned tolerances of the acceptance criteria.
namespace tolerance {
inline constexpr double kExactness = 1e-12;          // 1
inline constexpr double kMonotone = 1e-12;           // 2
inline constexpr double kLambdaCatalog = 1e-3;       // 3
inline constexpr double kLambdaScaling = 1e-6;       // 3
inline constexpr double kZeroStep = 1e-3;            // 4
inline constexpr double kPositiveStep = 0.1;         // 4
inline constexpr double kStraighteningAgree = 1e-3;  // 6
inline constexpr double kUniqueness = 1e-3;          // 7
inline constexpr double kRatio = 1e-3;               // 8
inline constexpr double kSlope = 1e-2;               // 9, 10
}  // namespace tolerance

struct SuiteOptions {
  std::size_t orbit_n = 10'000;
  std::size_t two_point_n = 100'000;
  unsigned jobs = 1;
  std::uint64_t seed = 20'240'601;
  std::size_t random_cases = 1'000;
  std::size_t random_trees = 500;
  std::size_t fuzz_inputs = 100'000;
};

/// Base point and probes of the ratio check: pairs (probe, 0).
inline std::vector<Complex> ratio_probes() {
  return {Complex(0.5, 0.0), Complex(-0.5, 0.0), Complex(0.0, 0.5),
          Complex(0.0, -0.5), Complex(0.3, 0.3)};
}

inline constexpr std::array<Complex, 2> kStraighteningBases{Complex(0.0, 0.0),
                                                            Complex(0.3, 0.0)};

struct MapReport {
  CatalogEntry entry;
  Json data;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.pass; });
  }
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

inline void add(std::vector<Check>& out, int criterion, std::string name,
                bool pass, std::string detail) {
  out.push_back({criterion, std::move(name), pass, std::move(detail)});
}

}  // namespace detail

/// Runs every per-map check for one catalog entry.
inline MapReport run_map(const CatalogEntry& entry, const SuiteOptions& opt) {
  using detail::add;
  using detail::fmt;
  MapReport rep;
  rep.entry = entry;
  Json& data = rep.data;
  data["schema"] = kSchemaVersion;
  data["entry"] = to_json(entry);
  auto& checks = rep.checks;

  MapExpr m = maps::rot(0.0);
  try {
    m = parse_map(entry.dsl);
  } catch (const ParseError& e) {
    add(checks, 12, "catalog_dsl_parses", false, e.what());
    data["checks"] = Json::array();
    for (const auto& c : checks) data["checks"].push_back(to_json(c));
    return rep;
  }
  const bool disk_source = m.domain() == Model::Disk;
  const auto source_point = [&](Complex z) {
    return Point(m.domain(), disk_source ? z : detail::cayley(z));
  };

  // 3: classification.
  ClassifyOptions copt;
  copt.step_n = opt.orbit_n;
  const Classification c = classify(m, copt);
  data["classification"] = to_json(c);
  {
    bool ok = c.kind == entry.expected_class;
    std::string why = std::string("class ") + map_class_name(c.kind) +
                      ", expected " + map_class_name(entry.expected_class);
    if (ok && c.kind == MapClass::Hyperbolic && entry.expected_lambda) {
      const double err = std::abs(c.lambda - *entry.expected_lambda);
      ok = err <= tolerance::kLambdaCatalog;
      why += "; |lambda - " + fmt(*entry.expected_lambda) + "| = " + fmt(err);
    }
    if (ok && entry.expected_step) {
      ok = c.step == *entry.expected_step;
      why += std::string("; step ") + step_class_name(c.step) + ", expected " +
             step_class_name(*entry.expected_step);
    }
    add(checks, 3, "classification", ok, why);
  }
  if (!c.frame) {
    data["checks"] = Json::array();
    for (const auto& ch : checks) data["checks"].push_back(to_json(ch));
    return rep;
  }
  const DynamicsFrame& fr = *c.frame;
  const bool parabolic = c.kind == MapClass::Parabolic;

  std::vector<Point> probes;
  for (const Complex& s : default_seeds()) probes.push_back(source_point(s));

  // 2: Schwarz-Pick monotonicity along every probe orbit.
  std::vector<OrbitRecord> orbits = parallel_map(
      probes,
      [&](const Point& p) {
        return orbit(fr.working_map(), fr.to_frame(p), opt.orbit_n, fr.horizon());
      },
      opt.jobs);
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& o : orbits) worst = std::max(worst, o.monotonicity_excess);
    Json arr = Json::array();
    for (const auto& o : orbits) arr.push_back(to_json(o));
    data["orbits"] = arr;
    add(checks, 2, "schwarz_pick_monotonicity", worst <= tolerance::kMonotone,
        "max d_{n+1} - d_n = " + fmt(worst));
  }

  // Step estimates at the probes (in working coordinates).
  std::vector<StepEstimate> steps;
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    StepEstimate s = step_from_orbit(orbits[k], 1e-3);
    s.probe = probes[k].coordinate();
    steps.push_back(s);
  }
  {
    Json arr = Json::array();
    for (const auto& s : steps) arr.push_back(to_json(s));
    data["steps"] = arr;
  }
  const StepClass combined = combine_steps(steps);

  // Straightening from two base points on a shared grid.
  const std::vector<Complex> grid = default_grid(0.0, 0.5);
  std::vector<StraighteningLimit> limits;
  for (const Complex& b : kStraighteningBases) {
    limits.push_back(straightening_limit(fr, b, 0.5, grid));
  }
  {
    Json arr = Json::array();
    for (const auto& l : limits) {
      Json j = to_json(l);
      j.erase("grid");
      arr.push_back(j);
    }
    data["straightening"] = arr;
  }

  // 4: step dichotomy.
  if (parabolic) {
    bool ok = combined != StepClass::Undecided;
    std::string why = std::string("probe verdicts ") + step_class_name(combined);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : steps) {
      lo = std::min(lo, s.estimate);
      hi = std::max(hi, s.estimate);
    }
    const bool want_constant = combined == StepClass::Zero;
    if (combined == StepClass::Zero) ok = ok && hi <= tolerance::kZeroStep;
    if (combined == StepClass::Positive) ok = ok && lo >= tolerance::kPositiveStep;
    why += "; s_hat in [" + fmt(lo) + ", " + fmt(hi) + "]";
    for (const auto& l : limits) {
      ok = ok && l.converged && l.constant == want_constant;
      why += std::string("; base ") + fmt(l.base.real()) +
             (l.constant ? " constant" : " non-constant") +
             (l.converged ? "" : " (not converged)");
    }
    add(checks, 4, "step_dichotomy", ok, why);
  }

  // 5: closed-form steps.
  if (entry.step_tail_at_origin) {
    const StepEstimate& s0 = steps.front();
    const double want = entry.step_tail_at_origin(s0.used);
    const double err = std::abs(s0.estimate - want);
    add(checks, 5, "step_closed_form", err <= entry.step_tail_tol,
        "|d_N - closed form| = " + fmt(err) + " at N = " +
            std::to_string(s0.used));
  }

  // 6: step via straightening and distance realization.
  if (combined != StepClass::Undecided) {
    double worst = 0.0;
    bool ok = true;
    std::string why;
    Json via = Json::array();
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const Complex zd = fr.source_to_disk(probes[k]);
      const auto& lim = limits.front();
      if (!lim.converged) {
        ok = false;
        why = "straightening not converged; ";
        break;
      }
      const double v = step_via_straightening(lim, fr, zd);
      via.push_back(json_real(v));
      worst = std::max(worst, std::abs(v - steps[k].estimate));
    }
    data["step_via_straightening"] = via;
    double worst_pair = 0.0;
    Json pairs = Json::array();
    if (ok) {
      const auto& lim = limits.front();
      for (std::size_t k = 0; k < 10; ++k) {
        const std::size_t i = 2 + k, j = 13 + k;
        const auto seq = two_point_contraction(fr, source_point(grid[i]),
                                               source_point(grid[j]),
                                               opt.two_point_n);
        const double realized =
            detail::disk_distance(lim.values[i], lim.values[j]);
        worst_pair = std::max(worst_pair, std::abs(seq.back() - realized));
        pairs.push_back(Json{{"pair", Json::array({i, j})},
                             {"two_point", json_real(seq.back())},
                             {"realized", json_real(realized)}});
      }
    }
    data["distance_realization"] = pairs;
    ok = ok && worst <= tolerance::kStraighteningAgree &&
         worst_pair <= tolerance::kStraighteningAgree;
    add(checks, 6, "straightening_step_agreement", ok,
        why + "max |via - direct| = " + fmt(worst) +
            "; max two-point mismatch = " + fmt(worst_pair));
  }

  // 7: uniqueness up to an automorphism.
  if (!limits[0].constant && !limits[1].constant && limits[0].converged &&
      limits[1].converged) {
    const EquivalenceResult eq =
        straightening_equivalence(limits[0], limits[1], tolerance::kUniqueness);
    data["equivalence"] = Json{
        {"status", eq.status == FitStatus::Fitted
                       ? "fitted"
                       : (eq.status == FitStatus::Degenerate ? "degenerate"
                                                             : "no_fit")},
        {"residual", json_real(eq.residual)}};
    add(checks, 7, "straightening_uniqueness",
        eq.status == FitStatus::Fitted && eq.residual <= tolerance::kUniqueness,
        "sup-grid residual " + fmt(eq.residual));
  }

  if (parabolic) {
    // 8: Valiron ratio.
    const Point base = source_point(0.0);
    std::vector<Point> rprobes;
    for (const Complex& z : ratio_probes()) rprobes.push_back(source_point(z));
    const auto ratios = parallel_map(
        rprobes,
        [&](const Point& p) { return ratio_sequence(c, p, base, opt.orbit_n); },
        opt.jobs);
    {
      double worst = 0.0;
      bool monotone = true;
      Json arr = Json::array();
      for (const auto& r : ratios) {
        worst = std::max(worst, r.final_error);
        monotone = monotone && r.tail_monotone;
        arr.push_back(to_json(r));
      }
      data["ratios"] = arr;
      add(checks, 8, "valiron_ratio", worst <= tolerance::kRatio && monotone,
          "max |Q_N - 1| = " + fmt(worst) +
              (monotone ? "; tail monotone" : "; tail not monotone"));
    }

    // 10: slope propagation.
    const PropagationResult prop =
        slope_propagation_check(c, probes, opt.orbit_n, tolerance::kSlope, opt.jobs);
    {
      Json arr = Json::array();
      for (const auto& s : prop.slopes) arr.push_back(to_json(s));
      data["slopes"] = arr;
      data["slope_propagation"] =
          Json{{"verdict", propagation_name(prop.verdict)},
               {"reference", json_real(prop.reference)},
               {"max_deviation", json_real(prop.max_deviation)}};
      bool ok = prop.verdict != PropagationVerdict::Disagree;
      std::string why = std::string("verdict ") + propagation_name(prop.verdict);
      if (prop.verdict == PropagationVerdict::Agree && entry.expected_arg) {
        const double err = std::abs(prop.reference - *entry.expected_arg);
        ok = ok && err <= tolerance::kSlope;
        why += "; |phi - expected| = " + fmt(err);
      }
      add(checks, 10, "slope_propagation", ok, why);
    }

    // 9: slope dichotomy for positive step.
    if (c.step == StepClass::Positive) {
      const ArgDichotomyResult dich = arg_dichotomy_check(c, probes, opt.orbit_n, opt.jobs);
      data["arg_dichotomy"] = arg_verdict_name(dich.verdict);
      bool ok = dich.verdict == ArgVerdict::ArgToZero ||
                dich.verdict == ArgVerdict::ArgToPi;
      std::string why = std::string("verdict ") + arg_verdict_name(dich.verdict);
      if (ok && entry.expected_arg) {
        const ArgVerdict want = *entry.expected_arg == 0.0 ? ArgVerdict::ArgToZero
                                                           : ArgVerdict::ArgToPi;
        ok = dich.verdict == want;
      }
      const Complex i(0.0, 1.0);
      const Complex tau = *fr.tau;
      const Complex signed_slope =
          dich.verdict == ArgVerdict::ArgToPi ? i * tau : -i * tau;
      double worst = 0.0;
      for (const auto& s : dich.slopes) {
        worst = std::max(worst, std::abs(s.sigma_limit - signed_slope));
        if (entry.expected_slope) {
          worst = std::max(worst, std::abs(s.sigma_limit - *entry.expected_slope));
        }
      }
      ok = ok && worst <= tolerance::kSlope;
      why += "; max |sigma - (+-i tau)| = " + fmt(worst);
      add(checks, 9, "slope_dichotomy", ok, why);
    }

    // 11: non-tangential orbits of a parabolic map have zero step.
    {
      bool ok = true;
      std::size_t nontangential = 0, violations = 0;
      Json arr = Json::array();
      for (std::size_t k = 0; k < orbits.size(); ++k) {
        const NontangentialReport nt = nontangential_diagnostic(orbits[k]);
        arr.push_back(to_json(nt));
        violations += nt.bound_violations;
        if (!nt.tangential) {
          ++nontangential;
          ok = ok && steps[k].verdict == StepClass::Zero;
        }
      }
      ok = ok && violations == 0;
      data["cone"] = arr;
      add(checks, 11, "nontangential_consistency", ok,
          std::to_string(nontangential) + " non-tangential orbits; " +
              std::to_string(violations) + " cone-bound violations");
    }
  }

  data["checks"] = Json::array();
  for (const auto& ch : checks) data["checks"].push_back(to_json(ch));
  return rep;
}

// ---------------------------------------------------------------------------
// Map-independent checks

namespace detail {

inline Complex random_disk_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> r(0.0, radius);
  std::uniform_real_distribution<double> t(-std::numbers::pi, std::numbers::pi);
  return std::polar(r(rng), t(rng));
}

inline DiskAut random_disk_aut(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> t(-std::numbers::pi, std::numbers::pi);
  return DiskAut(t(rng), random_disk_point(rng, 0.8));
}

}  // namespace detail

/// Criterion 1: isometry of automorphisms and of the Cayley transform, and
/// the group laws, on randomized cases.
inline Check metric_exactness_check(const SuiteOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  double iso = 0.0, cay = 0.0, group = 0.0, half = 0.0;
  for (std::size_t k = 0; k < opt.random_cases; ++k) {
    const Complex z1 = detail::random_disk_point(rng, 0.8);
    const Complex z2 = detail::random_disk_point(rng, 0.8);
    const DiskAut g = detail::random_disk_aut(rng);
    const DiskAut h = detail::random_disk_aut(rng);
    const DiskAut q = detail::random_disk_aut(rng);
    const double d = detail::disk_distance(z1, z2);
    iso = std::max(iso, std::abs(detail::disk_distance(g(z1), g(z2)) - d));
    cay = std::max(cay, std::abs(detail::half_plane_distance(
                                     detail::cayley(z1), detail::cayley(z2)) -
                                 d));
    const HalfPlaneAut hg = conjugate_to_half_plane(g);
    const Complex w1 = detail::cayley(z1), w2 = detail::cayley(z2);
    half = std::max(half, std::abs(detail::half_plane_distance(hg(w1), hg(w2)) -
                                   detail::half_plane_distance(w1, w2)));
    const auto dev = [&](Complex a, Complex b) { return std::abs(a - b); };
    group = std::max(group, dev(aut_compose(g, h)(z1), g(h(z1))));
    group = std::max(group, dev(aut_compose(aut_compose(g, h), q)(z1),
                                aut_compose(g, aut_compose(h, q))(z1)));
    group = std::max(group, dev(aut_compose(g, aut_inverse(g))(z1), z1));
    group = std::max(group, dev(aut_compose(DiskAut::identity(), g)(z1), g(z1)));
  }
  const double worst = std::max({iso, cay, group, half});
  return {1, "metric_group_exactness", worst <= tolerance::kExactness,
          "isometry " + detail::fmt(iso) + ", cayley " + detail::fmt(cay) +
              ", half-plane " + detail::fmt(half) + ", group laws " +
              detail::fmt(group) + " over " + std::to_string(opt.random_cases) +
              " cases each"};
}

/// Criterion 3 (second half): hscale(a) has multiplier 1/a.
inline Check multiplier_scaling_check(const SuiteOptions&) {
  double worst = 0.0;
  bool ok = true;
  for (double a : {1.5, 2.0, 4.0}) {
    const Classification c =
        classify(maps::hscale(a), ClassifyOptions{});
    ok = ok && c.kind == MapClass::Hyperbolic;
    worst = std::max(worst, std::abs(c.lambda - 1.0 / a));
  }
  ok = ok && worst <= tolerance::kLambdaScaling;
  return {3, "multiplier_scaling", ok,
          "max |lambda - 1/a| = " + detail::fmt(worst) + " for a in {1.5, 2, 4}"};
}

namespace detail {

// Random well-typed expression from `dom` to `cod`.
inline MapExpr random_tree(std::mt19937_64& rng, Model dom, Model cod, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  std::uniform_real_distribution<double> pos(0.01, 5.0);
  std::uniform_int_distribution<int> small(1, 4);
  const int choice = depth <= 0 ? 0 : pick(rng);
  if (choice >= 7) {
    const Model mid = pick(rng) % 2 ? Model::Disk : Model::HalfPlane;
    return MapExpr::compose(random_tree(rng, mid, cod, depth - 1),
                            random_tree(rng, dom, mid, depth - 1));
  }
  if (choice == 6 && dom == cod) {
    return MapExpr::iterate(random_tree(rng, dom, dom, depth - 1), small(rng));
  }
  if (dom == Model::Disk && cod == Model::HalfPlane) return maps::cayley();
  if (dom == Model::HalfPlane && cod == Model::Disk) return maps::invcayley();
  if (dom == Model::Disk) {
    switch (pick(rng) % 3) {
      case 0: return maps::rot(real(rng));
      case 1: return maps::diskaut(real(rng), random_disk_point(rng, 0.95));
      default: {
        std::vector<prim::BlaschkeFactor> f;
        const int n = small(rng) - 1;
        for (int k = 0; k < n; ++k) {
          f.push_back({random_disk_point(rng, 0.95), small(rng)});
        }
        return maps::blaschke(real(rng), std::move(f));
      }
    }
  }
  switch (pick(rng) % 3) {
    case 0: return maps::hshift(Complex(real(rng), pos(rng)));
    case 1: return maps::hscale(pos(rng));
    default: return maps::hnudge(Complex(real(rng), pos(rng)));
  }
}

inline std::string mutate(std::mt19937_64& rng, std::string s) {
  static constexpr std::string_view alphabet =
      "abcdeghiklnorstuvyz0123456789().;,^+-eE. \t";
  std::uniform_int_distribution<int> op(0, 2);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> count(1, 4);
  for (int k = count(rng); k > 0; --k) {
    std::uniform_int_distribution<std::size_t> at(0, s.size());
    const std::size_t i = at(rng);
    switch (op(rng)) {
      case 0: s.insert(s.begin() + static_cast<std::ptrdiff_t>(i), alphabet[ch(rng)]); break;
      case 1: if (i < s.size()) s.erase(i, 1); break;
      default: if (i < s.size()) s[i] = alphabet[ch(rng)]; break;
    }
  }
  return s;
}

inline std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> tokens{
      "cayley", "invcayley", "rot(", "diskaut(", "hshift(", "hscale(",
      "hnudge(", "blaschke(", ")", "(", ".", ";", ",", "^", "1", "0.5",
      "-2", "1e3", "+", "-", "i", "3i", " ", "1+1i", "0-1i", "x"};
  std::uniform_int_distribution<std::size_t> tok(0, tokens.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  std::string s;
  for (int k = len(rng); k > 0; --k) s += tokens[tok(rng)];
  return s;
}

}  // namespace detail

/// Criterion 12: round trips, fuzzing and error offsets.
inline Check parser_check(const SuiteOptions& opt) {
  std::mt19937_64 rng(opt.seed + 12);
  std::size_t roundtrip_failures = 0;
  std::vector<std::string> corpus;
  for (const auto& e : catalog()) {
    const MapExpr m = parse_map(e.dsl);
    const std::string text = format_map(m);
    if (!(parse_map(text) == m) || text != e.dsl) ++roundtrip_failures;
    corpus.push_back(text);
  }
  for (std::size_t k = 0; k < opt.random_trees; ++k) {
    const Model dom = k % 2 ? Model::Disk : Model::HalfPlane;
    const Model cod = k % 3 ? dom : (dom == Model::Disk ? Model::HalfPlane : Model::Disk);
    const MapExpr m = detail::random_tree(rng, dom, cod, 4);
    const std::string text = format_map(m);
    try {
      const MapExpr back = parse_map(text);
      if (!(back == m) || format_map(back) != text) ++roundtrip_failures;
    } catch (const ParseError&) {
      ++roundtrip_failures;
    }
    corpus.push_back(text);
  }

  std::size_t crashes = 0, accepted = 0;
  for (std::size_t k = 0; k < opt.fuzz_inputs; ++k) {
    const std::string input =
        k % 2 ? detail::random_text(rng)
              : detail::mutate(rng, corpus[k / 2 % corpus.size()]);
    try {
      const MapExpr m = parse_map(input);
      ++accepted;
      const std::string text = format_map(m);
      if (!(parse_map(text) == m)) ++crashes;
    } catch (const ParseError& e) {
      if (e.offset() > input.size()) ++crashes;
    } catch (...) {
      ++crashes;
    }
  }

  struct OffsetCase {
    const char* text;
    std::size_t offset;
  };
  static constexpr OffsetCase cases[] = {
      {"rot(x)", 4},
      {"cayley . cayley", 7},
      {"invcayley . rot(1)", 10},
      {"rot(1) . cayley", 7},
      {"(hshift(1) . invcayley)", 11},
      {"hshift(0-1i)", 0},
      {"cayley^2", 6},
  };
  std::size_t offset_failures = 0;
  for (const auto& oc : cases) {
    try {
      (void)parse_map(oc.text);
      ++offset_failures;
    } catch (const ParseError& e) {
      if (e.offset() != oc.offset) ++offset_failures;
    }
  }
  const bool ok = roundtrip_failures == 0 && crashes == 0 && offset_failures == 0;
  return {12, "parser_roundtrip_fuzz", ok,
          std::to_string(roundtrip_failures) + " round-trip failures over " +
              std::to_string(catalog().size() + opt.random_trees) + " trees; " +
              std::to_string(crashes) + " crashes in " +
              std::to_string(opt.fuzz_inputs) + " fuzz inputs (" +
              std::to_string(accepted) + " accepted); " +
              std::to_string(offset_failures) + " offset mismatches"};
}

// ---------------------------------------------------------------------------
// Whole suite

struct SuiteResult {
  std::vector<MapReport> maps;
  std::vector<Check> global;
  bool pass = true;
  std::vector<std::string> failures;  // "criterion N: invariant (map)"
  Json rollup;
};

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Report JSON with the volatile timestamp removed, for comparisons.
inline std::string stable_dump(Json j) {
  j.erase("timestamp");
  return j.dump();
}

inline Json experiment_report(const MapReport& r, const SuiteOptions& opt,
                              const std::string& timestamp) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["timestamp"] = timestamp;
  j["map"] = r.entry.name;
  j["dsl"] = r.entry.dsl;
  j["parameters"] = Json{{"orbit_n", opt.orbit_n},
                         {"two_point_n", opt.two_point_n},
                         {"classify_n", ClassifyOptions{}.n},
                         {"wolff_tol", ClassifyOptions{}.tol},
                         {"tol_class", ClassifyOptions{}.tol_class},
                         {"eps_zero", ClassifyOptions{}.eps_zero},
                         {"seeds", json_complex_list(default_seeds())},
                         {"straightening_n", kStraighteningN},
                         {"straightening_tol", 1e-4}};
  for (const auto& [key, value] : r.data.items()) {
    if (key != "schema") j[key] = value;
  }
  j["pass"] = r.pass();
  return j;
}

inline std::vector<MapReport> run_maps(const std::vector<CatalogEntry>& entries,
                                       const SuiteOptions& opt) {
  SuiteOptions inner = opt;
  inner.jobs = 1;  // parallelism is across maps
  return parallel_map(
      entries, [&](const CatalogEntry& e) { return run_map(e, inner); },
      opt.jobs);
}

/// Runs the per-map checks for `entries` and, when `global_checks` is set,
/// the map-independent checks. Determinism (criterion 13) is verified by
/// re-running the maps with a different thread count and comparing reports.
inline SuiteResult run_suite(const std::vector<CatalogEntry>& entries,
                             const SuiteOptions& opt, bool global_checks = true) {
  SuiteResult res;
  res.maps = run_maps(entries, opt);
  if (global_checks) {
    res.global.push_back(metric_exactness_check(opt));
    res.global.push_back(multiplier_scaling_check(opt));
    res.global.push_back(parser_check(opt));
  }
  {
    SuiteOptions other = opt;
    other.jobs = opt.jobs > 1 ? 1 : 2;
    const auto again = run_maps(entries, other);
    std::size_t mismatched = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (stable_dump(res.maps[k].data) != stable_dump(again[k].data)) ++mismatched;
    }
    res.global.push_back({13, "determinism", mismatched == 0,
                          std::to_string(mismatched) + " of " +
                              std::to_string(entries.size()) +
                              " map reports differ between --jobs " +
                              std::to_string(opt.jobs) + " and --jobs " +
                              std::to_string(other.jobs)});
  }

  Json maps = Json::array();
  for (const auto& r : res.maps) {
    Json failed = Json::array();
    for (const auto& c : r.checks) {
      if (!c.pass) {
        res.pass = false;
        failed.push_back(c.invariant);
        res.failures.push_back("criterion " + std::to_string(c.criterion) + ": " +
                               c.invariant + " (" + r.entry.name + ")");
      }
    }
    maps.push_back(Json{{"map", r.entry.name}, {"pass", r.pass()}, {"failed", failed}});
  }
  Json global = Json::array();
  for (const auto& c : res.global) {
    global.push_back(to_json(c));
    if (!c.pass) {
      res.pass = false;
      res.failures.push_back("criterion " + std::to_string(c.criterion) + ": " +
                             c.invariant);
    }
  }
  res.rollup = Json{{"schema", kSchemaVersion},
                    {"tool_version", kToolVersion},
                    {"pass", res.pass},
                    {"maps", maps},
                    {"global", global},
                    {"failures", res.failures}};
  return res;
}

}  // namespace heins_lab
