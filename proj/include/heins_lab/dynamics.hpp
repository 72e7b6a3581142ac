#pragma once

// Orbits, Denjoy-Wolff estimation, classification and hyperbolic step.
//
// Maps with a boundary Wolff point are studied in half-plane coordinates
// after rotating the Wolff point to 1 and applying the Cayley transform, so
// orbits run off to infinity instead of crowding the unit circle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heins_lab/errors.hpp"
#include "heins_lab/eval.hpp"
#include "heins_lab/geometry.hpp"
#include "heins_lab/map_expr.hpp"
#include "heins_lab/map_parser.hpp"
#include "heins_lab/parallel.hpp"

namespace heins_lab {

/// Half-plane orbits stop once |w| passes this (well before overflow).
inline constexpr double kHalfPlaneHorizon = 1e150;
/// Horizon for orbits of a conjugated map. The estimated Wolff point carries
/// a small angular error e, which moves the conjugated Wolff point from
/// infinity to a real point of size about 1/e; the frame is only faithful
/// for |w| far below that.
inline constexpr double kFrameHorizon = 1e8;
/// Disk orbits closer than this to the circle have lost their precision.
inline constexpr double kBoundaryCollapse = 1e-15;
inline constexpr double kMonotoneSlack = 1e-12;

inline std::vector<Complex> default_seeds() {
  return {Complex(0.0, 0.0), Complex(0.5, 0.0), Complex(-0.5, 0.0),
          Complex(0.0, 0.5), Complex(0.0, -0.5)};
}

// ---------------------------------------------------------------------------
// Orbits

struct OrbitRecord {
  std::string map;
  Complex start;
  Model model = Model::Disk;
  std::size_t requested = 0;
  /// Stopped early at the horizon; points.size() - 1 < requested.
  bool truncated = false;
  std::vector<Complex> points;        // w_0 .. w_used
  std::vector<double> step;           // d_n = omega(w_n, w_{n+1}), n = 0..used
  std::vector<Complex> ratio;         // w_{n+1} / w_n, half-plane only
  std::vector<Complex> displacement;  // F(w_n) - w_n
  /// max_n (d_{n+1} - d_n); negative or tiny for a semicontraction.
  double monotonicity_excess = -std::numeric_limits<double>::infinity();

  std::size_t used() const noexcept { return points.size() - 1; }
  bool monotone() const noexcept {
    return monotonicity_excess <= kMonotoneSlack;
  }
};

inline OrbitRecord orbit(const CompiledMap& f, const Point& start,
                         std::size_t n, double horizon = kHalfPlaneHorizon) {
  if (!f.expr().is_endo()) throw TypeError("orbit needs an endo-map");
  if (start.model() != f.domain()) {
    throw TypeError("orbit start is a " + std::string(model_name(start.model())) +
                    " point but the map acts on the " +
                    std::string(model_name(f.domain())));
  }
  if (n < 1) throw ConstraintError("orbit length N must be >= 1");

  const Model model = f.domain();
  const bool half = model == Model::HalfPlane;
  OrbitRecord rec;
  rec.map = format_map(f.expr());
  rec.start = start.coordinate();
  rec.model = model;
  rec.requested = n;
  rec.points.reserve(n + 1);
  rec.step.reserve(n + 1);
  rec.displacement.reserve(n + 1);
  if (half) rec.ratio.reserve(n + 1);

  Complex cur = start.coordinate();
  rec.points.push_back(cur);
  for (std::size_t k = 0;; ++k) {
    const Complex next = f.checked(cur);
    if (half) {
      if (!(next.imag() > 0.0)) {
        throw DomainError("orbit left the half-plane at n = " +
                          std::to_string(k + 1));
      }
    } else if (std::abs(next) > 1.0 - kBoundaryCollapse) {
      throw DomainError("boundary collapse: |z| within 1e-15 of the circle at n = " +
                        std::to_string(k + 1));
    }
    rec.step.push_back(detail::model_distance(model, cur, next));
    rec.displacement.push_back(next - cur);
    if (half) rec.ratio.push_back(next / cur);
    if (k == n) break;
    if (half && std::abs(next) > horizon) {
      rec.truncated = true;
      break;
    }
    rec.points.push_back(next);
    cur = next;
  }
  for (std::size_t k = 0; k + 1 < rec.step.size(); ++k) {
    rec.monotonicity_excess =
        std::max(rec.monotonicity_excess, rec.step[k + 1] - rec.step[k]);
  }
  return rec;
}

inline OrbitRecord orbit(const MapExpr& m, const Point& start, std::size_t n,
                         double horizon = kHalfPlaneHorizon) {
  return orbit(CompiledMap(m), start, n, horizon);
}

// ---------------------------------------------------------------------------
// Limits of slowly converging sequences

namespace detail {

template <class V>
struct TailLimit {
  V value{};
  double change = std::numeric_limits<double>::infinity();
  bool richardson = false;
};

// Limit of a[0..last]. Two estimators compete: the last term, judged by its
// distance to the term at 4/5 of the way (good for geometric convergence),
// and three-level Richardson extrapolation removing c1/n and c2/n^2, judged
// by its change between n and n/2 (good for algebraic convergence). The one
// that has moved less wins.
template <class V>
TailLimit<V> tail_limit(const std::vector<V>& a, std::size_t last) {
  TailLimit<V> out;
  if (last >= a.size()) last = a.size() - 1;
  out.value = a[last];
  if (last >= 2) out.change = std::abs(a[last] - a[(4 * last) / 5]);
  const std::size_t n = last - last % 8;
  if (n >= 8) {
    const auto rich = [&](std::size_t k) {
      return (8.0 * a[k] - 6.0 * a[k / 2] + a[k / 4]) / 3.0;
    };
    const V r = rich(n);
    const double change = std::abs(r - rich(n / 2));
    if (change < out.change) {
      out.value = r;
      out.change = change;
      out.richardson = true;
    }
  }
  return out;
}

inline double wrap_angle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Denjoy-Wolff point

enum class WolffKind { InteriorFixed, Boundary, Undecided };

inline const char* wolff_kind_name(WolffKind k) {
  switch (k) {
    case WolffKind::InteriorFixed: return "interior_fixed";
    case WolffKind::Boundary: return "boundary";
    case WolffKind::Undecided: return "undecided";
  }
  return "?";
}

struct WolffEstimate {
  WolffKind kind = WolffKind::Undecided;
  /// Fixed point (InteriorFixed) or unimodular tau (Boundary).
  Complex point{};
  Complex multiplier{};
  /// omega(p, f(p)) for a fixed point; largest per-seed tail change otherwise.
  double residual = std::numeric_limits<double>::infinity();
  /// Max |tau_j - tau| over seeds (Boundary only).
  double spread = 0.0;
  /// Largest Euclidean last-step displacement over the seed orbits.
  double last_step = 0.0;
  std::string note;
};

namespace detail {

// Damped Newton on f(z) - z, kept inside the disk.
inline std::optional<Complex> newton_fixed_point(const CompiledMap& f,
                                                 Complex z) {
  for (int it = 0; it < 100; ++it) {
    std::pair<Complex, Complex> vd;
    try {
      vd = f.with_derivative(z);
    } catch (const NonFiniteError&) {
      return std::nullopt;
    }
    const Complex g = vd.first - z;
    const Complex gp = vd.second - 1.0;
    if (g == Complex{}) return z;
    if (gp == Complex{} || !finite(gp)) return std::nullopt;
    const Complex step = g / gp;
    double t = 1.0;
    Complex cand = z - step;
    while (!(std::abs(cand) < 1.0 - kBoundaryCollapse) && t > 1e-12) {
      t *= 0.5;
      cand = z - t * step;
    }
    if (!(std::abs(cand) < 1.0 - kBoundaryCollapse)) return std::nullopt;
    const double moved = std::abs(cand - z);
    z = cand;
    if (moved < 1e-16) break;
  }
  return z;
}

inline bool accept_fixed_point(const CompiledMap& f, Complex p, double tol,
                               double* residual) {
  if (!(std::abs(p) <= 1.0 - 1e-6)) return false;
  Complex fp;
  try {
    fp = f.checked(p);
  } catch (const NonFiniteError&) {
    return false;
  }
  if (!in_model(Model::Disk, fp)) return false;
  const double r = disk_distance(p, fp);
  if (!(r <= tol)) return false;
  *residual = r;
  return true;
}

struct SeedTail {
  bool escaped = false;
  Complex last{};
  double angle = 0.0;
  double change = std::numeric_limits<double>::infinity();
  double last_step = 0.0;
};

// Runs a disk orbit until N or until 1 - |z| < 1e-14, then estimates the
// limiting direction of z_n / |z_n|.
inline SeedTail seed_tail(const CompiledMap& f, Complex z, std::size_t n) {
  std::vector<Complex> pts;
  pts.reserve(n + 1);
  pts.push_back(z);
  double last_step = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex next = f.checked(z);
    if (!(std::abs(next) < 1.0)) break;
    last_step = std::abs(next - z);
    z = next;
    pts.push_back(z);
    if (1.0 - std::abs(z) < 1e-14) break;
  }
  SeedTail out;
  out.last = z;
  out.last_step = last_step;
  const std::size_t last = pts.size() - 1;
  if (last < 8 || z == Complex{}) return out;
  const double far = disk_distance(Complex{}, pts[last]);
  const double mid = disk_distance(Complex{}, pts[last / 2]);
  out.escaped = far >= 2.5 && far > mid;
  if (!out.escaped) return out;
  // Angles relative to the final direction, so no branch cut is crossed.
  const Complex u = z / std::abs(z);
  std::vector<double> a(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    a[k] = pts[k] == Complex{} ? 0.0 : std::arg(pts[k] * std::conj(u));
  }
  const TailLimit<double> lim = tail_limit(a, last);
  out.angle = wrap_angle(std::arg(u) + lim.value);
  out.change = lim.change;
  return out;
}

}  // namespace detail

/// Interior fixed point or boundary Wolff point of a disk endo-map. Half-plane
/// maps are bridged through the Cayley transform.
inline WolffEstimate estimate_wolff(const MapExpr& m,
                                    const std::vector<Complex>& seeds,
                                    std::size_t n = 10'000, double tol = 1e-8) {
  if (!m.is_endo()) throw TypeError("estimate_wolff needs an endo-map");
  if (seeds.empty()) throw ConstraintError("estimate_wolff needs >= 1 seed");
  for (const Complex& s : seeds) (void)DiskPoint(s);
  const MapExpr disk = m.domain() == Model::Disk ? m : maps::to_disk(m);
  const CompiledMap f(disk);

  WolffEstimate est;
  const auto try_fixed = [&](Complex start) {
    const auto p = detail::newton_fixed_point(f, start);
    double residual = 0.0;
    if (p && detail::accept_fixed_point(f, *p, tol, &residual)) {
      est.kind = WolffKind::InteriorFixed;
      est.point = *p;
      est.multiplier = f.with_derivative(*p).second;
      est.residual = residual;
      return true;
    }
    return false;
  };

  for (const Complex& s : seeds) {
    if (try_fixed(s)) return est;
  }

  std::vector<detail::SeedTail> tails;
  tails.reserve(seeds.size());
  for (const Complex& s : seeds) tails.push_back(detail::seed_tail(f, s, n));
  for (const auto& t : tails) {
    if (try_fixed(t.last)) return est;
  }

  double worst_change = 0.0;
  double last_step = 0.0;
  Complex sum{};
  for (const auto& t : tails) {
    last_step = std::max(last_step, t.last_step);
    if (!t.escaped) {
      est.kind = WolffKind::Undecided;
      est.last_step = last_step;
      est.note = "orbit neither converged to an interior point nor escaped";
      return est;
    }
    worst_change = std::max(worst_change, t.change);
    sum += std::polar(1.0, t.angle);
  }
  est.last_step = last_step;
  est.residual = worst_change;
  const Complex tau = sum / std::abs(sum);
  double spread = 0.0;
  for (const auto& t : tails) {
    spread = std::max(spread, std::abs(std::polar(1.0, t.angle) - tau));
  }
  est.spread = spread;
  est.point = tau;
  if (worst_change < tol && spread < 10.0 * tol) {
    est.kind = WolffKind::Boundary;
  } else {
    est.kind = WolffKind::Undecided;
    est.note = worst_change >= tol ? "boundary direction not converged"
                                   : "seeds disagree on the boundary direction";
  }
  return est;
}

inline WolffEstimate estimate_wolff(const MapExpr& m) {
  return estimate_wolff(m, default_seeds());
}

/// Psi o f1 o Psi^-1 with f1(z) = conj(tau) f(tau z): the half-plane form of
/// a disk endo-map whose Wolff point is tau, with that point sent to infinity.
inline MapExpr conjugate_to_halfplane(const MapExpr& m, Complex tau) {
  if (!detail::finite(tau) || std::abs(std::abs(tau) - 1.0) > 1e-12) {
    throw DomainError("tau " + detail::describe(tau) + " is not unimodular");
  }
  if (!m.is_endo() || m.domain() != Model::Disk) {
    throw TypeError("conjugate_to_halfplane needs a disk endo-map");
  }
  const double phi = std::arg(tau);
  if (phi == 0.0) {
    return simplify(maps::chain({maps::cayley(), m, maps::invcayley()}));
  }
  return simplify(maps::chain({maps::cayley(), maps::rot(-phi), m,
                               maps::rot(phi), maps::invcayley()}));
}

// ---------------------------------------------------------------------------
// Frames

/// A map together with the coordinates its dynamics are studied in.
struct DynamicsFrame {
  MapExpr source;
  MapExpr disk;
  std::optional<Complex> tau;
  std::optional<MapExpr> half_plane;

  bool boundary() const noexcept { return tau.has_value(); }
  Model model() const noexcept {
    return boundary() ? Model::HalfPlane : Model::Disk;
  }
  const MapExpr& working_map() const { return boundary() ? *half_plane : disk; }
  double horizon() const noexcept { return kFrameHorizon; }

  /// Disk coordinate of a point given in the source map's model.
  Complex source_to_disk(const Point& p) const {
    if (p.model() != source.domain()) {
      throw TypeError("point is in the " + std::string(model_name(p.model())) +
                      " model but the map acts on the " +
                      std::string(model_name(source.domain())));
    }
    return p.model() == Model::Disk ? p.coordinate()
                                    : detail::cayley_inverse(p.coordinate());
  }
  /// Working coordinate of a disk point: Psi(conj(tau) z), or z itself.
  Complex disk_to_frame(Complex z) const {
    return boundary() ? detail::cayley(std::conj(*tau) * z) : z;
  }
  Complex frame_to_disk(Complex w) const {
    return boundary() ? *tau * detail::cayley_inverse(w) : w;
  }
  Point to_frame(const Point& p) const {
    return Point(model(), disk_to_frame(source_to_disk(p)));
  }
};

/// Builds the working frame. A Wolff direction within `snap` radians of 1 is
/// taken as exactly 1: such a rotation is below the resolution of the
/// estimate and would only turn exact translations into rounded Moebius maps.
inline DynamicsFrame make_frame(const MapExpr& m, const WolffEstimate& w,
                                double snap = 1e-8) {
  if (!m.is_endo()) throw TypeError("frame needs an endo-map");
  DynamicsFrame fr{m, m.domain() == Model::Disk ? m : maps::to_disk(m),
                   std::nullopt, std::nullopt};
  if (w.kind == WolffKind::Boundary) {
    fr.tau = w.point / std::abs(w.point);
    if (std::abs(std::arg(*fr.tau)) < snap) fr.tau = Complex(1.0, 0.0);
    fr.half_plane = conjugate_to_halfplane(fr.disk, *fr.tau);
  }
  return fr;
}

// ---------------------------------------------------------------------------
// Multiplier at infinity

struct MultiplierEstimate {
  bool decided = false;
  /// lambda_inf = lim w_{n+1}/w_n (real part); the disk multiplier is 1/value.
  double value = std::numeric_limits<double>::quiet_NaN();
  double imag = 0.0;
  double spread = std::numeric_limits<double>::infinity();
  bool richardson = false;
  std::size_t used = 0;
};

inline MultiplierEstimate estimate_multiplier(const MapExpr& big_f,
                                              const Point& w0, std::size_t n,
                                              double tol = 1e-6,
                                              double horizon = kHalfPlaneHorizon) {
  if (big_f.domain() != Model::HalfPlane || !big_f.is_endo()) {
    throw TypeError("estimate_multiplier needs a half-plane endo-map");
  }
  const OrbitRecord rec = orbit(big_f, w0, n, horizon);
  MultiplierEstimate out;
  out.used = rec.used();
  const auto lim = detail::tail_limit(rec.ratio, rec.ratio.size() - 1);
  out.value = lim.value.real();
  out.imag = lim.value.imag();
  out.spread = lim.change;
  out.richardson = lim.richardson;
  out.decided = lim.change < tol && std::abs(lim.value.imag()) < tol;
  return out;
}

// ---------------------------------------------------------------------------
// Hyperbolic step

enum class StepClass { Zero, Positive, Undecided };

inline const char* step_class_name(StepClass s) {
  switch (s) {
    case StepClass::Zero: return "zero";
    case StepClass::Positive: return "positive";
    case StepClass::Undecided: return "undecided";
  }
  return "?";
}

struct StepEstimate {
  Complex probe{};
  double tail = 0.0;       // d_N
  double estimate = 0.0;   // s-hat
  double tail_ratio = 0.0; // d_N / d_{N/2}
  double first = 0.0;      // d_0
  StepClass verdict = StepClass::Undecided;
  std::size_t used = 0;
};

inline StepEstimate step_from_orbit(const OrbitRecord& rec, double eps_zero) {
  StepEstimate s;
  s.probe = rec.start;
  s.used = rec.used();
  s.tail = rec.step[s.used];
  s.estimate = s.tail;
  s.first = rec.step.front();
  const double half = rec.step[s.used / 2];
  s.tail_ratio = half > 0.0 ? s.tail / half : 0.0;
  if (s.tail < eps_zero && (s.tail == 0.0 || s.tail_ratio < 0.9)) {
    s.verdict = StepClass::Zero;
  } else if (s.tail > 10.0 * eps_zero && s.tail_ratio > 0.99) {
    s.verdict = StepClass::Positive;
  }
  return s;
}

/// Step estimate in the map's own model.
inline StepEstimate step_estimate(const MapExpr& m, const Point& z,
                                  std::size_t n = 10'000, double eps_zero = 1e-3,
                                  double horizon = kHalfPlaneHorizon) {
  return step_from_orbit(orbit(m, z, n, horizon), eps_zero);
}

/// Step estimate in working coordinates; `z` is in the source model and is
/// reported back as given.
inline StepEstimate step_estimate(const DynamicsFrame& fr, const Point& z,
                                  std::size_t n = 10'000,
                                  double eps_zero = 1e-3) {
  StepEstimate s =
      step_estimate(fr.working_map(), fr.to_frame(z), n, eps_zero, fr.horizon());
  s.probe = z.coordinate();
  return s;
}

/// omega(f^n z, f^n w) for n = 0..N (shorter if a half-plane orbit reaches
/// the horizon).
inline std::vector<double> two_point_contraction(const MapExpr& m,
                                                 const Point& z, const Point& w,
                                                 std::size_t n,
                                                 double horizon = kHalfPlaneHorizon) {
  if (!m.is_endo()) throw TypeError("two_point_contraction needs an endo-map");
  if (z.model() != m.domain() || w.model() != m.domain()) {
    throw TypeError("points must lie in the map's model");
  }
  const CompiledMap f(m);
  const Model model = m.domain();
  Complex a = z.coordinate();
  Complex b = w.coordinate();
  std::vector<double> out;
  out.reserve(n + 1);
  out.push_back(detail::model_distance(model, a, b));
  for (std::size_t k = 0; k < n; ++k) {
    a = f.checked(a);
    b = f.checked(b);
    if (!detail::in_model(model, a) || !detail::in_model(model, b)) {
      throw DomainError("two-point orbit reached the boundary at n = " +
                        std::to_string(k + 1));
    }
    out.push_back(detail::model_distance(model, a, b));
    if (model == Model::HalfPlane &&
        std::max(std::abs(a), std::abs(b)) > horizon) {
      break;
    }
  }
  return out;
}

inline std::vector<double> two_point_contraction(const DynamicsFrame& fr,
                                                 const Point& z, const Point& w,
                                                 std::size_t n) {
  return two_point_contraction(fr.working_map(), fr.to_frame(z),
                               fr.to_frame(w), n, fr.horizon());
}

// ---------------------------------------------------------------------------
// Cone diagnostics

struct NontangentialReport {
  double eps_all = 0.0;   // min_n Im w_n / |w_n|
  double eps_tail = 0.0;  // same over n in [N/10, N]
  bool tangential = true; // eps_tail < 0.05
  double arg_min = 0.0, arg_max = 0.0;
  double arg_range_tail = 0.0;
  /// Pointwise check of tanh d_n <= |p/w| / (2 eps - |p/w|) with eps = eps_all.
  std::size_t bound_checked = 0;
  std::size_t bound_violations = 0;
  double bound_worst_excess = -std::numeric_limits<double>::infinity();
};

inline constexpr double kNontangentialThreshold = 0.05;

inline NontangentialReport nontangential_diagnostic(const OrbitRecord& rec) {
  if (rec.model != Model::HalfPlane) {
    throw PreconditionError("nontangential_diagnostic needs a half-plane orbit");
  }
  NontangentialReport out;
  const std::size_t used = rec.used();
  const std::size_t tail_start = used / 10;
  out.eps_all = std::numeric_limits<double>::infinity();
  out.eps_tail = std::numeric_limits<double>::infinity();
  out.arg_min = std::numeric_limits<double>::infinity();
  out.arg_max = -std::numeric_limits<double>::infinity();
  double tail_min = std::numeric_limits<double>::infinity();
  double tail_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= used; ++k) {
    const Complex w = rec.points[k];
    const double ratio = w.imag() / std::abs(w);
    const double a = std::arg(w);
    out.eps_all = std::min(out.eps_all, ratio);
    out.arg_min = std::min(out.arg_min, a);
    out.arg_max = std::max(out.arg_max, a);
    if (k >= tail_start) {
      out.eps_tail = std::min(out.eps_tail, ratio);
      tail_min = std::min(tail_min, a);
      tail_max = std::max(tail_max, a);
    }
  }
  out.arg_range_tail = tail_max - tail_min;
  out.tangential = out.eps_tail < kNontangentialThreshold;
  for (std::size_t k = 0; k <= used; ++k) {
    const double q = std::abs(rec.displacement[k] / rec.points[k]);
    const double den = 2.0 * out.eps_all - q;
    if (!(den > 0.0)) continue;
    ++out.bound_checked;
    const double lhs = std::tanh(rec.step[k]);
    const double rhs = q / den;
    const double excess = lhs - rhs;
    out.bound_worst_excess = std::max(out.bound_worst_excess, excess);
    if (excess > 1e-12 * std::max(1.0, rhs)) ++out.bound_violations;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class MapClass { Elliptic, Hyperbolic, Parabolic, Undecided };

inline const char* map_class_name(MapClass c) {
  switch (c) {
    case MapClass::Elliptic: return "elliptic";
    case MapClass::Hyperbolic: return "hyperbolic";
    case MapClass::Parabolic: return "parabolic";
    case MapClass::Undecided: return "undecided";
  }
  return "?";
}

struct ClassifyOptions {
  std::vector<Complex> seeds = default_seeds();
  std::size_t n = 100'000;        // Wolff point and multiplier
  double tol = 1e-8;              // Wolff point
  double tol_class = 1e-3;
  double multiplier_tol = 1e-6;
  std::size_t step_n = 10'000;
  double eps_zero = 1e-3;
  unsigned jobs = 1;
};

struct Classification {
  MapClass kind = MapClass::Undecided;
  std::string map;
  WolffEstimate wolff;
  /// Disk multiplier: f'(p) for elliptic maps, 1/lambda_inf otherwise.
  Complex multiplier{};
  double lambda = std::numeric_limits<double>::quiet_NaN();
  MultiplierEstimate at_infinity;
  StepClass step = StepClass::Undecided;
  std::vector<StepEstimate> steps;
  std::optional<DynamicsFrame> frame;
  std::string note;

  bool decided() const noexcept {
    return kind != MapClass::Undecided &&
           (kind != MapClass::Parabolic || step != StepClass::Undecided);
  }
};

inline StepClass combine_steps(const std::vector<StepEstimate>& steps) {
  if (steps.empty()) return StepClass::Undecided;
  const StepClass first = steps.front().verdict;
  for (const auto& s : steps) {
    if (s.verdict != first) return StepClass::Undecided;
  }
  return first;
}

inline Classification classify(const MapExpr& m,
                               const ClassifyOptions& opt = {}) {
  Classification c;
  c.map = format_map(m);
  c.wolff = estimate_wolff(m, opt.seeds, opt.n, opt.tol);
  if (c.wolff.kind == WolffKind::InteriorFixed) {
    c.kind = MapClass::Elliptic;
    c.multiplier = c.wolff.multiplier;
    c.frame = make_frame(m, c.wolff);
    return c;
  }
  if (c.wolff.kind == WolffKind::Undecided) {
    c.note = "Wolff point undecided: " + c.wolff.note;
    return c;
  }
  c.frame = make_frame(m, c.wolff, opt.tol);
  const DynamicsFrame& fr = *c.frame;
  const Point w0(Model::HalfPlane, fr.disk_to_frame(opt.seeds.front()));
  c.at_infinity = estimate_multiplier(*fr.half_plane, w0, opt.n,
                                      opt.multiplier_tol, fr.horizon());
  if (!c.at_infinity.decided) {
    c.note = "ratio sequence did not settle";
    return c;
  }
  c.lambda = 1.0 / c.at_infinity.value;
  c.multiplier = c.lambda;
  if (std::abs(c.lambda - 1.0) < opt.tol_class) {
    c.kind = MapClass::Parabolic;
  } else if (c.lambda <= 1.0 - opt.tol_class && c.lambda > 0.0) {
    c.kind = MapClass::Hyperbolic;
    return c;
  } else {
    c.note = "multiplier outside (0, 1]";
    return c;
  }

  std::vector<Point> probes;
  for (const Complex& s : opt.seeds) {
    probes.emplace_back(m.domain(), m.domain() == Model::Disk
                                        ? s
                                        : detail::cayley(s));
  }
  c.steps = parallel_map(
      probes,
      [&](const Point& p) {
        return step_estimate(fr, p, opt.step_n, opt.eps_zero);
      },
      opt.jobs);
  c.step = combine_steps(c.steps);
  if (c.step == StepClass::Undecided) c.note = "step verdicts undecided or mixed";
  return c;
}

}  // namespace heins_lab
