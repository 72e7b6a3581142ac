#pragma once

// Left straightening: H_n = rot(-theta_n) o (automorphism sending f^n(z0) to
// 0) o f^n, normalized so that H_n(z0) = 0 and H_n(w0) >= 0. The limit h of
// H_n is either constant (zero hyperbolic step) or realizes all limiting
// two-point distances of the orbits.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "heins_lab/dynamics.hpp"
#include "heins_lab/errors.hpp"
#include "heins_lab/eval.hpp"
#include "heins_lab/geometry.hpp"

namespace heins_lab {

/// z0, w0, then 11 points on |z| = 0.3 and 12 on |z| = 0.6 (25 in all).
inline std::vector<Complex> default_grid(Complex z0 = 0.0, Complex w0 = 0.5) {
  std::vector<Complex> g{z0, w0};
  for (int k = 0; k < 11; ++k) {
    g.push_back(std::polar(0.3, 2.0 * std::numbers::pi * k / 11.0));
  }
  for (int k = 0; k < 12; ++k) {
    g.push_back(std::polar(0.6, std::numbers::pi * (1.0 + 2.0 * k) / 12.0));
  }
  return g;
}

struct StraighteningRecord {
  Complex base{};
  Complex ref{};
  std::size_t n = 0;
  std::vector<Complex> grid;
  std::vector<Complex> values;  // H_n(grid)
  double ref_value = 0.0;       // H_n(w0) after alignment
  /// f^n(w0) == f^n(z0): no alignment rotation applied.
  bool collapsed = false;
  bool half_plane_route = false;
};

/// Advances f^n on a fixed set of tracked points and normalizes on demand.
/// Tracked points 0 and 1 are z0 and w0; the rest are probes.
class Straightener {
 public:
  /// z0, w0 and the probes are disk coordinates (of the frame's disk map).
  Straightener(const DynamicsFrame& frame, Complex z0, Complex w0,
               const std::vector<Complex>& probes)
      : f_(frame.working_map()),
        half_plane_(frame.boundary()),
        horizon_(frame.horizon()),
        base_(z0),
        ref_(w0),
        probes_(probes) {
    (void)DiskPoint(z0);
    (void)DiskPoint(w0);
    if (z0 == w0) throw ConstraintError("straightening needs w0 != z0");
    pos_.push_back(frame.disk_to_frame(z0));
    pos_.push_back(frame.disk_to_frame(w0));
    for (const Complex& p : probes) {
      (void)DiskPoint(p);
      pos_.push_back(frame.disk_to_frame(p));
    }
  }

  std::size_t n() const noexcept { return n_; }
  bool horizon_reached() const noexcept { return horizon_reached_; }

  /// Iterates up to index `target`; stops early (returning false) when a
  /// half-plane orbit crosses the horizon.
  bool advance_to(std::size_t target) {
    while (n_ < target) {
      if (half_plane_ && std::abs(pos_[0]) > horizon_) {
        horizon_reached_ = true;
        return false;
      }
      for (auto& p : pos_) p = f_.checked(p);
      ++n_;
    }
    return true;
  }

  /// Working coordinates of tracked point k after n iterations.
  Complex position(std::size_t k) const { return pos_.at(k); }

  StraighteningRecord record() const {
    StraighteningRecord r;
    r.base = base_;
    r.ref = ref_;
    r.n = n_;
    r.grid = probes_;
    r.half_plane_route = half_plane_;
    const Complex k_ref = normalize(pos_[1]);
    Complex align = 1.0;
    if (k_ref == Complex{}) {
      r.collapsed = true;
    } else {
      align = std::conj(k_ref) / std::abs(k_ref);
      r.ref_value = std::abs(k_ref);
    }
    r.values.reserve(probes_.size());
    for (std::size_t k = 0; k < probes_.size(); ++k) {
      if (probes_[k] == base_) {
        r.values.push_back(0.0);
      } else if (probes_[k] == ref_) {
        r.values.push_back(r.ref_value);
      } else {
        r.values.push_back(align * normalize(pos_[k + 2]));
      }
    }
    return r;
  }

  /// Unaligned normalization of a tracked working coordinate; 0 at z0.
  Complex normalize(Complex x) const {
    const Complex a = pos_[0];
    if (half_plane_) {
      return detail::cayley_inverse(Complex(x.real() - a.real(), x.imag()) /
                                    a.imag());
    }
    if (std::abs(a) > 1.0 - 1e-8) {
      throw DomainError(
          "straightening base orbit is within 1e-8 of the circle in disk "
          "coordinates");
    }
    return (x - a) / (1.0 - std::conj(a) * x);
  }

 private:
  CompiledMap f_;
  bool half_plane_;
  double horizon_;
  Complex base_, ref_;
  std::vector<Complex> probes_;
  std::vector<Complex> pos_;
  std::size_t n_ = 0;
  bool horizon_reached_ = false;
};

inline StraighteningRecord straightened_iterate(const DynamicsFrame& frame,
                                                Complex z0, Complex w0,
                                                std::size_t n,
                                                const std::vector<Complex>& grid) {
  Straightener s(frame, z0, w0, grid);
  if (!s.advance_to(n)) {
    throw OverflowError("straightening orbit crossed the horizon before n = " +
                        std::to_string(n));
  }
  return s.record();
}

struct StraighteningLimit {
  Complex base{};
  Complex ref{};
  std::vector<Complex> grid;
  std::vector<Complex> values;  // h-hat(grid)
  double ref_value = 0.0;
  std::size_t n = 0;            // index of the final H_n
  bool converged = false;
  double last_change = std::numeric_limits<double>::infinity();
  bool constant = false;
  double constancy = 0.0;       // sup_grid omega(h(z), h(z0))
  /// max over grid and recorded n of |H_2n| - |H_n|.
  double monotonicity_excess = -std::numeric_limits<double>::infinity();
  bool collapsed = false;
  bool horizon_reached = false;
  std::vector<StraighteningRecord> history;  // n = 0, 1, 2, 4, ...
  double tol = 0.0;
};

inline constexpr std::size_t kStraighteningN = std::size_t{1} << 17;

/// Doubles n until sup_grid |H_2n - H_n| < tol or 2n > N.
inline StraighteningLimit straightening_limit(const DynamicsFrame& frame,
                                              Complex z0, Complex w0,
                                              const std::vector<Complex>& grid,
                                              std::size_t n_max = kStraighteningN,
                                              double tol = 1e-4) {
  Straightener s(frame, z0, w0, grid);
  StraighteningLimit out;
  out.base = z0;
  out.ref = w0;
  out.grid = grid;
  out.tol = tol;
  out.history.push_back(s.record());
  for (std::size_t n = 1; n <= n_max; n *= 2) {
    if (!s.advance_to(n)) {
      out.horizon_reached = true;
      break;
    }
    StraighteningRecord rec = s.record();
    const StraighteningRecord& prev = out.history.back();
    if (prev.n >= 1) {
      double change = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        change = std::max(change, std::abs(rec.values[k] - prev.values[k]));
        out.monotonicity_excess =
            std::max(out.monotonicity_excess,
                     std::abs(rec.values[k]) - std::abs(prev.values[k]));
      }
      out.last_change = change;
      if (change < tol) out.converged = true;
    }
    out.history.push_back(std::move(rec));
    if (out.converged) break;
  }
  const StraighteningRecord& last = out.history.back();
  out.values = last.values;
  out.ref_value = last.ref_value;
  out.n = last.n;
  out.collapsed = last.collapsed;
  for (const Complex& v : out.values) {
    out.constancy = std::max(out.constancy, detail::disk_distance(v, 0.0));
  }
  out.constant = out.constancy < 10.0 * tol;
  return out;
}

inline StraighteningLimit straightening_limit(const DynamicsFrame& frame,
                                              Complex z0 = 0.0,
                                              Complex w0 = 0.5) {
  return straightening_limit(frame, z0, w0, default_grid(z0, w0));
}

/// omega(h(z), h(f(z))) with h evaluated by rerunning the straightening of
/// `limit` at the extra probes z and f(z) (disk coordinates).
inline double step_via_straightening(const StraighteningLimit& limit,
                                     const DynamicsFrame& frame, Complex z) {
  if (!limit.converged) {
    throw PreconditionError("straightening limit did not converge");
  }
  (void)DiskPoint(z);
  Straightener s(frame, limit.base, limit.ref, {z});
  // f(z) in working coordinates is one extra step of z.
  if (!s.advance_to(limit.n)) {
    throw OverflowError("straightening orbit crossed the horizon");
  }
  const CompiledMap f(frame.working_map());
  const Complex hz = s.normalize(s.position(2));
  const Complex hfz = s.normalize(f.checked(s.position(2)));
  // Rotation alignment does not change distances.
  return detail::disk_distance(hz, hfz);
}

struct EquivalenceResult {
  FitStatus status = FitStatus::NoFit;
  std::optional<DiskAut> aut;  // sends limit B's values to limit A's
  double residual = std::numeric_limits<double>::infinity();
  std::array<std::size_t, 3> anchors{};
  std::string note;
};

/// Fits an automorphism phi with phi(hB(z)) = hA(z) through three
/// well-separated grid images, then checks it on the whole grid.
inline EquivalenceResult straightening_equivalence(const StraighteningLimit& a,
                                                   const StraighteningLimit& b,
                                                   double tol = 1e-3) {
  EquivalenceResult out;
  if (a.grid != b.grid) throw ConstraintError("limits use different grids");
  if (a.constant || b.constant) {
    out.note = "a constant limit is not equivalent to anything but a constant";
    if (a.constant && b.constant) {
      out.status = FitStatus::Fitted;
      out.aut = DiskAut::identity();
      out.residual = 0.0;
      out.note = "both limits constant";
    }
    return out;
  }
  const std::size_t n = a.grid.size();
  const auto sep = [&](std::size_t i, std::size_t j) {
    return std::min(detail::disk_distance(a.values[i], a.values[j]),
                    detail::disk_distance(b.values[i], b.values[j]));
  };
  std::size_t i0 = 0, j0 = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sep(i, j) > best) {
        best = sep(i, j);
        i0 = i;
        j0 = j;
      }
    }
  }
  std::size_t k0 = 0;
  double third = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::min(sep(i0, k), sep(j0, k));
    if (s > third) {
      third = s;
      k0 = k;
    }
  }
  out.anchors = {i0, j0, k0};
  constexpr double kMinSeparation = 1e-3;
  if (std::min(best, third) < kMinSeparation) {
    out.status = FitStatus::Degenerate;
    out.note = "grid images collapse below the separation threshold";
    return out;
  }
  const std::array<DiskPoint, 3> src{DiskPoint(b.values[i0]),
                                     DiskPoint(b.values[j0]),
                                     DiskPoint(b.values[k0])};
  const std::array<DiskPoint, 3> dst{DiskPoint(a.values[i0]),
                                     DiskPoint(a.values[j0]),
                                     DiskPoint(a.values[k0])};
  const AutFit fit = disk_aut_through_three_points(src, dst, tol);
  if (!fit.aut) {
    out.status = fit.status;
    out.residual = fit.residual;
    out.note = "no automorphism through the anchor images";
    return out;
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex mapped = (*fit.aut)(b.values[k]);
    residual = std::max(residual,
                        detail::in_model(Model::Disk, mapped)
                            ? detail::disk_distance(mapped, a.values[k])
                            : std::numeric_limits<double>::infinity());
  }
  out.residual = residual;
  if (residual <= tol) {
    out.status = FitStatus::Fitted;
    out.aut = fit.aut;
  } else {
    out.status = FitStatus::NoFit;
    out.note = "fitted automorphism misses the grid";
  }
  return out;
}

}  // namespace heins_lab
