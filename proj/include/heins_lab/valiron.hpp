#pragma once

// Ratio and slope sequences of parabolic maps, computed in half-plane
// coordinates. With W_n = F^n(Psi(conj(tau) z)),
//   f^n(z) - tau = -2i tau / (W_n + i),
// so disk-side differences against the Wolff point are never formed.

#include <algorithm>
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
#include "heins_lab/parallel.hpp"

namespace heins_lab {

/// Last-decade angle range below which a sequence of arguments has a limit.
inline constexpr double kAngleConvergence = 1e-3;
/// Agreement tolerance for slope limits.
inline constexpr double kSlopeTolerance = 1e-2;

namespace detail {

inline const DynamicsFrame& require_parabolic(const Classification& c) {
  if (c.kind != MapClass::Parabolic || !c.frame || !c.frame->boundary()) {
    throw PreconditionError("map not parabolic (classified " +
                            std::string(map_class_name(c.kind)) + ")");
  }
  return *c.frame;
}

inline std::vector<Complex> frame_orbit(const DynamicsFrame& fr,
                                        const Point& z, std::size_t n) {
  return orbit(fr.working_map(), fr.to_frame(z), n, fr.horizon()).points;
}

}  // namespace detail

struct RatioReport {
  std::string map;
  Complex base{};
  Complex probe{};
  std::vector<Complex> q;       // Q_n = F^n(w) / F^n(w0)
  std::vector<Complex> q_disk;  // (f^n(z) - tau) / (f^n(z0) - tau)
  double final_error = 0.0;     // |Q_N - 1|
  double final_error_disk = 0.0;
  /// |Q_n - 1| is non-increasing over n in [N/10, N].
  bool tail_monotone = true;
  double tail_excess = -std::numeric_limits<double>::infinity();
};

/// Points are in the source map's model.
inline RatioReport ratio_sequence(const Classification& c, const Point& z,
                                  const Point& z0, std::size_t n = 10'000) {
  const DynamicsFrame& fr = detail::require_parabolic(c);
  RatioReport r;
  r.map = c.map;
  r.base = z0.coordinate();
  r.probe = z.coordinate();
  const auto wz = detail::frame_orbit(fr, z, n);
  const auto w0 = detail::frame_orbit(fr, z0, n);
  const std::size_t used = std::min(wz.size(), w0.size());
  r.q.reserve(used);
  r.q_disk.reserve(used);
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < used; ++k) {
    r.q.push_back(wz[k] / w0[k]);
    r.q_disk.push_back((w0[k] + i) / (wz[k] + i));
  }
  r.final_error = std::abs(r.q.back() - 1.0);
  r.final_error_disk = std::abs(r.q_disk.back() - 1.0);
  for (std::size_t k = (used - 1) / 10; k + 1 < used; ++k) {
    const double excess =
        std::abs(r.q[k + 1] - 1.0) - std::abs(r.q[k] - 1.0);
    r.tail_excess = std::max(r.tail_excess, excess);
    if (excess > 1e-15) r.tail_monotone = false;
  }
  return r;
}

struct SlopeReport {
  Complex probe{};
  std::vector<Complex> sigma;  // (f^n(z) - tau) / |f^n(z) - tau|
  std::vector<double> arg;     // arg F^n(w), in (0, pi)
  double arg_limit = 0.0;
  double arg_range_tail = 0.0;
  bool converged = false;
  Complex sigma_limit{};
  /// Slope angle in (-pi/2, pi/2) with sigma -> -tau e^{i theta}; only for a
  /// converged limit strictly inside the cone.
  std::optional<double> theta;
  double unit_defect = 0.0;  // max | |sigma_n| - 1 |
};

/// Requires a boundary Wolff point (hyperbolic or parabolic).
inline SlopeReport slope_sequence(const Classification& c, const Point& z,
                                  std::size_t n = 10'000) {
  if (!c.frame || !c.frame->boundary()) {
    throw PreconditionError("slope needs a boundary Wolff point");
  }
  const DynamicsFrame& fr = *c.frame;
  const auto w = detail::frame_orbit(fr, z, n);
  SlopeReport s;
  s.probe = z.coordinate();
  s.sigma.reserve(w.size());
  s.arg.reserve(w.size());
  const Complex i(0.0, 1.0);
  const Complex lead = -i * *fr.tau;
  for (const Complex& x : w) {
    const Complex v = std::conj(x + i);
    const Complex sig = lead * (v / std::abs(v));
    s.sigma.push_back(sig);
    s.unit_defect = std::max(s.unit_defect, std::abs(std::abs(sig) - 1.0));
    s.arg.push_back(std::arg(x));
  }
  const std::size_t last = w.size() - 1;
  const auto [lo, hi] =
      std::minmax_element(s.arg.begin() + static_cast<std::ptrdiff_t>(last / 10),
                          s.arg.end());
  s.arg_range_tail = *hi - *lo;
  s.arg_limit = s.arg.back();
  s.converged = s.arg_range_tail < kAngleConvergence;
  s.sigma_limit = lead * std::polar(1.0, -s.arg_limit);
  if (s.converged && s.arg_limit > kSlopeTolerance &&
      s.arg_limit < std::numbers::pi - kSlopeTolerance) {
    s.theta = std::numbers::pi / 2.0 - s.arg_limit;
  }
  return s;
}

enum class PropagationVerdict { Agree, Disagree, Vacuous };

inline const char* propagation_name(PropagationVerdict v) {
  switch (v) {
    case PropagationVerdict::Agree: return "agree";
    case PropagationVerdict::Disagree: return "disagree";
    case PropagationVerdict::Vacuous: return "vacuous";
  }
  return "?";
}

struct PropagationResult {
  PropagationVerdict verdict = PropagationVerdict::Vacuous;
  double reference = 0.0;      // mean converged arg limit
  double max_deviation = 0.0;  // over all probes
  std::vector<SlopeReport> slopes;
};

inline PropagationResult slope_propagation_check(
    const Classification& c, const std::vector<Point>& probes,
    std::size_t n = 10'000, double tol = kSlopeTolerance, unsigned jobs = 1) {
  detail::require_parabolic(c);
  PropagationResult out;
  out.slopes = parallel_map(
      probes, [&](const Point& p) { return slope_sequence(c, p, n); }, jobs);
  if (probes.size() < 2) return out;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : out.slopes) {
    if (s.converged) {
      sum += s.arg_limit;
      ++count;
    }
  }
  if (count == 0) return out;
  out.reference = sum / static_cast<double>(count);
  for (const auto& s : out.slopes) {
    out.max_deviation =
        std::max(out.max_deviation, std::abs(s.arg_limit - out.reference));
  }
  out.verdict = out.max_deviation <= tol ? PropagationVerdict::Agree
                                         : PropagationVerdict::Disagree;
  return out;
}

enum class ArgVerdict { ArgToZero, ArgToPi, Violation, Undecided };

inline const char* arg_verdict_name(ArgVerdict v) {
  switch (v) {
    case ArgVerdict::ArgToZero: return "arg_to_zero";
    case ArgVerdict::ArgToPi: return "arg_to_pi";
    case ArgVerdict::Violation: return "violation";
    case ArgVerdict::Undecided: return "undecided";
  }
  return "?";
}

struct ArgDichotomyResult {
  ArgVerdict verdict = ArgVerdict::Undecided;
  std::vector<SlopeReport> slopes;
};

/// For a positive-step parabolic map every orbit's argument tends to the
/// same endpoint, 0 or pi.
inline ArgDichotomyResult arg_dichotomy_check(const Classification& c,
                                              const std::vector<Point>& probes,
                                              std::size_t n = 10'000,
                                              unsigned jobs = 1) {
  detail::require_parabolic(c);
  if (c.step != StepClass::Positive) {
    throw PreconditionError(
        "arg dichotomy needs a positive-step parabolic map (step is " +
        std::string(step_class_name(c.step)) + ")");
  }
  ArgDichotomyResult out;
  out.slopes = parallel_map(
      probes, [&](const Point& p) { return slope_sequence(c, p, n); }, jobs);
  std::size_t zero = 0, pi = 0, interior = 0;
  for (const auto& s : out.slopes) {
    if (std::abs(s.arg_limit) < kSlopeTolerance) {
      ++zero;
    } else if (std::abs(s.arg_limit - std::numbers::pi) < kSlopeTolerance) {
      ++pi;
    } else if (s.converged) {
      ++interior;
    }
  }
  const std::size_t total = out.slopes.size();
  if (interior > 0 || (zero > 0 && pi > 0)) {
    out.verdict = ArgVerdict::Violation;
  } else if (total > 0 && zero == total) {
    out.verdict = ArgVerdict::ArgToZero;
  } else if (total > 0 && pi == total) {
    out.verdict = ArgVerdict::ArgToPi;
  }
  return out;
}

}  // namespace heins_lab
