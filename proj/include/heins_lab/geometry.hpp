#pragma once

// Poincare geometry of the unit disk and the upper half-plane: model-tagged
// points, the invariant distance in both models, the Cayley bridge and the
// Moebius automorphism groups.
//
// Distances use the tanh^-1 normalization, omega(0, z) = atanh|z|.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "heins_lab/errors.hpp"

namespace heins_lab {

using Complex = std::complex<double>;

enum class Model { Disk, HalfPlane };

constexpr std::string_view model_name(Model m) noexcept {
  return m == Model::Disk ? "Disk" : "HalfPlane";
}

namespace detail {

inline bool finite(Complex c) noexcept {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

inline bool in_model(Model m, Complex c) noexcept {
  if (!finite(c)) return false;
  return m == Model::Disk ? std::abs(c) < 1.0 : c.imag() > 0.0;
}

inline std::string describe(Complex c) {
  return "(" + std::to_string(c.real()) + ", " + std::to_string(c.imag()) +
         ")";
}

// 1 - |z|^2 without the cancellation of 1 - norm(z).
inline double one_minus_abs2(Complex z) noexcept {
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

// atanh(t) given t and an independently accurate value of 1 - t^2.
inline double atanh_accurate(double t, double one_minus_t2) noexcept {
  if (t <= 0.0) return 0.0;
  if (t < 0.5) return 0.5 * std::log1p(2.0 * t / (1.0 - t));
  return std::log1p(t) - 0.5 * std::log(one_minus_t2);
}

inline bool precedes(Complex a, Complex b) noexcept {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

// Arguments are put in a canonical order first so the result is bitwise
// symmetric regardless of floating-point contraction.
inline double disk_distance(Complex z1, Complex z2) noexcept {
  if (precedes(z2, z1)) std::swap(z1, z2);
  const double x1 = z1.real(), y1 = z1.imag();
  const double x2 = z2.real(), y2 = z2.imag();
  const double num = std::hypot(x2 - x1, y2 - y1);
  if (num == 0.0) return 0.0;
  const double den = std::hypot(1.0 - (x1 * x2 + y1 * y2), x1 * y2 - y1 * x2);
  const double t = std::min(num / den, 1.0);
  return atanh_accurate(
      t, (one_minus_abs2(z1) / den) * (one_minus_abs2(z2) / den));
}

inline double half_plane_distance(Complex w1, Complex w2) noexcept {
  if (precedes(w2, w1)) std::swap(w1, w2);
  const double dx = w2.real() - w1.real();
  const double num = std::hypot(dx, w2.imag() - w1.imag());
  if (num == 0.0) return 0.0;
  const double den = std::hypot(dx, w2.imag() + w1.imag());
  const double t = std::min(num / den, 1.0);
  return atanh_accurate(t, (2.0 * w1.imag() / den) * (2.0 * w2.imag() / den));
}

inline double model_distance(Model m, Complex a, Complex b) noexcept {
  return m == Model::Disk ? disk_distance(a, b) : half_plane_distance(a, b);
}

// Psi(z) = i(1+z)/(1-z), written so that Im Psi(z) = (1-|z|^2)/|1-z|^2 is
// computed without cancellation.
inline Complex cayley(Complex z) noexcept {
  const double dx = 1.0 - z.real();
  const double dy = -z.imag();
  const double d2 = dx * dx + dy * dy;
  return {-2.0 * z.imag() / d2, one_minus_abs2(z) / d2};
}

// Psi^-1(w) = (w-i)/(w+i) = 1 - 2i/(w+i); the second form stays accurate as
// |w| grows.
inline Complex cayley_inverse(Complex w) noexcept {
  return Complex(1.0, 0.0) - Complex(0.0, 2.0) / (w + Complex(0.0, 1.0));
}

}  // namespace detail

/// A coordinate validated against its model at construction.
template <Model M>
class ModelPoint {
 public:
  static constexpr Model model = M;

  explicit ModelPoint(Complex c) : c_(c) {
    if (!detail::in_model(M, c)) {
      throw DomainError(std::string("point ") + detail::describe(c) +
                        " is not interior to the " +
                        std::string(model_name(M)) + " model");
    }
  }

  Complex coordinate() const noexcept { return c_; }

  friend bool operator==(const ModelPoint&, const ModelPoint&) = default;

 private:
  Complex c_;
};

using DiskPoint = ModelPoint<Model::Disk>;
using HalfPlanePoint = ModelPoint<Model::HalfPlane>;

/// Runtime-tagged point, used where the model is only known at run time
/// (expression evaluation, CLI input).
class Point {
 public:
  Point(Model m, Complex c) : model_(m), c_(c) {
    if (!detail::in_model(m, c)) {
      throw DomainError(std::string("point ") + detail::describe(c) +
                        " is not interior to the " +
                        std::string(model_name(m)) + " model");
    }
  }
  template <Model M>
  Point(ModelPoint<M> p) : model_(M), c_(p.coordinate()) {}  // NOLINT

  Model model() const noexcept { return model_; }
  Complex coordinate() const noexcept { return c_; }

  template <Model M>
  ModelPoint<M> as() const {
    if (model_ != M) {
      throw TypeError(std::string("expected a ") + std::string(model_name(M)) +
                      " point, got " + std::string(model_name(model_)));
    }
    return ModelPoint<M>(c_);
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  Model model_;
  Complex c_;
};

class HyperbolicDistance {
 public:
  constexpr explicit HyperbolicDistance(double v) noexcept : v_(v) {}
  constexpr double value() const noexcept { return v_; }
  friend constexpr auto operator<=>(const HyperbolicDistance&,
                                    const HyperbolicDistance&) = default;

 private:
  double v_;
};

inline HyperbolicDistance poincare_disk(DiskPoint z1, DiskPoint z2) noexcept {
  return HyperbolicDistance(
      detail::disk_distance(z1.coordinate(), z2.coordinate()));
}

inline HyperbolicDistance poincare_halfplane(HalfPlanePoint w1,
                                             HalfPlanePoint w2) noexcept {
  return HyperbolicDistance(
      detail::half_plane_distance(w1.coordinate(), w2.coordinate()));
}

inline HyperbolicDistance poincare(const Point& a, const Point& b) {
  if (a.model() != b.model()) {
    throw TypeError("distance between points of different models");
  }
  return HyperbolicDistance(
      detail::model_distance(a.model(), a.coordinate(), b.coordinate()));
}

inline HalfPlanePoint cayley(DiskPoint z) {
  return HalfPlanePoint(detail::cayley(z.coordinate()));
}

inline DiskPoint cayley_inverse(HalfPlanePoint w) {
  return DiskPoint(detail::cayley_inverse(w.coordinate()));
}

// ---------------------------------------------------------------------------
// Automorphisms

template <Model M>
class MobiusAut;

/// z -> e^{i angle} (z + center) / (1 + conj(center) z), |center| < 1.
template <>
class MobiusAut<Model::Disk> {
 public:
  static constexpr Model model = Model::Disk;

  MobiusAut() = default;
  MobiusAut(double angle, Complex center)
      : angle_(std::remainder(angle, 2.0 * std::numbers::pi)), a_(center) {
    if (!std::isfinite(angle) || !detail::in_model(Model::Disk, center)) {
      throw DomainError("disk automorphism needs a finite angle and |a| < 1");
    }
  }

  static MobiusAut identity() { return {}; }
  static MobiusAut rotation(double angle) { return {angle, Complex{}}; }

  double angle() const noexcept { return angle_; }
  Complex center() const noexcept { return a_; }

  Complex operator()(Complex z) const noexcept {
    return std::polar(1.0, angle_) * (z + a_) / (1.0 + std::conj(a_) * z);
  }

  Complex derivative(Complex z) const noexcept {
    const Complex d = 1.0 + std::conj(a_) * z;
    return std::polar(1.0, angle_) * detail::one_minus_abs2(a_) / (d * d);
  }

 private:
  double angle_ = 0.0;
  Complex a_{};
};

/// w -> (alpha w + beta) / (gamma w + delta), real coefficients, unit
/// determinant.
template <>
class MobiusAut<Model::HalfPlane> {
 public:
  static constexpr Model model = Model::HalfPlane;

  MobiusAut() = default;
  MobiusAut(double alpha, double beta, double gamma, double delta) {
    const double det = alpha * delta - beta * gamma;
    if (!(det > 0.0) || !std::isfinite(det)) {
      throw DomainError(
          "half-plane automorphism needs real coefficients with positive "
          "determinant");
    }
    const double s = 1.0 / std::sqrt(det);
    c_ = {alpha * s, beta * s, gamma * s, delta * s};
  }

  static MobiusAut identity() { return {}; }

  double alpha() const noexcept { return c_[0]; }
  double beta() const noexcept { return c_[1]; }
  double gamma() const noexcept { return c_[2]; }
  double delta() const noexcept { return c_[3]; }

  Complex operator()(Complex w) const noexcept {
    return (c_[0] * w + c_[1]) / (c_[2] * w + c_[3]);
  }

  Complex derivative(Complex w) const noexcept {
    const Complex d = c_[2] * w + c_[3];
    return 1.0 / (d * d);
  }

 private:
  std::array<double, 4> c_{1.0, 0.0, 0.0, 1.0};
};

using DiskAut = MobiusAut<Model::Disk>;
using HalfPlaneAut = MobiusAut<Model::HalfPlane>;

template <Model M>
ModelPoint<M> aut_apply(const MobiusAut<M>& g, ModelPoint<M> p) {
  return ModelPoint<M>(g(p.coordinate()));
}

inline DiskAut aut_inverse(const DiskAut& g) {
  return {-g.angle(), -g.center() * std::polar(1.0, g.angle())};
}

inline HalfPlaneAut aut_inverse(const HalfPlaneAut& g) {
  return {g.delta(), -g.beta(), -g.gamma(), g.alpha()};
}

/// g o h.
inline DiskAut aut_compose(const DiskAut& g, const DiskAut& h) {
  const Complex e2 = std::polar(1.0, h.angle());
  const Complex a1 = g.center();
  const Complex a2 = h.center();
  const Complex d = 1.0 + std::conj(a1) * e2 * a2;
  const Complex center = (a1 + e2 * a2) / (e2 * std::conj(d));
  return {g.angle() + h.angle() - 2.0 * std::arg(d), center};
}

inline HalfPlaneAut aut_compose(const HalfPlaneAut& g, const HalfPlaneAut& h) {
  return {g.alpha() * h.alpha() + g.beta() * h.gamma(),
          g.alpha() * h.beta() + g.beta() * h.delta(),
          g.gamma() * h.alpha() + g.delta() * h.gamma(),
          g.gamma() * h.beta() + g.delta() * h.delta()};
}

/// The canonical automorphism taking the model center (0 or i) to `target`.
inline DiskAut aut_sending_center_to(DiskPoint target) {
  return {0.0, target.coordinate()};
}

inline HalfPlaneAut aut_sending_center_to(HalfPlanePoint target) {
  const double a = target.coordinate().imag();
  const double b = target.coordinate().real();
  return {a, b, 0.0, 1.0};
}

/// Half-plane form of Psi o g o Psi^-1 for a disk automorphism g.
inline HalfPlaneAut conjugate_to_half_plane(const DiskAut& g) {
  // Psi = [[i, i], [-1, 1]], Psi^-1 ~ [[1, -i], [1, i]],
  // g = [[e, e a], [conj(a), 1]] with e = e^{i angle}.
  using M2 = std::array<Complex, 4>;
  const auto mul = [](const M2& x, const M2& y) {
    return M2{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
              x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
  };
  const Complex i(0.0, 1.0);
  const Complex e = std::polar(1.0, g.angle());
  const M2 psi{i, i, -1.0, 1.0};
  const M2 psi_inv{1.0, -i, 1.0, i};
  const M2 gm{e, e * g.center(), std::conj(g.center()), 1.0};
  M2 m = mul(psi, mul(gm, psi_inv));
  // The product is a complex multiple of a real matrix; strip the phase of
  // its largest entry.
  const auto largest = std::max_element(
      m.begin(), m.end(),
      [](Complex x, Complex y) { return std::abs(x) < std::abs(y); });
  const Complex phase = *largest / std::abs(*largest);
  for (auto& c : m) c /= phase;
  double det = m[0].real() * m[3].real() - m[1].real() * m[2].real();
  if (det < 0.0) {
    for (auto& c : m) c = -c;  // unreachable for orientation-preserving g
  }
  return {m[0].real(), m[1].real(), m[2].real(), m[3].real()};
}

enum class FitStatus { Fitted, NoFit, Degenerate };

struct AutFit {
  FitStatus status = FitStatus::NoFit;
  std::optional<DiskAut> aut;
  /// max_k omega(g(src_k), dst_k) of the candidate; infinite if none exists.
  double residual = INFINITY;
};

/// The disk automorphism sending src[k] to dst[k], if one exists.
inline AutFit disk_aut_through_three_points(const std::array<DiskPoint, 3>& src,
                                            const std::array<DiskPoint, 3>& dst,
                                            double tol = 1e-9) {
  constexpr double kSeparation = 1e-13;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(src[i].coordinate() - src[j].coordinate()) < kSeparation ||
          std::abs(dst[i].coordinate() - dst[j].coordinate()) < kSeparation) {
        return {FitStatus::Degenerate, std::nullopt, INFINITY};
      }
    }
  }
  using M2 = std::array<Complex, 4>;
  // Sends (p1, p2, p3) to (0, 1, inf).
  const auto to_standard = [](const std::array<DiskPoint, 3>& p) {
    const Complex s1 = p[0].coordinate(), s2 = p[1].coordinate(),
                  s3 = p[2].coordinate();
    return M2{s2 - s3, -s1 * (s2 - s3), s2 - s1, -s3 * (s2 - s1)};
  };
  const M2 ts = to_standard(src);
  const M2 td = to_standard(dst);
  const M2 td_adj{td[3], -td[1], -td[2], td[0]};
  const M2 m{td_adj[0] * ts[0] + td_adj[1] * ts[2],
             td_adj[0] * ts[1] + td_adj[1] * ts[3],
             td_adj[2] * ts[0] + td_adj[3] * ts[2],
             td_adj[2] * ts[1] + td_adj[3] * ts[3]};
  const double scale = std::max({std::abs(m[0]), std::abs(m[1]),
                                 std::abs(m[2]), std::abs(m[3])});
  if (std::abs(m[3]) <= 1e-14 * scale) return {};  // pole at the origin
  const Complex image0 = m[1] / m[3];
  const Complex slope0 = (m[0] * m[3] - m[1] * m[2]) / (m[3] * m[3]);
  if (std::abs(slope0) == 0.0) return {};
  const Complex rot = slope0 / std::abs(slope0);
  const Complex center = std::conj(rot) * image0;
  if (!detail::in_model(Model::Disk, center)) return {};
  const DiskAut g(std::arg(rot), center);
  double residual = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Complex gk = g(src[k].coordinate());
    residual = std::max(residual,
                        detail::in_model(Model::Disk, gk)
                            ? detail::disk_distance(gk, dst[k].coordinate())
                            : INFINITY);
  }
  if (residual > tol) return {FitStatus::NoFit, std::nullopt, residual};
  return {FitStatus::Fitted, g, residual};
}

}  // namespace heins_lab
