#pragma once

// Evaluation of MapExpr trees.
//
// A tree is compiled into a flat apply-order program. Adjacent
// Cayley/InvCayley pairs cancel, rotations merge, and a disk automorphism
// sandwiched as InvCayley, g, Cayley is folded into the equivalent real
// Moebius map of the half-plane. The folded program computes the same map
// as the tree but never round-trips large half-plane coordinates through
// the disk, where 1 - |z| would lose all precision.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "heins_lab/errors.hpp"
#include "heins_lab/geometry.hpp"
#include "heins_lab/map_expr.hpp"

namespace heins_lab {

namespace detail {

constexpr Complex kI{0.0, 1.0};

struct CayleyOp {};
struct InvCayleyOp {};
struct RotOp {
  double angle;
};
struct DiskAutOp {
  DiskAut g;
};
struct ShiftOp {
  Complex b;
};
struct ScaleOp {
  double a;
};
struct NudgeOp {
  Complex c;
};
struct BlaschkeOp {
  Complex unit;
  std::vector<prim::BlaschkeFactor> factors;
};
struct MobiusOp {
  HalfPlaneAut g;
};
struct Program;
struct RepeatOp {
  std::shared_ptr<const Program> body;
  int count;
};

using OpKind = std::variant<CayleyOp, InvCayleyOp, RotOp, DiskAutOp, ShiftOp,
                            ScaleOp, NudgeOp, BlaschkeOp, MobiusOp, RepeatOp>;

struct Op {
  OpKind kind;
  std::string path;
};

struct Program {
  std::vector<Op> ops;
};

// Blaschke value and derivative by the product rule, which stays finite at
// the zeros.
inline Complex blaschke_value(const BlaschkeOp& b, Complex z, Complex* d) {
  Complex value = b.unit;
  Complex deriv{};
  for (const auto& f : b.factors) {
    const Complex den = 1.0 - std::conj(f.zero) * z;
    const Complex factor = (z - f.zero) / den;
    const Complex factor_d = one_minus_abs2(f.zero) / (den * den);
    Complex pw = 1.0;
    for (int k = 1; k < f.multiplicity; ++k) pw *= factor;
    const Complex g = pw * factor;
    const Complex g_d = static_cast<double>(f.multiplicity) * pw * factor_d;
    deriv = deriv * g + value * g_d;
    value *= g;
  }
  if (d) *d = deriv;
  return value;
}

inline Complex run(const Program& p, Complex z, Complex* d, bool checked);

// Applies one op; multiplies *d by the op's derivative when d is non-null.
inline Complex apply_op(const Op& op, Complex z, Complex* d, bool checked) {
  const auto chain = [d](Complex local) {
    if (d) *d *= local;
  };
  return std::visit(
      Overloaded{
          [&](const CayleyOp&) {
            if (d) {
              const Complex one_minus = 1.0 - z;
              chain(2.0 * kI / (one_minus * one_minus));
            }
            return cayley(z);
          },
          [&](const InvCayleyOp&) {
            if (d) {
              const Complex s = z + kI;
              chain(2.0 * kI / (s * s));
            }
            return cayley_inverse(z);
          },
          [&](const RotOp& r) {
            const Complex e = std::polar(1.0, r.angle);
            chain(e);
            return e * z;
          },
          [&](const DiskAutOp& g) {
            if (d) chain(g.g.derivative(z));
            return g.g(z);
          },
          [&](const ShiftOp& s) { return z + s.b; },
          [&](const ScaleOp& s) {
            chain(s.a);
            return s.a * z;
          },
          [&](const NudgeOp& n) {
            const Complex s = z + kI;
            if (d) chain(1.0 + 1.0 / (s * s));
            return z + n.c - 1.0 / s;
          },
          [&](const BlaschkeOp& b) {
            Complex local;
            const Complex v = blaschke_value(b, z, d ? &local : nullptr);
            chain(local);
            return v;
          },
          [&](const MobiusOp& m) {
            if (d) chain(m.g.derivative(z));
            return m.g(z);
          },
          [&](const RepeatOp& r) {
            Complex x = z;
            for (int k = 0; k < r.count; ++k) x = run(*r.body, x, d, checked);
            return x;
          },
      },
      op.kind);
}

inline Complex run(const Program& p, Complex z, Complex* d, bool checked) {
  for (const auto& op : p.ops) {
    z = apply_op(op, z, d, checked);
    if (checked && (!finite(z) || (d && !finite(*d)))) {
      throw NonFiniteError(op.path, "nonfinite intermediate value");
    }
  }
  return z;
}

inline Op lower_primitive(const Primitive& p, std::string path) {
  OpKind kind = std::visit(
      Overloaded{
          [](const prim::Cayley&) -> OpKind { return CayleyOp{}; },
          [](const prim::InvCayley&) -> OpKind { return InvCayleyOp{}; },
          [](const prim::Rot& r) -> OpKind { return RotOp{r.angle}; },
          [](const prim::DiskAut& g) -> OpKind {
            return DiskAutOp{DiskAut(g.angle, g.a)};
          },
          [](const prim::HShift& s) -> OpKind { return ShiftOp{s.b}; },
          [](const prim::HScale& s) -> OpKind { return ScaleOp{s.a}; },
          [](const prim::HNudge& n) -> OpKind { return NudgeOp{n.c}; },
          [](const prim::Blaschke& b) -> OpKind {
            return BlaschkeOp{std::polar(1.0, b.angle), b.factors};
          },
      },
      p);
  return {std::move(kind), std::move(path)};
}

template <class T>
bool is(const Op& op) {
  return std::holds_alternative<T>(op.kind);
}

inline std::vector<Op> peephole(std::vector<Op> ops) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Op> out;
    out.reserve(ops.size());
    for (auto& op : ops) {
      if (!out.empty()) {
        Op& prev = out.back();
        if ((is<CayleyOp>(prev) && is<InvCayleyOp>(op)) ||
            (is<InvCayleyOp>(prev) && is<CayleyOp>(op))) {
          out.pop_back();
          changed = true;
          continue;
        }
        if (is<RotOp>(prev) && is<RotOp>(op)) {
          std::get<RotOp>(prev.kind).angle += std::get<RotOp>(op.kind).angle;
          changed = true;
          continue;
        }
        if (is<MobiusOp>(prev) && is<MobiusOp>(op)) {
          prev.kind = MobiusOp{aut_compose(std::get<MobiusOp>(op.kind).g,
                                           std::get<MobiusOp>(prev.kind).g)};
          changed = true;
          continue;
        }
        if (out.size() >= 2 && is<CayleyOp>(op) &&
            is<InvCayleyOp>(out[out.size() - 2]) &&
            (is<RotOp>(prev) || is<DiskAutOp>(prev))) {
          const DiskAut g = is<RotOp>(prev)
                                ? DiskAut::rotation(std::get<RotOp>(prev.kind).angle)
                                : std::get<DiskAutOp>(prev.kind).g;
          std::string path = out[out.size() - 2].path;
          out.pop_back();
          out.pop_back();
          out.push_back({MobiusOp{conjugate_to_half_plane(g)}, std::move(path)});
          changed = true;
          continue;
        }
      }
      out.push_back(std::move(op));
    }
    ops = std::move(out);
  }
  return ops;
}

inline void lower(const MapExpr& m, const std::string& path,
                  std::vector<Op>& out) {
  constexpr std::size_t kUnrollLimit = 64;
  switch (m.kind()) {
    case MapExpr::Kind::Primitive:
      out.push_back(lower_primitive(m.primitive(), path));
      return;
    case MapExpr::Kind::Compose:
      lower(m.inner(), path + "/inner", out);
      lower(m.outer(), path + "/outer", out);
      return;
    case MapExpr::Kind::Iterate: {
      std::vector<Op> body;
      lower(m.base(), path + "/base", body);
      body = peephole(std::move(body));
      const auto count = static_cast<std::size_t>(m.count());
      if (body.size() * count <= kUnrollLimit) {
        for (std::size_t k = 0; k < count; ++k) {
          out.insert(out.end(), body.begin(), body.end());
        }
      } else {
        auto prog = std::make_shared<Program>();
        prog->ops = std::move(body);
        out.push_back({RepeatOp{std::move(prog), m.count()}, path});
      }
      return;
    }
  }
}

}  // namespace detail

/// A MapExpr lowered to a flat program; cheap to apply repeatedly.
class CompiledMap {
 public:
  explicit CompiledMap(MapExpr m) : expr_(std::move(m)) {
    std::vector<detail::Op> ops;
    detail::lower(expr_, "$", ops);
    program_.ops = detail::peephole(std::move(ops));
  }

  const MapExpr& expr() const noexcept { return expr_; }
  Model domain() const noexcept { return expr_.domain(); }
  Model codomain() const noexcept { return expr_.codomain(); }

  /// Unchecked application.
  Complex operator()(Complex z) const {
    return detail::run(program_, z, nullptr, false);
  }

  /// Throws NonFiniteError naming the sub-expression path.
  Complex checked(Complex z) const {
    if (!detail::finite(z)) throw NonFiniteError("$", "nonfinite input");
    return detail::run(program_, z, nullptr, true);
  }

  /// Value and complex derivative, checked.
  std::pair<Complex, Complex> with_derivative(Complex z) const {
    Complex d = 1.0;
    const Complex v = detail::run(program_, z, &d, true);
    return {v, d};
  }

  std::size_t program_size() const noexcept { return program_.ops.size(); }

 private:
  MapExpr expr_;
  detail::Program program_;
};

namespace detail {

inline void require_domain(const MapExpr& m, const Point& p) {
  if (p.model() != m.domain()) {
    throw TypeError("map expects a " + std::string(model_name(m.domain())) +
                    " point, got " + std::string(model_name(p.model())));
  }
}

}  // namespace detail

/// m(p). The result is validated against the codomain; a DomainError here
/// means binary64 rounding put the value on the boundary.
inline Point eval(const MapExpr& m, const Point& p) {
  detail::require_domain(m, p);
  return Point(m.codomain(), CompiledMap(m).checked(p.coordinate()));
}

inline Complex deriv(const MapExpr& m, const Point& p) {
  detail::require_domain(m, p);
  return CompiledMap(m).with_derivative(p.coordinate()).second;
}

inline constexpr double kOverflowGuard = 1e300;

/// m^n(p); n = 0 returns p.
inline Point iterate_eval(const MapExpr& m, const Point& p, std::size_t n) {
  detail::require_domain(m, p);
  if (!m.is_endo()) throw TypeError("iterate_eval needs an endo-map");
  const CompiledMap f(m);
  Complex z = p.coordinate();
  for (std::size_t k = 0; k < n; ++k) {
    try {
      z = f.checked(z);
    } catch (const NonFiniteError&) {
      // A finite half-plane point sent to infinity has escaped, not failed.
      if (m.domain() != Model::HalfPlane || !std::isinf(std::abs(f(z)))) throw;
      throw OverflowError("iterate overflowed after " + std::to_string(k + 1) + " steps");
    }
    if (m.domain() == Model::HalfPlane && std::abs(z) > kOverflowGuard) {
      throw OverflowError("iterate exceeded |w| > 1e300 after " +
                          std::to_string(k + 1) + " steps");
    }
  }
  return Point(m.codomain(), z);
}

/// Interior but within binary64 reach of the boundary.
inline bool near_boundary(const Point& p) {
  const Complex c = p.coordinate();
  return p.model() == Model::Disk ? std::abs(c) > 1.0 - 1e-15
                                  : c.imag() < 1e-15;
}

}  // namespace heins_lab
