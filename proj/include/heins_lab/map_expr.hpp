#pragma once

// Typed expression trees for holomorphic self-maps.
//
// Leaves are constraint-checked primitives, each of which maps its domain
// model into its codomain model; internal nodes are Compose(outer, inner)
// (inner applies first) and Iterate(base, n). Trees are immutable and share
// structure.

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

namespace heins_lab {

namespace prim {

struct Cayley {
  friend bool operator==(const Cayley&, const Cayley&) = default;
};
struct InvCayley {
  friend bool operator==(const InvCayley&, const InvCayley&) = default;
};
/// z -> e^{i angle} z
struct Rot {
  double angle;
  friend bool operator==(const Rot&, const Rot&) = default;
};
/// z -> e^{i angle} (z + a) / (1 + conj(a) z)
struct DiskAut {
  double angle;
  Complex a;
  friend bool operator==(const DiskAut&, const DiskAut&) = default;
};
/// w -> w + b, Im b >= 0, b != 0
struct HShift {
  Complex b;
  friend bool operator==(const HShift&, const HShift&) = default;
};
/// w -> a w, a > 0
struct HScale {
  double a;
  friend bool operator==(const HScale&, const HScale&) = default;
};
/// w -> w + c - 1/(w + i), Im c >= 0
struct HNudge {
  Complex c;
  friend bool operator==(const HNudge&, const HNudge&) = default;
};
struct BlaschkeFactor {
  Complex zero;
  int multiplicity;
  friend bool operator==(const BlaschkeFactor&,
                         const BlaschkeFactor&) = default;
};
/// z -> e^{i angle} prod ((z - a_k) / (1 - conj(a_k) z))^{m_k}
struct Blaschke {
  double angle;
  std::vector<BlaschkeFactor> factors;
  friend bool operator==(const Blaschke&, const Blaschke&) = default;
};

}  // namespace prim

using Primitive =
    std::variant<prim::Cayley, prim::InvCayley, prim::Rot, prim::DiskAut,
                 prim::HShift, prim::HScale, prim::HNudge, prim::Blaschke>;

namespace detail {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

inline bool finite_real(double x) { return std::isfinite(x); }

}  // namespace detail

inline Model primitive_domain(const Primitive& p) {
  return std::visit(
      detail::Overloaded{
          [](const prim::Cayley&) { return Model::Disk; },
          [](const prim::InvCayley&) { return Model::HalfPlane; },
          [](const prim::Rot&) { return Model::Disk; },
          [](const prim::DiskAut&) { return Model::Disk; },
          [](const prim::HShift&) { return Model::HalfPlane; },
          [](const prim::HScale&) { return Model::HalfPlane; },
          [](const prim::HNudge&) { return Model::HalfPlane; },
          [](const prim::Blaschke&) { return Model::Disk; },
      },
      p);
}

inline Model primitive_codomain(const Primitive& p) {
  if (std::holds_alternative<prim::Cayley>(p)) return Model::HalfPlane;
  if (std::holds_alternative<prim::InvCayley>(p)) return Model::Disk;
  return primitive_domain(p);
}

/// Throws ConstraintError naming the violated constraint.
inline void validate_primitive(const Primitive& p) {
  const auto fail = [](const std::string& what) {
    throw ConstraintError("constraint " + what + " violated");
  };
  std::visit(
      detail::Overloaded{
          [](const prim::Cayley&) {},
          [](const prim::InvCayley&) {},
          [&](const prim::Rot& r) {
            if (!detail::finite_real(r.angle)) fail("rot: finite angle");
          },
          [&](const prim::DiskAut& g) {
            if (!detail::finite_real(g.angle)) fail("diskaut: finite angle");
            if (!detail::in_model(Model::Disk, g.a)) fail("diskaut: |a| < 1");
          },
          [&](const prim::HShift& s) {
            if (!detail::finite(s.b)) fail("hshift: finite b");
            if (s.b.imag() < 0.0) fail("hshift: Im b >= 0");
            if (s.b == Complex{}) fail("hshift: b != 0");
          },
          [&](const prim::HScale& s) {
            if (!(s.a > 0.0) || !detail::finite_real(s.a)) {
              fail("hscale: a > 0");
            }
          },
          [&](const prim::HNudge& n) {
            if (!detail::finite(n.c)) fail("hnudge: finite c");
            if (n.c.imag() < 0.0) fail("hnudge: Im c >= 0");
          },
          [&](const prim::Blaschke& b) {
            if (!detail::finite_real(b.angle)) fail("blaschke: finite angle");
            for (const auto& f : b.factors) {
              if (!detail::in_model(Model::Disk, f.zero)) {
                fail("blaschke: |a_k| < 1");
              }
              if (f.multiplicity < 1) fail("blaschke: m_k >= 1");
            }
          },
      },
      p);
}

class MapExpr {
 public:
  enum class Kind { Primitive, Compose, Iterate };

  static MapExpr make(Primitive p);
  /// outer o inner; throws TypeError unless codomain(inner) == domain(outer).
  static MapExpr compose(MapExpr outer, MapExpr inner);
  /// base^count, count >= 1; base must be an endo-map.
  static MapExpr iterate(MapExpr base, int count);

  Kind kind() const noexcept;
  Model domain() const noexcept;
  Model codomain() const noexcept;
  bool is_endo() const noexcept { return domain() == codomain(); }

  const Primitive& primitive() const;
  const MapExpr& outer() const;
  const MapExpr& inner() const;
  const MapExpr& base() const;
  int count() const;

  friend bool operator==(const MapExpr& a, const MapExpr& b);

 private:
  struct Node;
  explicit MapExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct MapExpr::Node {
  Kind kind;
  Model domain;
  Model codomain;
  Primitive prim;
  std::vector<MapExpr> children;  // {outer, inner} or {base}
  int count = 0;
};

inline MapExpr MapExpr::make(Primitive p) {
  validate_primitive(p);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Primitive;
  n->domain = primitive_domain(p);
  n->codomain = primitive_codomain(p);
  n->prim = std::move(p);
  return MapExpr(std::move(n));
}

inline MapExpr MapExpr::compose(MapExpr outer, MapExpr inner) {
  if (inner.codomain() != outer.domain()) {
    throw TypeError("cannot compose: inner codomain " +
                    std::string(model_name(inner.codomain())) +
                    " != outer domain " +
                    std::string(model_name(outer.domain())));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compose;
  n->domain = inner.domain();
  n->codomain = outer.codomain();
  n->children = {std::move(outer), std::move(inner)};
  return MapExpr(std::move(n));
}

inline MapExpr MapExpr::iterate(MapExpr base, int count) {
  if (!base.is_endo()) {
    throw TypeError("cannot iterate a map from " +
                    std::string(model_name(base.domain())) + " to " +
                    std::string(model_name(base.codomain())));
  }
  if (count < 1) throw ConstraintError("constraint iterate: n >= 1 violated");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Iterate;
  n->domain = base.domain();
  n->codomain = base.codomain();
  n->count = count;
  n->children = {std::move(base)};
  return MapExpr(std::move(n));
}

inline MapExpr::Kind MapExpr::kind() const noexcept { return node_->kind; }
inline Model MapExpr::domain() const noexcept { return node_->domain; }
inline Model MapExpr::codomain() const noexcept { return node_->codomain; }

inline const Primitive& MapExpr::primitive() const {
  if (kind() != Kind::Primitive) throw std::logic_error("not a primitive");
  return node_->prim;
}
inline const MapExpr& MapExpr::outer() const {
  if (kind() != Kind::Compose) throw std::logic_error("not a composition");
  return node_->children[0];
}
inline const MapExpr& MapExpr::inner() const {
  if (kind() != Kind::Compose) throw std::logic_error("not a composition");
  return node_->children[1];
}
inline const MapExpr& MapExpr::base() const {
  if (kind() != Kind::Iterate) throw std::logic_error("not an iterate");
  return node_->children[0];
}
inline int MapExpr::count() const {
  if (kind() != Kind::Iterate) throw std::logic_error("not an iterate");
  return node_->count;
}

inline bool operator==(const MapExpr& a, const MapExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case MapExpr::Kind::Primitive:
      return a.primitive() == b.primitive();
    case MapExpr::Kind::Compose:
      return a.outer() == b.outer() && a.inner() == b.inner();
    case MapExpr::Kind::Iterate:
      return a.count() == b.count() && a.base() == b.base();
  }
  return false;
}

/// Builders for the primitives and for right-folded composition chains.
namespace maps {

inline MapExpr cayley() { return MapExpr::make(prim::Cayley{}); }
inline MapExpr invcayley() { return MapExpr::make(prim::InvCayley{}); }
inline MapExpr rot(double angle) { return MapExpr::make(prim::Rot{angle}); }
inline MapExpr diskaut(double angle, Complex a) {
  return MapExpr::make(prim::DiskAut{angle, a});
}
inline MapExpr hshift(Complex b) { return MapExpr::make(prim::HShift{b}); }
inline MapExpr hscale(double a) { return MapExpr::make(prim::HScale{a}); }
inline MapExpr hnudge(Complex c) { return MapExpr::make(prim::HNudge{c}); }
inline MapExpr blaschke(double angle,
                        std::vector<prim::BlaschkeFactor> factors) {
  return MapExpr::make(prim::Blaschke{angle, std::move(factors)});
}

/// chain({f, g, h}) = f o g o h, built as Compose(f, Compose(g, h)).
inline MapExpr chain(std::vector<MapExpr> parts) {
  if (parts.empty()) throw std::invalid_argument("empty composition chain");
  MapExpr acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
    acc = MapExpr::compose(*it, acc);
  }
  return acc;
}

/// Psi^-1 o F o Psi for a half-plane endo-map F.
inline MapExpr to_disk(const MapExpr& half_plane_map) {
  return chain({invcayley(), half_plane_map, cayley()});
}

}  // namespace maps

// ---------------------------------------------------------------------------
// Structural simplification

namespace detail {

// Apply-order list of composition factors; Iterate nodes stay atomic.
inline void flatten(const MapExpr& m, std::vector<MapExpr>& out) {
  if (m.kind() == MapExpr::Kind::Compose) {
    flatten(m.inner(), out);
    flatten(m.outer(), out);
  } else {
    out.push_back(m);
  }
}

template <class P>
inline const P* get_prim(const MapExpr& m) {
  return m.kind() == MapExpr::Kind::Primitive ? std::get_if<P>(&m.primitive())
                                              : nullptr;
}

}  // namespace detail

namespace detail {

inline std::vector<MapExpr> simplify_units(std::vector<MapExpr> units) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<MapExpr> out;
    out.reserve(units.size());
    for (const auto& u : units) {
      if (const auto* r = get_prim<prim::Rot>(u);
          r && std::remainder(r->angle, 2.0 * std::numbers::pi) == 0.0) {
        changed = true;
        continue;
      }
      if (!out.empty()) {
        const MapExpr& prev = out.back();
        const bool cancel =
            (get_prim<prim::Cayley>(prev) && get_prim<prim::InvCayley>(u)) ||
            (get_prim<prim::InvCayley>(prev) && get_prim<prim::Cayley>(u));
        if (cancel) {
          out.pop_back();
          changed = true;
          continue;
        }
        const auto* r1 = get_prim<prim::Rot>(prev);
        const auto* r2 = get_prim<prim::Rot>(u);
        if (r1 && r2) {
          const double angle = r1->angle + r2->angle;
          out.pop_back();
          out.push_back(maps::rot(angle));
          changed = true;
          continue;
        }
      }
      out.push_back(u);
    }
    units = std::move(out);
  }
  return units;
}

}  // namespace detail

/// Cancels adjacent Cayley/InvCayley pairs, merges adjacent rotations and
/// drops trivial ones. The result evaluates to the same map.
inline MapExpr simplify(const MapExpr& m) {
  std::vector<MapExpr> units;
  detail::flatten(m, units);
  for (auto& u : units) {
    if (u.kind() == MapExpr::Kind::Iterate) {
      u = MapExpr::iterate(simplify(u.base()), u.count());
    }
  }
  units = detail::simplify_units(std::move(units));
  if (units.empty()) {
    return m.domain() == Model::Disk ? maps::rot(0.0) : maps::hscale(1.0);
  }
  std::vector<MapExpr> outer_first(units.rbegin(), units.rend());
  return maps::chain(std::move(outer_first));
}

}  // namespace heins_lab
