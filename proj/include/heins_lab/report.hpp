#pragma once

// JSON and CSV serialization. Complex numbers are [re, im]; reals use the
// shortest round-trip form; files are written with LF line endings.

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heins_lab/catalog.hpp"
#include "heins_lab/dynamics.hpp"
#include "heins_lab/map_parser.hpp"
#include "heins_lab/straightening.hpp"
#include "heins_lab/valiron.hpp"

namespace heins_lab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

#ifndef HEINS_LAB_VERSION
#define HEINS_LAB_VERSION "0.1.0"
#endif
inline constexpr const char* kToolVersion = HEINS_LAB_VERSION;

inline Json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline Json json_complex(Complex c) {
  return Json::array({json_real(c.real()), json_real(c.imag())});
}

inline Json json_complex_list(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const Complex& c : v) a.push_back(json_complex(c));
  return a;
}

inline std::string csv_real(double x) { return detail::format_real(x); }

// ---------------------------------------------------------------------------

inline Json to_json(const WolffEstimate& w) {
  Json j;
  j["kind"] = wolff_kind_name(w.kind);
  j["point"] = json_complex(w.point);
  if (w.kind == WolffKind::InteriorFixed) j["multiplier"] = json_complex(w.multiplier);
  j["residual"] = json_real(w.residual);
  j["spread"] = json_real(w.spread);
  j["last_step"] = json_real(w.last_step);
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

inline Json to_json(const MultiplierEstimate& m) {
  return Json{{"decided", m.decided},
              {"lambda_inf", json_real(m.value)},
              {"imag", json_real(m.imag)},
              {"spread", json_real(m.spread)},
              {"richardson", m.richardson},
              {"n_used", m.used}};
}

inline Json to_json(const StepEstimate& s) {
  return Json{{"probe", json_complex(s.probe)},
              {"s_hat", json_real(s.estimate)},
              {"d_N", json_real(s.tail)},
              {"d_0", json_real(s.first)},
              {"tail_ratio", json_real(s.tail_ratio)},
              {"verdict", step_class_name(s.verdict)},
              {"n_used", s.used}};
}

inline Json to_json(const Classification& c) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["map"] = c.map;
  j["class"] = map_class_name(c.kind);
  switch (c.kind) {
    case MapClass::Elliptic:
      j["fixed"] = json_complex(c.wolff.point);
      j["multiplier"] = json_complex(c.multiplier);
      j["multiplier_abs"] = json_real(std::abs(c.multiplier));
      break;
    case MapClass::Hyperbolic:
      j["tau"] = json_complex(c.frame && c.frame->tau ? *c.frame->tau : c.wolff.point);
      j["lambda"] = json_real(c.lambda);
      break;
    case MapClass::Parabolic:
      j["tau"] = json_complex(c.frame && c.frame->tau ? *c.frame->tau : c.wolff.point);
      j["lambda"] = json_real(c.lambda);
      j["step_class"] = step_class_name(c.step);
      break;
    case MapClass::Undecided:
      break;
  }
  j["decided"] = c.decided();
  j["wolff"] = to_json(c.wolff);
  if (c.kind != MapClass::Elliptic && c.wolff.kind == WolffKind::Boundary) {
    j["multiplier_at_infinity"] = to_json(c.at_infinity);
  }
  if (!c.steps.empty()) {
    Json steps = Json::array();
    for (const auto& s : c.steps) steps.push_back(to_json(s));
    j["steps"] = steps;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline Json to_json(const NontangentialReport& n) {
  return Json{{"eps_all", json_real(n.eps_all)},
              {"eps_tail", json_real(n.eps_tail)},
              {"tangential", n.tangential},
              {"arg_min", json_real(n.arg_min)},
              {"arg_max", json_real(n.arg_max)},
              {"arg_range_tail", json_real(n.arg_range_tail)},
              {"bound_checked", n.bound_checked},
              {"bound_violations", n.bound_violations}};
}

inline Json to_json(const OrbitRecord& o) {
  Json j;
  j["map"] = o.map;
  j["start"] = json_complex(o.start);
  j["model"] = model_name(o.model);
  j["n_requested"] = o.requested;
  j["n_used"] = o.used();
  j["truncated"] = o.truncated;
  j["d_0"] = json_real(o.step.front());
  j["d_N"] = json_real(o.step.back());
  j["monotone"] = o.monotone();
  j["monotonicity_excess"] = json_real(o.monotonicity_excess);
  j["last"] = json_complex(o.points.back());
  return j;
}

inline Json to_json(const StraighteningLimit& s) {
  Json j;
  j["base"] = json_complex(s.base);
  j["ref"] = json_complex(s.ref);
  j["n"] = s.n;
  j["converged"] = s.converged;
  j["last_change"] = json_real(s.last_change);
  j["tol"] = json_real(s.tol);
  j["constant"] = s.constant;
  j["constancy"] = json_real(s.constancy);
  j["ref_value"] = json_real(s.ref_value);
  j["monotonicity_excess"] = json_real(s.monotonicity_excess);
  j["collapsed"] = s.collapsed;
  j["horizon_reached"] = s.horizon_reached;
  j["grid"] = json_complex_list(s.grid);
  j["values"] = json_complex_list(s.values);
  return j;
}

inline Json to_json(const RatioReport& r) {
  return Json{{"base", json_complex(r.base)},
              {"probe", json_complex(r.probe)},
              {"n", r.q.size() - 1},
              {"Q_N", json_complex(r.q.back())},
              {"error", json_real(r.final_error)},
              {"error_disk", json_real(r.final_error_disk)},
              {"tail_monotone", r.tail_monotone}};
}

inline Json to_json(const SlopeReport& s) {
  Json j{{"probe", json_complex(s.probe)},
         {"n", s.arg.size() - 1},
         {"arg_limit", json_real(s.arg_limit)},
         {"arg_range_tail", json_real(s.arg_range_tail)},
         {"converged", s.converged},
         {"sigma_limit", json_complex(s.sigma_limit)},
         {"unit_defect", json_real(s.unit_defect)}};
  if (s.theta) j["theta"] = json_real(*s.theta);
  return j;
}

inline Json to_json(const CatalogEntry& e) {
  Json j;
  j["name"] = e.name;
  j["dsl"] = e.dsl;
  j["class"] = map_class_name(e.expected_class);
  if (e.expected_step) j["step_class"] = step_class_name(*e.expected_step);
  if (e.expected_lambda) j["lambda"] = json_real(*e.expected_lambda);
  if (e.expected_arg) j["arg"] = json_real(*e.expected_arg);
  if (e.expected_slope) j["slope"] = json_complex(*e.expected_slope);
  j["note"] = e.note;
  return j;
}

namespace detail {

inline MapClass parse_class_name(const std::string& s) {
  for (MapClass c : {MapClass::Elliptic, MapClass::Hyperbolic,
                     MapClass::Parabolic, MapClass::Undecided}) {
    if (s == map_class_name(c)) return c;
  }
  throw std::invalid_argument("unknown class '" + s + "'");
}

inline StepClass parse_step_name(const std::string& s) {
  for (StepClass c : {StepClass::Zero, StepClass::Positive, StepClass::Undecided}) {
    if (s == step_class_name(c)) return c;
  }
  throw std::invalid_argument("unknown step class '" + s + "'");
}

}  // namespace detail

/// Reads a catalog written in the to_json(CatalogEntry) layout (a JSON array).
/// Closed-form step oracles are re-attached from the built-in entry of the
/// same name and DSL.
inline std::vector<CatalogEntry> catalog_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("catalog file must be an array");
  std::vector<CatalogEntry> out;
  for (const auto& item : j) {
    CatalogEntry e;
    e.name = item.at("name").get<std::string>();
    e.dsl = item.at("dsl").get<std::string>();
    e.expected_class = detail::parse_class_name(item.at("class").get<std::string>());
    if (item.contains("step_class")) {
      e.expected_step = detail::parse_step_name(item["step_class"].get<std::string>());
    }
    if (item.contains("lambda")) e.expected_lambda = item["lambda"].get<double>();
    if (item.contains("arg")) e.expected_arg = item["arg"].get<double>();
    if (item.contains("slope")) {
      e.expected_slope = Complex(item["slope"].at(0).get<double>(),
                                 item["slope"].at(1).get<double>());
    }
    if (item.contains("note")) e.note = item["note"].get<std::string>();
    if (const CatalogEntry* builtin = find_catalog_entry(e.name);
        builtin && builtin->dsl == e.dsl) {
      e.step_tail_at_origin = builtin->step_tail_at_origin;
      e.step_tail_tol = builtin->step_tail_tol;
    }
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string orbit_csv(const OrbitRecord& o) {
  std::string s = "n,re,im,d_n,ratio_re,ratio_im,arg,im_over_abs\n";
  const bool half = o.model == Model::HalfPlane;
  for (std::size_t k = 0; k <= o.used(); ++k) {
    const Complex w = o.points[k];
    s += std::to_string(k);
    s += ',' + csv_real(w.real());
    s += ',' + csv_real(w.imag());
    s += ',' + csv_real(o.step[k]);
    s += ',' + (half ? csv_real(o.ratio[k].real()) : std::string());
    s += ',' + (half ? csv_real(o.ratio[k].imag()) : std::string());
    s += ',' + csv_real(std::arg(w));
    s += ',' + (w == Complex{} ? csv_real(0.0) : csv_real(w.imag() / std::abs(w)));
    s += '\n';
  }
  return s;
}

inline std::string straightening_csv(const StraighteningLimit& lim) {
  std::string s = "n,grid_index,re,im,abs\n";
  for (const auto& rec : lim.history) {
    for (std::size_t k = 0; k < rec.values.size(); ++k) {
      const Complex v = rec.values[k];
      s += std::to_string(rec.n) + ',' + std::to_string(k) + ',' +
           csv_real(v.real()) + ',' + csv_real(v.imag()) + ',' +
           csv_real(std::abs(v)) + '\n';
    }
  }
  return s;
}

inline std::string valiron_csv(const RatioReport& r, const SlopeReport& s) {
  std::string out = "n,q_re,q_im,sigma_re,sigma_im,arg\n";
  const std::size_t n = std::min(r.q.size(), s.sigma.size());
  for (std::size_t k = 0; k < n; ++k) {
    out += std::to_string(k) + ',' + csv_real(r.q[k].real()) + ',' +
           csv_real(r.q[k].imag()) + ',' + csv_real(s.sigma[k].real()) + ',' +
           csv_real(s.sigma[k].imag()) + ',' + csv_real(s.arg[k]) + '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace heins_lab
