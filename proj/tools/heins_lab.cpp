// heins_lab: command-line front end.
//
// Exit codes: 0 decided / success, 2 undecided, 1 input or precondition
// error, 3 acceptance-suite failure.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heins_lab/heins_lab.hpp"

namespace fs = std::filesystem;
using namespace heins_lab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitSuiteFailure = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_complex(item));
  }
  if (out.empty()) throw ParseError(0, "expected at least one complex number");
  return out;
}

MapExpr load_map(const std::string& text) {
  return parse_map(resolve_map_text(text));
}

/// A user coordinate in the map's own model.
Point source_point(const MapExpr& m, Complex c) { return Point(m.domain(), c); }

/// Default probes: the five disk seeds, expressed in the map's model.
std::vector<Point> default_probes(const MapExpr& m,
                                  const std::vector<Complex>& disk) {
  std::vector<Point> out;
  for (const Complex& z : disk) {
    out.emplace_back(m.domain(),
                     m.domain() == Model::Disk ? z : detail::cayley(z));
  }
  return out;
}

std::vector<Point> probes_from(const MapExpr& m, const std::string& text,
                               const std::vector<Complex>& disk_default) {
  if (text.empty()) return default_probes(m, disk_default);
  std::vector<Point> out;
  for (const Complex& c : parse_complex_list(text)) out.push_back(source_point(m, c));
  return out;
}

Json frame_json(const DynamicsFrame& fr, const WolffEstimate& w) {
  Json j;
  j["wolff"] = to_json(w);
  j["coordinates"] = fr.boundary() ? "half_plane" : "disk";
  if (fr.tau) j["tau"] = json_complex(*fr.tau);
  j["working_map"] = format_map(fr.working_map());
  return j;
}

struct Common {
  std::string map;
  std::string out;
  unsigned jobs = 1;
};

fs::path out_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("HEINS_LAB_OUT"); env && *env) return env;
  return ".";
}

void emit(const Json& j) { std::cout << dump_json(j); }

// ---------------------------------------------------------------------------

int cmd_classify(const Common& c, std::size_t n, double tol,
                 const std::string& seeds) {
  const MapExpr m = load_map(c.map);
  ClassifyOptions opt;
  opt.n = n;
  opt.tol = tol;
  opt.jobs = c.jobs;
  if (!seeds.empty()) opt.seeds = parse_complex_list(seeds);
  const Classification cl = classify(m, opt);
  emit(to_json(cl));
  return cl.decided() ? kExitOk : kExitUndecided;
}

DynamicsFrame frame_for(const MapExpr& m, WolffEstimate* w) {
  *w = estimate_wolff(m, default_seeds(), ClassifyOptions{}.n,
                      ClassifyOptions{}.tol);
  return make_frame(m, *w, ClassifyOptions{}.tol);
}

int cmd_orbit(const Common& c, std::size_t n, const std::string& start) {
  const MapExpr m = load_map(c.map);
  if (!m.is_endo()) throw TypeError("orbit needs an endo-map");
  const Point p = start.empty()
                      ? default_probes(m, {Complex(0.0, 0.0)}).front()
                      : source_point(m, parse_complex(start));
  WolffEstimate w;
  const DynamicsFrame fr = frame_for(m, &w);
  const OrbitRecord rec =
      orbit(fr.working_map(), fr.to_frame(p), n, fr.horizon());
  const fs::path dir = out_dir(c);
  write_text_file(dir / "orbit.csv", orbit_csv(rec));
  Json j;
  j["schema"] = kSchemaVersion;
  j["map"] = format_map(m);
  j["start"] = json_complex(p.coordinate());
  j["frame"] = frame_json(fr, w);
  j["orbit"] = to_json(rec);
  if (rec.model == Model::HalfPlane) j["cone"] = to_json(nontangential_diagnostic(rec));
  j["csv"] = (dir / "orbit.csv").string();
  write_text_file(dir / "orbit.json", dump_json(j));
  emit(j);
  return kExitOk;
}

int cmd_step(const Common& c, std::size_t n, double eps,
             const std::string& points) {
  const MapExpr m = load_map(c.map);
  if (!m.is_endo()) throw TypeError("step needs an endo-map");
  const std::vector<Point> probes = probes_from(m, points, default_seeds());
  WolffEstimate w;
  const DynamicsFrame fr = frame_for(m, &w);
  const auto steps = parallel_map(
      probes, [&](const Point& p) { return step_estimate(fr, p, n, eps); },
      c.jobs);
  const StepClass verdict = combine_steps(steps);
  Json j;
  j["schema"] = kSchemaVersion;
  j["map"] = format_map(m);
  j["frame"] = frame_json(fr, w);
  j["n"] = n;
  j["eps_zero"] = eps;
  Json arr = Json::array();
  for (const auto& s : steps) arr.push_back(to_json(s));
  j["steps"] = arr;
  j["verdict"] = step_class_name(verdict);
  write_text_file(out_dir(c) / "step.json", dump_json(j));
  emit(j);
  return verdict == StepClass::Undecided ? kExitUndecided : kExitOk;
}

int cmd_straighten(const Common& c, std::size_t n, double tol,
                   const std::string& base, const std::string& ref,
                   const std::string& grid) {
  const MapExpr m = load_map(c.map);
  if (!m.is_endo()) throw TypeError("straighten needs an endo-map");
  WolffEstimate w;
  const DynamicsFrame fr = frame_for(m, &w);
  const auto to_disk = [&](Complex x) {
    return fr.source_to_disk(source_point(m, x));
  };
  const Complex z0 = to_disk(base.empty() ? (m.domain() == Model::Disk
                                                 ? Complex(0.0, 0.0)
                                                 : Complex(0.0, 1.0))
                                          : parse_complex(base));
  const Complex w0 = to_disk(ref.empty() ? (m.domain() == Model::Disk
                                                ? Complex(0.5, 0.0)
                                                : Complex(0.0, 3.0))
                                         : parse_complex(ref));
  std::vector<Complex> g;
  if (grid.empty() || grid == "default") {
    g = default_grid(z0, w0);
  } else {
    for (const Complex& x : parse_complex_list(grid)) g.push_back(to_disk(x));
  }
  const StraighteningLimit lim = straightening_limit(fr, z0, w0, g, n, tol);
  const fs::path dir = out_dir(c);
  write_text_file(dir / "straightening.csv", straightening_csv(lim));
  Json j;
  j["schema"] = kSchemaVersion;
  j["map"] = format_map(m);
  j["frame"] = frame_json(fr, w);
  j["straightening"] = to_json(lim);
  j["csv"] = (dir / "straightening.csv").string();
  write_text_file(dir / "straightening.json", dump_json(j));
  emit(j);
  return lim.converged ? kExitOk : kExitUndecided;
}

int cmd_valiron(const Common& c, std::size_t n, const std::string& points,
                const std::string& base) {
  const MapExpr m = load_map(c.map);
  if (!m.is_endo()) throw TypeError("valiron needs an endo-map");
  ClassifyOptions opt;
  opt.jobs = c.jobs;
  const Classification cl = classify(m, opt);
  if (cl.kind == MapClass::Undecided) {
    emit(to_json(cl));
    return kExitUndecided;
  }
  (void)detail::require_parabolic(cl);  // "map not parabolic" otherwise
  const std::vector<Point> probes = probes_from(m, points, ratio_probes());
  const Point z0 = base.empty() ? default_probes(m, {Complex(0.0, 0.0)}).front()
                                : source_point(m, parse_complex(base));
  const auto ratios = parallel_map(
      probes, [&](const Point& p) { return ratio_sequence(cl, p, z0, n); },
      c.jobs);
  std::vector<Point> all = probes;
  all.insert(all.begin(), z0);
  const PropagationResult prop =
      slope_propagation_check(cl, all, n, kSlopeTolerance, c.jobs);

  const fs::path dir = out_dir(c);
  Json j;
  j["schema"] = kSchemaVersion;
  j["map"] = format_map(m);
  j["classification"] = to_json(cl);
  Json rs = Json::array();
  for (const auto& r : ratios) rs.push_back(to_json(r));
  j["ratios"] = rs;
  Json ss = Json::array();
  Json files = Json::array();
  for (std::size_t k = 0; k < prop.slopes.size(); ++k) {
    ss.push_back(to_json(prop.slopes[k]));
    if (k >= 1) {
      const fs::path f = dir / ("valiron_" + std::to_string(k - 1) + ".csv");
      write_text_file(f, valiron_csv(ratios[k - 1], prop.slopes[k]));
      files.push_back(f.string());
    }
  }
  j["slopes"] = ss;
  j["slope_propagation"] = Json{{"verdict", propagation_name(prop.verdict)},
                                {"reference", json_real(prop.reference)},
                                {"max_deviation", json_real(prop.max_deviation)}};
  int code = cl.decided() ? kExitOk : kExitUndecided;
  if (cl.step == StepClass::Positive) {
    const ArgDichotomyResult d = arg_dichotomy_check(cl, all, n, c.jobs);
    j["arg_dichotomy"] = arg_verdict_name(d.verdict);
    if (d.verdict == ArgVerdict::Undecided) code = kExitUndecided;
  } else {
    j["arg_dichotomy"] = "not_applicable";
  }
  j["csv"] = files;
  write_text_file(dir / "valiron.json", dump_json(j));
  emit(j);
  return code;
}

int cmd_suite(const Common& c, const std::string& pattern,
              const std::string& catalog_file, std::size_t fuzz) {
  std::vector<CatalogEntry> entries = catalog();
  if (!catalog_file.empty()) {
    std::ifstream f(catalog_file);
    if (!f) throw std::invalid_argument("cannot read " + catalog_file);
    entries = catalog_from_json(Json::parse(f));
  }
  entries = filter_catalog(entries, pattern);
  if (entries.empty()) throw std::invalid_argument("no catalog entry matches");
  SuiteOptions opt;
  opt.jobs = c.jobs;
  opt.fuzz_inputs = fuzz;
  const SuiteResult res = run_suite(entries, opt, pattern.empty());
  const fs::path dir = out_dir(c);
  const std::string stamp = utc_timestamp();
  Json rollup = res.rollup;
  rollup["timestamp"] = stamp;
  Json files = Json::array();
  for (const auto& r : res.maps) {
    const fs::path f = dir / ("report_" + r.entry.name + ".json");
    write_text_file(f, dump_json(experiment_report(r, opt, stamp)));
    files.push_back(f.string());
  }
  rollup["reports"] = files;
  write_text_file(dir / "report.json", dump_json(rollup));
  for (const auto& r : res.maps) {
    std::cout << (r.pass() ? "PASS " : "FAIL ") << r.entry.name << "\n";
  }
  for (const auto& g : res.global) {
    std::cout << (g.pass ? "PASS " : "FAIL ") << "criterion " << g.criterion
              << " " << g.invariant << ": " << g.detail << "\n";
  }
  if (!res.pass) {
    for (const auto& f : res.failures) std::cerr << "FAIL " << f << "\n";
    return kExitSuiteFailure;
  }
  std::cout << "suite passed: " << res.maps.size() << " map reports in "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_catalog(bool as_json) {
  if (as_json) {
    Json arr = Json::array();
    for (const auto& e : catalog()) arr.push_back(to_json(e));
    emit(arr);
    return kExitOk;
  }
  for (const auto& e : catalog()) {
    std::cout << e.name << " = " << e.dsl << "\n";
    std::cout << "  class: " << map_class_name(e.expected_class);
    if (e.expected_step) std::cout << "/" << step_class_name(*e.expected_step);
    if (e.expected_lambda && e.expected_class == MapClass::Hyperbolic) {
      std::cout << "  lambda: " << detail::format_real(*e.expected_lambda);
    }
    if (e.expected_arg) std::cout << "  arg: " << detail::format_real(*e.expected_arg);
    if (e.expected_slope) std::cout << "  slope: " << format_complex(*e.expected_slope);
    std::cout << "\n  note: " << e.note << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for holomorphic self-maps of the disk"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub, bool needs_map) {
    auto* opt = sub->add_option("--map", common.map,
                                "map expression or catalog:<name>");
    if (needs_map) opt->required();
    sub->add_option("--out", common.out,
                    "output directory (default: $HEINS_LAB_OUT or .)");
    sub->add_option("--jobs", common.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
  };

  std::size_t n = 0;
  double tol = 0.0, eps = 1e-3;
  std::string seeds, start, points, base, ref, grid, pattern, catalog_file;
  std::size_t fuzz = 100'000;
  bool as_json = false;

  auto* classify_cmd = app.add_subcommand("classify", "classify a self-map");
  add_common(classify_cmd, true);
  classify_cmd->add_option("--n", n, "iterations")->default_val(100'000);
  classify_cmd->add_option("--tol", tol, "Wolff point tolerance")->default_val(1e-8);
  classify_cmd->add_option("--seeds", seeds, "disk seeds \"z1;z2;...\"");

  auto* orbit_cmd = app.add_subcommand("orbit", "write an orbit CSV");
  add_common(orbit_cmd, true);
  orbit_cmd->add_option("--n", n, "iterations")->default_val(10'000);
  orbit_cmd->add_option("--start", start, "start point in the map's model");

  auto* step_cmd = app.add_subcommand("step", "hyperbolic step estimates");
  add_common(step_cmd, true);
  step_cmd->add_option("--n", n, "iterations")->default_val(10'000);
  step_cmd->add_option("--eps", eps, "zero-step threshold")->default_val(1e-3);
  step_cmd->add_option("--points", points, "probe points \"z1;z2;...\"");

  auto* straighten_cmd = app.add_subcommand("straighten", "left straightening");
  add_common(straighten_cmd, true);
  straighten_cmd->add_option("--n", n, "largest iterate")->default_val(kStraighteningN);
  straighten_cmd->add_option("--tol", tol, "convergence tolerance")->default_val(1e-4);
  straighten_cmd->add_option("--base", base, "base point z0");
  straighten_cmd->add_option("--ref", ref, "reference point w0");
  straighten_cmd->add_option("--grid", grid, "\"default\" or \"z1;z2;...\"");

  auto* valiron_cmd = app.add_subcommand("valiron", "ratio and slope limits");
  add_common(valiron_cmd, true);
  valiron_cmd->add_option("--n", n, "iterations")->default_val(10'000);
  valiron_cmd->add_option("--points", points, "probe points \"z1;z2;...\"");
  valiron_cmd->add_option("--base", base, "base point z0");

  auto* suite_cmd = app.add_subcommand("suite", "run the acceptance suite");
  add_common(suite_cmd, false);
  suite_cmd->add_option("--catalog", pattern, "entry name pattern, e.g. 'parabolic_*'");
  suite_cmd->add_option("--catalog-file", catalog_file, "catalog JSON to use instead");
  suite_cmd->add_option("--fuzz", fuzz, "parser fuzz inputs")->default_val(100'000);

  auto* catalog_cmd = app.add_subcommand("catalog", "list the built-in maps");
  catalog_cmd->add_flag("--json", as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*classify_cmd) return cmd_classify(common, n, tol, seeds);
    if (*orbit_cmd) return cmd_orbit(common, n, start);
    if (*step_cmd) return cmd_step(common, n, eps, points);
    if (*straighten_cmd) return cmd_straighten(common, n, tol, base, ref, grid);
    if (*valiron_cmd) return cmd_valiron(common, n, points, base);
    if (*suite_cmd) return cmd_suite(common, pattern, catalog_file, fuzz);
    if (*catalog_cmd) return cmd_catalog(as_json);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.message() << " at offset " << e.offset();
    if (!e.expected().empty()) std::cerr << " (expected " << e.expected() << ")";
    std::cerr << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
