#include "invball/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "invball/error.hpp"
#include "invball/lipschitz.hpp"

namespace invball {

namespace {

using nlohmann::json;

// Maps value paths ("runs[2].eps") to source lines for diagnostics. Runs
// over text the JSON parser has already accepted.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : t_(text) {
    skip();
    value("");
  }

  int line_of(std::string path) const {
    while (true) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      const auto cut = path.find_last_of(".[");
      if (cut == std::string::npos || cut == 0) break;
      path.resize(cut);
    }
    return 0;
  }

 private:
  void skip() {
    while (i_ < t_.size()) {
      const char c = t_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++i_;
      } else if (c == '/' && i_ + 1 < t_.size() && t_[i_ + 1] == '/') {
        while (i_ < t_.size() && t_[i_] != '\n') ++i_;
      } else if (c == '/' && i_ + 1 < t_.size() && t_[i_ + 1] == '*') {
        i_ += 2;
        while (i_ + 1 < t_.size() && !(t_[i_] == '*' && t_[i_ + 1] == '/')) {
          if (t_[i_] == '\n') ++line_;
          ++i_;
        }
        i_ += 2;
      } else {
        break;
      }
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < t_.size() && t_[i_] != '"') {
      if (t_[i_] == '\\') ++i_;
      if (i_ < t_.size()) out += t_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    lines_.emplace(path, line_);
    if (i_ >= t_.size()) return;
    const char c = t_[i_];
    if (c == '{') {
      ++i_;
      skip();
      while (i_ < t_.size() && t_[i_] != '}') {
        const std::string key = string_token();
        skip();
        ++i_;  // colon
        skip();
        value(path.empty() ? key : path + "." + key);
        skip();
        if (i_ < t_.size() && t_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip();
      int k = 0;
      while (i_ < t_.size() && t_[i_] != ']') {
        value(path + "[" + std::to_string(k++) + "]");
        skip();
        if (i_ < t_.size() && t_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < t_.size() && std::string_view(",]} \t\r\n/").find(t_[i_]) == std::string_view::npos) {
        ++i_;
      }
    }
  }

  std::string_view t_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Loader {
 public:
  Loader(std::string_view text, const LoadOptions& options) : index_(text), options_(options) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::string where = path.empty() ? "scenario" : path;
    const int line = index_.line_of(path);
    if (line > 0) where += " (line " + std::to_string(line) + ")";
    throw InvalidScenario(where + ": " + message);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(join(path, key), "unknown field");
      }
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  double number_or(const json& obj, const std::string& path, const char* key, double fallback) const {
    return obj.contains(key) ? number(obj[key], join(path, key)) : fallback;
  }

  long long integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
  }

  int positive_int(const json& obj, const std::string& path, const char* key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const long long x = integer(obj[key], join(path, key));
    if (x < 1 || x > 1'000'000) fail(join(path, key), "expected an integer in [1, 1000000]");
    return static_cast<int>(x);
  }

  Point3 point(const json& v, const std::string& path, bool* had_z = nullptr) const {
    if (!v.is_array() || v.size() < 2 || v.size() > 3) {
      fail(path, "expected [x, y] or [x, y, z] in metres");
    }
    Point3 p{number(v[0], at(path, 0)), number(v[1], at(path, 1)), 0.0};
    if (v.size() == 3) p.z = number(v[2], at(path, 2));
    if (had_z) *had_z = v.size() == 3;
    return p;
  }

  BoundFunction bound(const json& v, const std::string& path) const {
    only_keys(v, path, {"constant", "table", "abs_sine", "lipschitz"});
    const int forms = static_cast<int>(v.contains("constant")) + static_cast<int>(v.contains("table")) +
                      static_cast<int>(v.contains("abs_sine"));
    if (forms != 1) fail(path, "give exactly one of constant, table, abs_sine");
    BoundFunction f = BoundFunction::constant(0.0);
    if (v.contains("constant")) {
      f = BoundFunction::constant(deg_to_rad(number(v["constant"], join(path, "constant"))));
    } else if (v.contains("table")) {
      const std::string tp = join(path, "table");
      const json& t = v["table"];
      if (!t.is_array() || t.empty()) fail(tp, "expected a non-empty list of [phi, psi] knots");
      std::vector<std::pair<double, double>> knots;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const json& k = t[i];
        if (!k.is_array() || k.size() != 2) fail(at(tp, i), "expected [phi, psi] in degrees");
        knots.emplace_back(deg_to_rad(number(k[0], at(at(tp, i), 0))),
                           deg_to_rad(number(k[1], at(at(tp, i), 1))));
        if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
          fail(at(tp, i), "knots must be sorted by strictly increasing phi");
        }
      }
      f = BoundFunction::table(std::move(knots));
    } else {
      const std::string sp = join(path, "abs_sine");
      const json& s = v["abs_sine"];
      only_keys(s, sp, {"offset", "amplitude", "scale"});
      for (const char* key : {"offset", "amplitude", "scale"}) {
        if (!s.contains(key)) fail(join(sp, key), "missing");
      }
      f = BoundFunction::abs_sine(number(s["offset"], join(sp, "offset")),
                                  number(s["amplitude"], join(sp, "amplitude")),
                                  deg_to_rad(number(s["scale"], join(sp, "scale"))));
    }
    if (v.contains("lipschitz")) {
      const double lip = number(v["lipschitz"], join(path, "lipschitz"));
      if (!(lip >= 0.0)) fail(join(path, "lipschitz"), "must be non-negative");
      f = f.with_declared_lipschitz(lip);
    }
    return f;
  }

  VisibilityCone cone_spec(const json& v, const std::string& path) const {
    if (v.is_string()) {
      const std::string name = v.get<std::string>();
      if (name == "E1") return cone_e1();
      if (name == "E2") return cone_e2();
      fail(path, "unknown builtin cone '" + name + "' (E1, E2)");
    }
    only_keys(v, path, {"theta1", "theta2", "lower", "upper"});
    VisibilityCone c;
    c.theta1 = deg_to_rad(number_or(v, path, "theta1", 0.0));
    c.theta2 = deg_to_rad(number_or(v, path, "theta2", 360.0));
    if (v.contains("lower")) c.lower = bound(v["lower"], join(path, "lower"));
    if (v.contains("upper")) c.upper = bound(v["upper"], join(path, "upper"));
    try {
      validate_cone(c);
    } catch (const InvalidScenario& e) {
      fail(path, e.what());
    }
    return c;
  }

  TerrainField terrain(const json& v, const std::string& path) const {
    if (!v.is_object() || v.size() != 1) {
      fail(path, "expected one of {\"affine\": [a, b, c, d]}, {\"min\": [...]}, {\"max\": [...]}, "
                 "{\"builtin\": ...}");
    }
    if (v.contains("affine")) {
      const json& a = v["affine"];
      const std::string ap = join(path, "affine");
      if (!a.is_array() || a.size() != 4) fail(ap, "expected [a, b, c, d] for a x + b y + c z + d");
      return TerrainField::affine(number(a[0], at(ap, 0)), number(a[1], at(ap, 1)),
                                  number(a[2], at(ap, 2)), number(a[3], at(ap, 3)));
    }
    for (const char* op : {"min", "max"}) {
      if (!v.contains(op)) continue;
      const json& list = v[op];
      const std::string lp = join(path, op);
      if (!list.is_array() || list.empty()) fail(lp, "expected a non-empty list of terrain nodes");
      std::vector<TerrainField> children;
      for (std::size_t i = 0; i < list.size(); ++i) children.push_back(terrain(list[i], at(lp, i)));
      return std::string_view(op) == "min" ? TerrainField::min_of(std::move(children))
                                           : TerrainField::max_of(std::move(children));
    }
    if (v.contains("builtin")) {
      const json& b = v["builtin"];
      const std::string bp = join(path, "builtin");
      if (b.is_string() && b.get<std::string>() == "block") return TerrainField::block_on_floor();
      if (b.is_object() && b.contains("floor")) {
        only_keys(b, bp, {"floor"});
        return TerrainField::flat_floor(number(b["floor"], join(bp, "floor")));
      }
      fail(bp, "expected \"block\" or {\"floor\": z0}");
    }
    fail(path, "unknown terrain node");
  }

  void solver_section(const json& v, const std::string& path, SolverParams& p) const {
    only_keys(v, path, {"gamma", "lambda", "eps_star", "eps_q", "max_iter", "eps_floor_ratio",
                        "delta_ratio", "grid"});
    p.gamma = number_or(v, path, "gamma", p.gamma);
    p.lambda = number_or(v, path, "lambda", p.lambda);
    if (v.contains("eps_star")) p.eps_star = number(v["eps_star"], join(path, "eps_star"));
    if (v.contains("eps_q")) p.eps_q = number(v["eps_q"], join(path, "eps_q"));
    if (v.contains("max_iter")) p.max_iter = integer(v["max_iter"], join(path, "max_iter"));
    p.eps_floor_ratio = number_or(v, path, "eps_floor_ratio", p.eps_floor_ratio);
    p.delta_ratio = number_or(v, path, "delta_ratio", p.delta_ratio);
    if (v.contains("grid")) {
      const std::string gp = join(path, "grid");
      const json& g = v["grid"];
      only_keys(g, gp, {"circle", "azimuth", "polar", "refine_candidates", "refine_levels"});
      p.grid.circle = positive_int(g, gp, "circle", p.grid.circle);
      p.grid.azimuth = positive_int(g, gp, "azimuth", p.grid.azimuth);
      p.grid.polar = positive_int(g, gp, "polar", p.grid.polar);
      p.grid.refine_candidates = positive_int(g, gp, "refine_candidates", p.grid.refine_candidates);
      if (g.contains("refine_levels")) {
        const long long lv = integer(g["refine_levels"], join(gp, "refine_levels"));
        if (lv < 0 || lv > 60) fail(join(gp, "refine_levels"), "expected an integer in [0, 60]");
        p.grid.refine_levels = static_cast<int>(lv);
      }
    }
  }

  ScenarioFile load(const json& root) {
    only_keys(root, "", {"task", "v0", "g", "kappa", "z_min", "weights", "solver", "clearance",
                         "terrain", "targets", "cones", "runs", "description"});
    if (!root.contains("task") || !root["task"].is_string()) fail("task", "expected \"I\", \"II.a\" or \"II.b\"");
    ScenarioFile out;
    try {
      out.task = parse_task(root["task"].get<std::string>());
    } catch (const Error& e) {
      fail("task", e.what());
    }
    const Task task = out.task;
    if (!root.contains("v0")) fail("v0", "missing muzzle speed (m/s)");
    if (!root.contains("kappa")) fail("kappa", "missing minimum downrange distance (m)");
    const double v0 = number(root["v0"], "v0");
    const double g = number_or(root, "", "g", kStandardGravity);
    const double kappa = number(root["kappa"], "kappa");
    if (!(v0 > 0.0)) fail("v0", "must be positive");
    if (!(g > 0.0)) fail("g", "must be positive");
    if (!(kappa > 0.0)) fail("kappa", "must be positive");
    double z_min = 0.0;
    if (task != Task::planar) {
      if (!root.contains("z_min")) fail("z_min", "missing lowest admissible height (m)");
      z_min = number(root["z_min"], "z_min");
    } else if (root.contains("z_min")) {
      out.warnings.push_back("z_min is ignored by task I");
    }

    std::optional<TerrainField> field;
    if (task == Task::terrain) {
      if (!root.contains("terrain")) fail("terrain", "task II.b needs a terrain");
      field = terrain(root["terrain"], "terrain");
    } else if (root.contains("terrain")) {
      fail("terrain", "only task II.b uses a terrain");
    }

    Scenario base;
    try {
      base = make_scenario(task, v0, kappa, z_min, Point3{}, cone_e1(), field, g);
    } catch (const Error& e) {
      fail("", e.what());
    }
    if (field) {
      try {
        validate_terrain(*field, z_min, base.reach.rho);
      } catch (const InvalidScenario& e) {
        fail("terrain", e.what());
      }
    }
    if (root.contains("weights")) {
      const json& w = root["weights"];
      if (!w.is_array()) fail("weights", "expected a list of numbers");
      std::vector<double> values;
      for (std::size_t i = 0; i < w.size(); ++i) values.push_back(number(w[i], at("weights", i)));
      try {
        base.weights = WeightSet::from(task, values);
      } catch (const Error& e) {
        fail("weights", e.what());
      }
    }
    if (root.contains("clearance")) {
      const json& c = root["clearance"];
      only_keys(c, "clearance", {"n_lambda", "n_mu", "refine_iters"});
      base.clearance.n_lambda = positive_int(c, "clearance", "n_lambda", base.clearance.n_lambda);
      base.clearance.n_mu = positive_int(c, "clearance", "n_mu", base.clearance.n_mu);
      if (c.contains("refine_iters")) {
        const long long n = integer(c["refine_iters"], "clearance.refine_iters");
        if (n < 0 || n > 200) fail("clearance.refine_iters", "expected an integer in [0, 200]");
        base.clearance.refine_iters = static_cast<int>(n);
      }
    }

    SolverParams solver;
    if (root.contains("solver")) solver_section(root["solver"], "solver", solver);

    std::map<std::string, json> targets;
    if (root.contains("targets")) {
      if (!root["targets"].is_object()) fail("targets", "expected an object of named points");
      for (const auto& [name, v] : root["targets"].items()) targets.emplace(name, v);
    }
    std::map<std::string, json> cones;
    if (root.contains("cones")) {
      if (!root["cones"].is_object()) fail("cones", "expected an object of named cones");
      for (const auto& [name, v] : root["cones"].items()) cones.emplace(name, v);
    }

    if (!root.contains("runs") || !root["runs"].is_array()) fail("runs", "expected a list of runs");
    const json& runs = root["runs"];
    for (std::size_t i = 0; i < runs.size(); ++i) {
      run(runs[i], at("runs", i), base, solver, targets, cones, out);
    }
    return out;
  }

 private:
  Point3 target_of(const json& v, const std::string& path, const std::map<std::string, json>& named,
                   Task task, std::string& label, ScenarioFile& out) const {
    std::string point_path = path;
    const json* p = &v;
    if (v.is_string()) {
      label = v.get<std::string>();
      auto it = named.find(label);
      if (it == named.end()) fail(path, "unknown target '" + label + "'");
      p = &it->second;
      point_path = "targets." + label;
    }
    bool had_z = false;
    Point3 m = point(*p, point_path, &had_z);
    if (!v.is_string()) label = format_point(m, had_z);
    if (task == Task::planar && had_z) {
      if (m.z != 0.0) {
        out.warnings.push_back(point_path + ": task I uses the ground-plane position; z = " +
                               format_number(m.z) + " dropped");
      }
      m.z = 0.0;
    } else if (task != Task::planar && !had_z) {
      fail(point_path, "tasks II.a and II.b need a 3-D target [x, y, z]");
    }
    return m;
  }

  static std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

  static std::string format_point(Point3 p, bool with_z) {
    std::string s = "(" + format_number(p.x) + " " + format_number(p.y);
    if (with_z) s += " " + format_number(p.z);
    return s + ")";
  }

  void run(const json& v, const std::string& path, const Scenario& base, const SolverParams& solver,
           const std::map<std::string, json>& targets, const std::map<std::string, json>& cones,
           ScenarioFile& out) const {
    only_keys(v, path, {"target", "targets", "cone", "eps", "max_iter", "eps_star", "eps_q", "label"});
    const Task task = base.task;

    Point3 m;
    std::string target_label;
    if (v.contains("target") == v.contains("targets")) {
      fail(path, "give exactly one of target, targets");
    }
    if (v.contains("target")) {
      m = target_of(v["target"], join(path, "target"), targets, task, target_label, out);
    } else {
      const std::string tp = join(path, "targets");
      const json& list = v["targets"];
      if (!list.is_array() || list.empty()) fail(tp, "expected a non-empty list of targets");
      if (task != Task::planar) fail(tp, "several targets are only supported by task I");
      if (!options_.chebyshev && list.size() > 1) {
        fail(tp, "several targets need Chebyshev-center reduction (--chebyshev)");
      }
      std::vector<Point2> pts;
      for (std::size_t i = 0; i < list.size(); ++i) {
        std::string unused;
        const Point3 p = target_of(list[i], at(tp, i), targets, task, unused, out);
        pts.push_back({p.x, p.y});
      }
      const Point2 c = chebyshev_center(pts);
      m = {c.x, c.y, 0.0};
      target_label = "center of " + std::to_string(pts.size()) + " targets";
    }
    if (v.contains("label")) {
      if (!v["label"].is_string()) fail(join(path, "label"), "expected a string");
      target_label = v["label"].get<std::string>();
    }

    if (!v.contains("cone")) fail(join(path, "cone"), "missing");
    const json& cv = v["cone"];
    std::string cone_label = "custom";
    VisibilityCone cone;
    if (cv.is_string()) {
      cone_label = cv.get<std::string>();
      if (auto it = cones.find(cone_label); it != cones.end()) {
        cone = cone_spec(it->second, "cones." + cone_label);
      } else {
        cone = cone_spec(cv, join(path, "cone"));
      }
    } else {
      cone = cone_spec(cv, join(path, "cone"));
    }

    if (!v.contains("eps")) fail(join(path, "eps"), "missing");
    std::vector<double> eps_list;
    const std::string ep = join(path, "eps");
    if (v["eps"].is_array()) {
      for (std::size_t i = 0; i < v["eps"].size(); ++i) eps_list.push_back(number(v["eps"][i], at(ep, i)));
    } else {
      eps_list.push_back(number(v["eps"], ep));
    }

    Scenario s = base;
    s.target = m;
    s.cone = cone;
    if (!in_reachable_set(task, s.gravity, s.reach, m)) {
      fail(v.contains("target") ? join(path, "target") : join(path, "targets"),
           "target lies outside the reachable set (x >= kappa, range and height limits)");
    }

    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      const std::string where = v["eps"].is_array() ? at(ep, i) : ep;
      RunSpec spec;
      spec.target_label = target_label;
      spec.cone_label = cone_label;
      spec.eps = eps_list[i];
      spec.scenario = s;
      spec.params = solver;
      spec.params.eps0 = eps_list[i];
      if (v.contains("max_iter")) spec.params.max_iter = integer(v["max_iter"], join(path, "max_iter"));
      if (v.contains("eps_star")) spec.params.eps_star = number(v["eps_star"], join(path, "eps_star"));
      if (v.contains("eps_q")) spec.params.eps_q = number(v["eps_q"], join(path, "eps_q"));
      try {
        spec.params.validate();
        lip_residual(spec.scenario, Branch::low, spec.params.eps0);
      } catch (const Error& e) {
        fail(where, e.what());
      }
      out.runs.push_back(std::move(spec));
    }
  }

  LineIndex index_;
  LoadOptions options_;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

// Negative zero would print as "-0.0"; results near zero print as "0.0".
std::string fixed1(double x) {
  std::string s = fmt("%.1f", x);
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const LoadOptions& options) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0), '\n');
    throw InvalidScenario("line " + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  Loader loader(text, options);
  return loader.load(root);
}

ScenarioFile load_scenario(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidScenario("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), options);
  } catch (const InvalidScenario& e) {
    throw InvalidScenario(path.string() + ": " + e.what());
  }
}

std::vector<RowOutcome> run_scenario(const ScenarioFile& file, int threads, bool record_trace) {
  std::vector<RowOutcome> rows(file.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const RunSpec& spec = file.runs[i];
      RowOutcome& row = rows[i];
      row.target_label = spec.target_label;
      row.cone_label = spec.cone_label;
      row.eps = spec.eps;
      row.task = spec.scenario.task;
      SolverParams params = spec.params;
      params.record_trace = record_trace;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        row.solution = solve(spec.scenario, params);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(rows.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::vector<RowOutcome> run_scenario(const std::filesystem::path& path, int threads,
                                     bool record_trace, const LoadOptions& options) {
  return run_scenario(load_scenario(path, options), threads, record_trace);
}

void write_csv(std::ostream& out, const std::vector<RowOutcome>& rows, bool with_time) {
  out << "target,cone,eps,x_N,y_N,z_N,phi_deg,psi_deg,phi_rad,psi_rad,branch,residual,distance,"
         "k_total,status,grazing";
  if (with_time) out << ",time_s";
  out << '\n';
  for (const RowOutcome& row : rows) {
    out << csv_field(row.target_label) << ',' << csv_field(row.cone_label) << ','
        << fmt("%g", row.eps) << ',';
    if (!row.error.empty()) {
      out << ",,,,,,,,,,," << csv_field("error: " + row.error) << ',';
    } else {
      const SolveResult& r = row.solution.best;
      out << fixed1(r.point.x) << ',' << fixed1(r.point.y) << ',' << fixed1(r.point.z) << ','
          << fixed1(rad_to_deg(r.angles.phi)) << ',' << fixed1(rad_to_deg(r.angles.psi)) << ','
          << fmt("%.12f", r.angles.phi) << ',' << fmt("%.12f", r.angles.psi) << ','
          << branch_index(r.branch) << ',' << fmt("%.6g", r.residual) << ','
          << fmt("%.3f", r.distance) << ',' << row.total_iterations() << ','
          << to_string(r.status) << ',' << (r.grazing ? 1 : 0);
    }
    if (with_time) out << ',' << fmt("%.3f", row.seconds);
    out << '\n';
  }
}

void write_trace(std::ostream& out, const RowOutcome& row) {
  out << "# target=" << row.target_label << " cone=" << row.cone_label << " eps=" << fmt("%g", row.eps)
      << '\n';
  for (const BranchOutcome& b : row.solution.branches) {
    const int j = branch_index(b.result.branch);
    out << "# branch=" << j << " status=" << to_string(b.result.status)
        << " iterations=" << b.result.iterations << '\n';
    for (const TraceRecord& t : b.trace.iterations) {
      out << "branch=" << j << " k=" << t.k
          << " kind=" << (t.kind == StepKind::expand ? "expand" : "shrink")
          << " eps=" << fmt("%.9g", t.eps) << " F=" << fmt("%.9g", t.residual)
          << " r=" << fmt("%.9g", t.step) << " R=" << fmt("%.9g", t.radius)
          << " x=" << fmt("%.6f", t.point.x) << " y=" << fmt("%.6f", t.point.y)
          << " z=" << fmt("%.6f", t.point.z) << '\n';
    }
    for (std::size_t m = 0; m < b.trace.recorded.size(); ++m) {
      const Point3& q = b.trace.recorded[m];
      out << "branch=" << j << " q=" << m << " x=" << fmt("%.6f", q.x) << " y=" << fmt("%.6f", q.y)
          << " z=" << fmt("%.6f", q.z) << '\n';
    }
  }
}

std::vector<Point3> export_polyline(const Scenario& scenario, const SolveResult& result,
                                    int n_samples) {
  if (result.status != SolveStatus::converged) {
    throw DomainError("polyline export needs a converged result, got " +
                      std::string(to_string(result.status)));
  }
  if (n_samples < 2) throw DomainError("polyline export needs at least 2 samples");
  const double r = std::sqrt(result.point.x * result.point.x + result.point.y * result.point.y);
  std::vector<Point3> pts;
  pts.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double mu = static_cast<double>(i) / (n_samples - 1);
    pts.push_back(trajectory_point(scenario.gravity, result.angles, mu * r));
  }
  return pts;
}

void write_polyline_csv(std::ostream& out, const std::vector<Point3>& points) {
  out << "x,y,z\n";
  for (const Point3& p : points) {
    out << fmt("%.6f", p.x) << ',' << fmt("%.6f", p.y) << ',' << fmt("%.6f", p.z) << '\n';
  }
}

}  // namespace invball
