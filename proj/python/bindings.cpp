#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "invball/error.hpp"
#include "invball/lipschitz.hpp"
#include "invball/scenario.hpp"

namespace py = pybind11;
using namespace invball;

namespace {

Branch to_branch(int j) {
  if (j == 1) return Branch::low;
  if (j == 2) return Branch::high;
  throw DomainError("branch must be 1 (low) or 2 (high)");
}

VisibilityCone named_cone(const std::string& name) {
  if (name == "E1") return cone_e1();
  if (name == "E2") return cone_e2();
  throw InvalidScenario("unknown cone '" + name + "' (E1, E2)");
}

py::dict result_dict(const SolveResult& r) {
  py::dict d;
  d["point"] = py::make_tuple(r.point.x, r.point.y, r.point.z);
  d["phi"] = r.angles.phi;
  d["psi"] = r.angles.psi;
  d["phi_deg"] = rad_to_deg(r.angles.phi);
  d["psi_deg"] = rad_to_deg(r.angles.psi);
  d["branch"] = branch_index(r.branch);
  d["residual"] = r.residual;
  d["distance"] = r.distance;
  d["iterations"] = r.iterations;
  d["status"] = std::string(to_string(r.status));
  d["grazing"] = r.grazing;
  return d;
}

py::dict row_dict(const RowOutcome& row) {
  py::dict d = result_dict(row.solution.best);
  d["target"] = row.target_label;
  d["cone"] = row.cone_label;
  d["eps"] = row.eps;
  d["k_total"] = row.total_iterations();
  d["seconds"] = row.seconds;
  if (!row.error.empty()) d["status"] = "error: " + row.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_invball, m) {
  m.doc() = "Inverse external ballistics: aim a gun under a visibility cone";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidScenario>(m, "InvalidScenario", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<Unreachable>(m, "Unreachable", base.ptr());
  py::register_exception<OutsideReachableSet>(m, "OutsideReachableSet", base.ptr());
  py::register_exception<InfeasibleSphere>(m, "InfeasibleSphere", base.ptr());

  m.attr("STANDARD_GRAVITY") = kStandardGravity;

  m.def("v_squared", [](double v0, double g) { return GravityContext(v0, g).v2(); },
        py::arg("v0"), py::arg("g") = kStandardGravity);

  m.def(
      "impact_point",
      [](double phi, double psi, double v0, double g) {
        const Point2 p = impact_point_planar(GravityContext(v0, g), {phi, psi});
        return py::make_tuple(p.x, p.y);
      },
      py::arg("phi"), py::arg("psi"), py::arg("v0") = 180.0, py::arg("g") = kStandardGravity,
      "Impact point in the horizon plane; angles in radians.");

  m.def(
      "trajectory_point",
      [](double phi, double psi, double r, double v0, double g) {
        const Point3 p = trajectory_point(GravityContext(v0, g), {phi, psi}, r);
        return py::make_tuple(p.x, p.y, p.z);
      },
      py::arg("phi"), py::arg("psi"), py::arg("r"), py::arg("v0") = 180.0,
      py::arg("g") = kStandardGravity);

  m.def(
      "elevation_planar",
      [](double x, double y, int branch, double v0, double g) {
        return inverse_elevation_planar(GravityContext(v0, g), {x, y}, to_branch(branch));
      },
      py::arg("x"), py::arg("y"), py::arg("branch") = 1, py::arg("v0") = 180.0,
      py::arg("g") = kStandardGravity);

  m.def(
      "elevation_spatial",
      [](double x, double y, double z, int branch, double v0, double g) {
        return inverse_elevation_spatial(GravityContext(v0, g), {x, y, z}, to_branch(branch));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("branch") = 1, py::arg("v0") = 180.0,
      py::arg("g") = kStandardGravity);

  m.def("tau_root", &tau_root, py::arg("eps"));

  m.def(
      "cone_violation",
      [](const std::string& cone, double phi, double psi) {
        return invball::cone_violation(named_cone(cone), {phi, psi});
      },
      py::arg("cone"), py::arg("phi"), py::arg("psi"));

  m.def(
      "chebyshev_center",
      [](const std::vector<std::pair<double, double>>& pts) {
        std::vector<Point2> p;
        for (const auto& [x, y] : pts) p.push_back({x, y});
        const Point2 c = invball::chebyshev_center(p);
        return py::make_tuple(c.x, c.y);
      },
      py::arg("points"));

  m.def(
      "solve",
      [](const std::string& task, std::vector<double> target, const std::string& cone, double eps,
         double v0, double kappa, double z_min, double g, long long max_iter) {
        const Task t = parse_task(task);
        if (target.size() < 2 || target.size() > 3) throw InvalidScenario("target needs 2 or 3 coordinates");
        if (target.size() == 2) target.push_back(0.0);
        std::optional<TerrainField> terrain;
        if (t == Task::terrain) terrain = TerrainField::block_on_floor();
        const Scenario s = make_scenario(t, v0, kappa, z_min, {target[0], target[1], target[2]},
                                         named_cone(cone), terrain, g);
        SolverParams p;
        p.eps0 = eps;
        p.max_iter = max_iter;
        Solution sol;
        {
          py::gil_scoped_release release;
          sol = invball::solve(s, p);
        }
        return result_dict(sol.best);
      },
      py::arg("task"), py::arg("target"), py::arg("cone"), py::arg("eps"), py::arg("v0") = 180.0,
      py::arg("kappa") = 100.0, py::arg("z_min") = -10.0, py::arg("g") = kStandardGravity,
      py::arg("max_iter") = 1'000'000,
      "Solve one aiming problem with a builtin cone (E1, E2); task II.b uses the block terrain.");

  m.def(
      "run_scenario",
      [](const std::filesystem::path& path, int threads, bool chebyshev) {
        LoadOptions options;
        options.chebyshev = chebyshev;
        const ScenarioFile file = load_scenario(path, options);
        std::vector<RowOutcome> rows;
        {
          py::gil_scoped_release release;
          rows = invball::run_scenario(file, threads, false);
        }
        py::list out;
        for (const auto& row : rows) out.append(row_dict(row));
        return out;
      },
      py::arg("path"), py::arg("threads") = 1, py::arg("chebyshev") = false);

  m.def(
      "scenario_csv",
      [](const std::filesystem::path& path, int threads, bool with_time) {
        const ScenarioFile file = load_scenario(path);
        std::vector<RowOutcome> rows;
        {
          py::gil_scoped_release release;
          rows = invball::run_scenario(file, threads, false);
        }
        std::ostringstream out;
        write_csv(out, rows, with_time);
        return out.str();
      },
      py::arg("path"), py::arg("threads") = 1, py::arg("with_time") = false);

  m.def(
      "validate_scenario",
      [](const std::string& text) { return parse_scenario(text).runs.size(); }, py::arg("text"),
      "Parse a scenario given as JSON text; returns the number of rows.");
}
