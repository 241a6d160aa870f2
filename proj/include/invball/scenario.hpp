#pragma once

// Batch front end: JSON scenario files describing a list of aiming problems,
// the row runner, and the CSV, trace and polyline writers.
//
// Units in scenario files: lengths in metres, speeds in m/s, gravity in
// m/s^2, every angle in degrees (converted to radians once, at load).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "invball/solver.hpp"

namespace invball {

/// One (target, cone, eps) combination, ready to solve.
struct RunSpec {
  std::string target_label;
  std::string cone_label;
  double eps = 0.1;
  Scenario scenario;
  SolverParams params;
};

struct ScenarioFile {
  Task task = Task::planar;
  std::vector<RunSpec> runs;
  std::vector<std::string> warnings;
};

struct LoadOptions {
  /// Reduce multi-target Task I runs to the Chebyshev center of the targets.
  /// Without it such runs are rejected.
  bool chebyshev = false;
};

/// Parses and validates a scenario. Errors are InvalidScenario with the
/// offending field path and, where known, the line.
ScenarioFile parse_scenario(std::string_view text, const LoadOptions& options = {});
ScenarioFile load_scenario(const std::filesystem::path& path, const LoadOptions& options = {});

struct RowOutcome {
  std::string target_label;
  std::string cone_label;
  double eps = 0.0;
  Task task = Task::planar;
  Solution solution;
  double seconds = 0.0;
  /// Set when the row raised instead of producing a status.
  std::string error;

  bool converged() const {
    return error.empty() && solution.best.status == SolveStatus::converged;
  }
  long long total_iterations() const {
    return solution.branches[0].result.iterations + solution.branches[1].result.iterations;
  }
};

/// Solves every run, `threads` rows at a time; rows come back in input order
/// and do not depend on the thread count.
std::vector<RowOutcome> run_scenario(const ScenarioFile& file, int threads = 1,
                                     bool record_trace = false);
std::vector<RowOutcome> run_scenario(const std::filesystem::path& path, int threads = 1,
                                     bool record_trace = false, const LoadOptions& options = {});

/// Header plus one line per row. Only the last column (time_s) depends on
/// the machine; `with_time = false` leaves it out.
void write_csv(std::ostream& out, const std::vector<RowOutcome>& rows, bool with_time = true);

/// Flat key=value dump of both branch traces of a row, one record per line.
void write_trace(std::ostream& out, const RowOutcome& row);

/// n_samples points of the solution arc, trajectory_point(angles, mu r_N)
/// for mu uniform in [0, 1]. Requires a converged result and n_samples >= 2.
std::vector<Point3> export_polyline(const Scenario& scenario, const SolveResult& result,
                                    int n_samples);
void write_polyline_csv(std::ostream& out, const std::vector<Point3>& points);

}  // namespace invball
