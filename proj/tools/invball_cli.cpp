// Command-line front end: solve every (target, cone, eps) row of a scenario
// file and write the results as CSV.
//
//   invball solve <scenario.json> [--out results.csv] [--trace dir/] [--polyline n]
//
// Exit codes: 0 every row converged, 1 some row did not, 2 configuration or
// I/O error. INVBALL_THREADS sets how many rows are solved at once.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "invball/error.hpp"
#include "invball/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kConfigError = 2;

int thread_count() {
  const char* env = std::getenv("INVBALL_THREADS");
  if (env == nullptr || *env == '\0') {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    throw invball::InvalidScenario(std::string("INVBALL_THREADS must be an integer in [1, 1024], got '") +
                                   env + "'");
  }
  return static_cast<int>(n);
}

std::string row_tag(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i + 1);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw invball::InvalidScenario("cannot write " + p.string());
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse external-ballistics solver"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string trace_dir;
  int polyline = 0;
  bool chebyshev = false;
  bool no_time = false;

  auto* solve = app.add_subcommand("solve", "Solve every row of a scenario file");
  solve->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  solve->add_option("--out", out_path, "Write the result CSV here instead of stdout");
  solve->add_option("--trace", trace_dir, "Write a key=value iteration trace per row into this directory");
  solve->add_option("--polyline", polyline, "Export n points of each converged arc as CSV")
      ->check(CLI::Range(2, 1000000));
  solve->add_flag("--chebyshev", chebyshev,
                  "Reduce multi-target task I runs to the Chebyshev center of the targets");
  solve->add_flag("--no-time", no_time, "Leave the wall-time column out of the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const int threads = thread_count();
    invball::LoadOptions options;
    options.chebyshev = chebyshev;
    const invball::ScenarioFile file = invball::load_scenario(scenario_path, options);
    for (const auto& w : file.warnings) std::cerr << "warning: " << w << '\n';

    if (!trace_dir.empty()) fs::create_directories(trace_dir);
    const auto rows = invball::run_scenario(file, threads, !trace_dir.empty());

    if (out_path.empty()) {
      invball::write_csv(std::cout, rows, !no_time);
    } else {
      auto f = open_out(out_path);
      invball::write_csv(f, rows, !no_time);
    }

    bool all_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!row.converged()) {
        all_ok = false;
        std::cerr << "row " << i + 1 << " (" << row.target_label << ", " << row.cone_label
                  << ", eps=" << row.eps << "): "
                  << (row.error.empty() ? std::string(invball::to_string(row.solution.best.status))
                                        : "error: " + row.error)
                  << '\n';
      }
      if (!trace_dir.empty()) {
        auto f = open_out(fs::path(trace_dir) / ("row_" + row_tag(i) + ".trace"));
        invball::write_trace(f, row);
      }
      if (polyline > 0) {
        if (!row.converged()) {
          std::cerr << "row " << i + 1 << ": no polyline, the row did not converge\n";
          continue;
        }
        fs::path p;
        if (out_path.empty()) {
          p = "polyline_" + row_tag(i) + ".csv";
        } else {
          const fs::path out(out_path);
          p = out.parent_path() / (out.stem().string() + "_polyline_" + row_tag(i) + ".csv");
        }
        auto f = open_out(p);
        invball::write_polyline_csv(
            f, invball::export_polyline(file.runs[i].scenario, row.solution.best, polyline));
      }
    }
    return all_ok ? kOk : kNotConverged;
  } catch (const invball::InvalidScenario& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
