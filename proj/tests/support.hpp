#pragma once

// Shared fixtures for the test binaries: the experiment parameters and a few
// independent reference computations.

#include <cmath>
#include <random>

#include <doctest.h>

#include "invball/constraints.hpp"
#include "invball/lipschitz.hpp"
#include "invball/solver.hpp"

namespace testing_support {

using namespace invball;

inline constexpr double kV0 = 180.0;
inline constexpr double kKappa = 100.0;
inline constexpr double kZmin = -10.0;
inline const Point3 kM1{110.0, 0.0, 20.0};
inline const Point3 kM2{2700.0, 0.0, -10.0};

inline double v2_hand() { return 32400.0 / 9.80665; }

inline Scenario planar(Point3 m, VisibilityCone cone) {
  return make_scenario(Task::planar, kV0, kKappa, kZmin, {m.x, m.y, 0.0}, std::move(cone));
}
inline Scenario spatial(Point3 m, VisibilityCone cone) {
  return make_scenario(Task::spatial, kV0, kKappa, kZmin, m, std::move(cone));
}
inline Scenario terrain(Point3 m, VisibilityCone cone) {
  return make_scenario(Task::terrain, kV0, kKappa, kZmin, m, std::move(cone),
                       TerrainField::block_on_floor());
}

// The experiment terrain written out by hand, independent of TerrainField.
inline double block_h(double x, double y, double z) {
  const double top = std::max({90.0 - x, x - 130.0, -10.0 - y, y - 30.0, z - 20.0});
  return std::min(top, z + 10.0);
}

inline double norm1(const Point3& a, const Point3& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}
inline double dist(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// Uniform samples of the reachable sets by rejection.
inline Point3 sample_w_planar(std::mt19937_64& rng, double v2, double kappa) {
  std::uniform_real_distribution<double> ux(kappa, v2), uy(-v2, v2);
  while (true) {
    const Point3 p{ux(rng), uy(rng), 0.0};
    if (p.x * p.x + p.y * p.y <= v2 * v2) return p;
  }
}

inline Point3 sample_w_spatial(std::mt19937_64& rng, double v2, double kappa, double z_min, double rho) {
  std::uniform_real_distribution<double> ux(kappa, rho), uy(-rho, rho), uz(z_min, 0.5 * v2);
  while (true) {
    const Point3 p{ux(rng), uy(rng), uz(rng)};
    const double r2 = p.x * p.x + p.y * p.y;
    if (r2 <= rho * rho && p.z <= 0.5 * (v2 - r2 / v2)) return p;
  }
}

// Monotone eps, positive progress, and sphere residence along a trace.
inline void check_trace(const Scenario& s, const BranchOutcome& out, const SolverParams& p) {
  const auto& it = out.trace.iterations;
  const int n = dimension(s.task);
  for (std::size_t i = 0; i < it.size(); ++i) {
    if (i + 1 < it.size()) CHECK(it[i + 1].eps <= it[i].eps);
    if (it[i].kind != StepKind::expand) continue;
    CHECK(it[i].residual >= it[i].eps * (1.0 + p.gamma));
    const double floor = it[i].eps * p.gamma / (std::sqrt(static_cast<double>(n)) *
                                               lip_residual(s, out.result.branch, it[i].eps).value);
    CHECK(it[i].step >= floor * (1.0 - 1e-12));
    if (i + 1 < it.size()) {
      CHECK(dist(it[i + 1].point, s.target) == doctest::Approx(it[i].radius).epsilon(1e-9));
    }
  }
}

}  // namespace testing_support
