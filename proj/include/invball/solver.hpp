#pragma once

// Projection of the target onto the zero sublevel set of a task residual by
// expanding spheres: each step grows the search radius by an amount certified
// by the residual's eps-Lipschitz bound to contain no zero, then moves to the
// residual minimizer on the new sphere.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "invball/constraints.hpp"

namespace invball {

/// Resolution of the auxiliary minimization over the sphere (Task II) or the
/// circle (Task I): a uniform angular grid followed by local zoom passes
/// around the best few samples.
struct SphereGrid {
  int circle = 2048;
  int azimuth = 32;
  int polar = 16;
  int refine_candidates = 2;
  int refine_levels = 6;
};

struct SolverParams {
  double eps0 = 0.1;
  double gamma = 0.5;
  double lambda = 0.5;
  /// Stopping residual; defaults to eps0.
  std::optional<double> eps_star;
  /// Optional stop on the displacement between consecutive recorded points.
  std::optional<double> eps_q;
  long long max_iter = 1'000'000;
  /// eps_k is never shrunk below eps_floor_ratio * eps0.
  double eps_floor_ratio = 1e-6;
  /// delta_k = delta_ratio * gamma * eps_k bounds the accepted suboptimality
  /// of the sphere minimization.
  double delta_ratio = 0.5;
  SphereGrid grid{};
  bool record_trace = false;

  double stop_residual() const { return eps_star ? *eps_star : eps0; }
  void validate() const;
};

enum class SolveStatus { converged, residual_floor, iter_cap, infeasible_branch, dominated };

std::string_view to_string(SolveStatus status);

enum class StepKind { shrink, expand };

struct TraceRecord {
  long long k = 0;
  double eps = 0.0;
  double residual = 0.0;
  double step = 0.0;    // r_k, zero for shrink steps
  double radius = 0.0;  // cumulative radius after this step
  Point3 point{};       // N^k
  StepKind kind = StepKind::shrink;
};

struct SolverTrace {
  std::vector<TraceRecord> iterations;
  std::vector<Point3> recorded;  // the Q^m subsequence
};

struct SolveResult {
  Point3 point{};
  ShotAngles angles{};
  Branch branch = Branch::low;
  double residual = 0.0;
  double distance = 0.0;
  long long iterations = 0;
  SolveStatus status = SolveStatus::iter_cap;
  /// Task II.b: the sight segment or the arc touches the terrain boundary
  /// away from their endpoints.
  bool grazing = false;
};

struct BranchOutcome {
  SolveResult result;
  SolverTrace trace;
};

struct Solution {
  SolveResult best;
  std::array<BranchOutcome, 2> branches;
};

/// Objective for sphere_argmin. Receives a point and the best value found so
/// far; returns +inf for excluded points, the exact value when it does not
/// exceed the cutoff, and any lower bound above the cutoff otherwise.
using SphereObjective = std::function<double(const Point3&, double)>;

struct SphereSample {
  Point3 point{};
  double value = 0.0;
};

/// Approximate minimizer of `f` over the circle (dim 2, z held at center.z)
/// or sphere (dim 3) of the given radius. Ties go to the first grid index.
/// Throws InfeasibleSphere if every sample is excluded.
SphereSample sphere_argmin(const SphereObjective& f, Point3 center, double radius, int dim,
                           const SphereGrid& grid, double delta);

/// Runs the projection for one branch until a stopping rule fires.
class BranchProjector {
 public:
  BranchProjector(const Scenario& scenario, Branch branch, const SolverParams& params);

  bool finished() const { return status_.has_value(); }
  std::optional<SolveStatus> status() const { return status_; }
  /// Current search radius sum(r_s).
  double radius() const { return radius_; }
  /// Distance of the accepted point when converged.
  double converged_distance() const;
  void step();
  /// Ends the run early because another branch already converged closer.
  void mark_dominated();
  BranchOutcome outcome() const;

 private:
  void finish(SolveStatus status, Point3 point, double value);
  double objective(const Point3& p, double cutoff) const;

  const Scenario& scenario_;
  Branch branch_;
  SolverParams params_;
  int dim_;

  Point3 current_{};
  double current_f_ = 0.0;
  double eps_ = 0.0;
  double radius_ = 0.0;
  long long k_ = 0;
  long long m_ = 0;
  std::optional<Point3> last_recorded_;
  Point3 best_{};
  double best_f_ = 0.0;

  std::optional<SolveStatus> status_;
  Point3 result_point_{};
  double result_f_ = 0.0;
  SolverTrace trace_;
};

BranchOutcome project_branch(const Scenario& scenario, Branch branch, const SolverParams& params);

/// Solves both branches and keeps the converged result nearest the target.
/// Branches advance in order of their search radius, and a branch whose
/// radius passes an already converged distance is stopped as dominated.
Solution solve(const Scenario& scenario, const SolverParams& params);

struct Circle {
  Point2 center{};
  double radius = 0.0;
};

/// Smallest enclosing circle of a non-empty point set.
Circle smallest_enclosing_circle(std::span<const Point2> points);

/// Center of the smallest enclosing circle; throws DomainError when empty.
Point2 chebyshev_center(std::span<const Point2> points);

}  // namespace invball
