#include "invball/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "invball/error.hpp"
#include "invball/lipschitz.hpp"

namespace invball {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

struct Candidate {
  double a = 0.0;
  double b = 0.0;
  double value = kInf;
};

// Keeps the `capacity` lowest values; earlier entries win ties.
class TopK {
 public:
  explicit TopK(int capacity) : capacity_(static_cast<std::size_t>(std::max(capacity, 0))) {}

  void offer(const Candidate& c) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_ && !(c.value < items_.back().value)) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), c.value,
                                [](double v, const Candidate& x) { return v < x.value; });
    items_.insert(pos, c);
    if (items_.size() > capacity_) items_.pop_back();
  }

  const std::vector<Candidate>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::vector<Candidate> items_;
};

struct Direction {
  double a = 0.0;
  double b = 0.0;
  double ux = 0.0;
  double uy = 0.0;
  double uz = 0.0;
};

// Unit directions of the angular grid in scan order: the circle for dim 2;
// for dim 3 the north pole, the interior rows, then the south pole.
const std::vector<Direction>& grid_directions(int dim, const SphereGrid& grid) {
  struct Cache {
    int dim = 0, n1 = 0, n2 = 0;
    std::vector<Direction> dirs;
  };
  thread_local Cache cache;
  const int n1 = dim == 2 ? grid.circle : grid.azimuth;
  const int n2 = dim == 2 ? 0 : grid.polar;
  if (cache.dim == dim && cache.n1 == n1 && cache.n2 == n2) return cache.dirs;
  cache = Cache{dim, n1, n2, {}};
  const double ca = 2.0 * kPi / n1;
  if (dim == 2) {
    for (int i = 0; i < n1; ++i) {
      const double a = ca * i;
      cache.dirs.push_back({a, 0.0, std::cos(a), std::sin(a), 0.0});
    }
    return cache.dirs;
  }
  const double cb = kPi / n2;
  cache.dirs.push_back({0.0, 0.0, 0.0, 0.0, 1.0});
  for (int j = 1; j < n2; ++j) {
    const double b = cb * j;
    const double sb = std::sin(b);
    for (int i = 0; i < n1; ++i) {
      const double a = ca * i;
      cache.dirs.push_back({a, b, sb * std::cos(a), sb * std::sin(a), std::cos(b)});
    }
  }
  cache.dirs.push_back({0.0, kPi, 0.0, 0.0, -1.0});
  return cache.dirs;
}

// Grazing test for Task II.b results: the interior of the sight segment or
// of the arc (away from both endpoints) touches the terrain boundary.
bool touches_boundary(const Scenario& s, const Point3& n, ShotAngles angles) {
  if (s.task != Task::terrain) return false;
  const auto& h = *s.terrain;
  constexpr int kSamples = 512;
  constexpr double kMargin = 0.02;
  constexpr double kTol = 1e-6;
  const double r = std::hypot(n.x, n.y);
  const double t = std::tan(angles.psi);
  double lowest = kInf;
  for (int i = 0; i <= kSamples; ++i) {
    const double u = kMargin + (1.0 - 2.0 * kMargin) * i / kSamples;
    const Point3& m = s.target;
    lowest = std::min(lowest, h(Point3{m.x + u * (n.x - m.x), m.y + u * (n.y - m.y),
                                       m.z + u * (n.z - m.z)}));
    const double d = u * r;
    lowest = std::min(lowest, h(Point3{d * std::cos(angles.phi), d * std::sin(angles.phi),
                                       d * t - (1.0 + t * t) * d * d / (2.0 * s.gravity.v2())}));
  }
  return lowest <= kTol;
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::residual_floor:
      return "residual_floor";
    case SolveStatus::iter_cap:
      return "iter_cap";
    case SolveStatus::infeasible_branch:
      return "infeasible_branch";
    case SolveStatus::dominated:
      return "dominated";
  }
  return "?";
}

void SolverParams::validate() const {
  if (!(eps0 > 0.0)) throw InvalidScenario("eps0 must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidScenario("gamma must lie in (0, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidScenario("lambda must lie in (0, 1)");
  const double stop = stop_residual();
  if (!(stop > 0.0 && stop < 1.0)) throw InvalidScenario("eps_star must lie in (0, 1)");
  if (eps_q && !(*eps_q > 0.0 && *eps_q < 1.0)) throw InvalidScenario("eps_q must lie in (0, 1)");
  if (max_iter < 0) throw InvalidScenario("max_iter must be non-negative");
  if (!(eps_floor_ratio > 0.0 && eps_floor_ratio < 1.0)) {
    throw InvalidScenario("eps_floor_ratio must lie in (0, 1)");
  }
  if (grid.circle < 3 || grid.azimuth < 3 || grid.polar < 2) {
    throw InvalidScenario("sphere grid too coarse");
  }
}

// ---------------------------------------------------------------------------

SphereSample sphere_argmin(const SphereObjective& f, Point3 center, double radius, int dim,
                           const SphereGrid& grid, double delta) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  auto at = [&](double a, double b) {
    if (dim == 2) return Point3{center.x + radius * std::cos(a), center.y + radius * std::sin(a), center.z};
    const double sb = std::sin(b);
    return Point3{center.x + radius * sb * std::cos(a), center.y + radius * sb * std::sin(a),
                  center.z + radius * std::cos(b)};
  };

  const std::vector<Direction>& dirs = grid_directions(dim, grid);
  const double cell_a = 2.0 * kPi / (dim == 2 ? grid.circle : grid.azimuth);
  const double cell_b = dim == 2 ? 0.0 : kPi / grid.polar;
  auto grid_point = [&](const Direction& d) {
    return Point3{center.x + radius * d.ux, center.y + radius * d.uy, center.z + radius * d.uz};
  };

  // Pass 1: cheap lower bounds everywhere (exact for tasks without lazy
  // components). Pass 2: exact values in order of increasing bound until
  // the bound exceeds the best exact value. Ties go to the lower index.
  std::vector<std::pair<double, int>> heap;
  heap.reserve(dirs.size());
  for (int i = 0; i < static_cast<int>(dirs.size()); ++i) {
    const double lb = f(grid_point(dirs[static_cast<std::size_t>(i)]), -kInf);
    if (lb < kInf) heap.emplace_back(lb, i);
  }
  if (heap.empty()) {
    throw InfeasibleSphere("no point of the search sphere lies in the reachable set");
  }
  auto later = [](const std::pair<double, int>& x, const std::pair<double, int>& y) { return x > y; };
  std::make_heap(heap.begin(), heap.end(), later);

  double best_value = kInf;
  int best_index = -1;
  TopK top(grid.refine_candidates);
  int evaluated = 0;
  while (!heap.empty()) {
    const auto [lb, i] = heap.front();
    if (lb > best_value && evaluated >= grid.refine_candidates) break;
    std::pop_heap(heap.begin(), heap.end(), later);
    heap.pop_back();
    const Direction& d = dirs[static_cast<std::size_t>(i)];
    const double v = f(grid_point(d), kInf);
    ++evaluated;
    if (!(v < kInf)) continue;
    top.offer({d.a, d.b, v});
    if (v < best_value || (v == best_value && i < best_index)) {
      best_value = v;
      best_index = i;
    }
  }
  if (best_index < 0) {
    throw InfeasibleSphere("no point of the search sphere lies in the reachable set");
  }
  Candidate best{dirs[static_cast<std::size_t>(best_index)].a,
                 dirs[static_cast<std::size_t>(best_index)].b, best_value};

  // Zoom around the most promising samples. Points are generated from the
  // angles directly, so every refined point stays on the sphere.
  static constexpr double kOffsets[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (const Candidate& seed : top.items()) {
    Candidate local = seed;
    double ha = cell_a;
    double hb = cell_b;
    for (int level = 0; level < grid.refine_levels; ++level) {
      const double before = local.value;
      Candidate next = local;
      for (double ob : kOffsets) {
        if (dim == 2 && ob != 0.0) continue;
        for (double oa : kOffsets) {
          if (oa == 0.0 && ob == 0.0) continue;
          const double a = local.a + oa * ha;
          const double b = local.b + ob * hb;
          const double v = f(at(a, b), std::min(best_value, next.value));
          if (v < next.value) next = {a, b, v};
          if (v < best_value) {
            best_value = v;
            best = {a, b, v};
          }
        }
      }
      local = next;
      ha *= 0.5;
      hb *= 0.5;
      if (level >= 2 && before - local.value < 1e-3 * delta) break;
    }
  }
  return {at(best.a, best.b), best.value};
}

// ---------------------------------------------------------------------------

BranchProjector::BranchProjector(const Scenario& scenario, Branch branch, const SolverParams& params)
    : scenario_(scenario), branch_(branch), params_(params), dim_(dimension(scenario.task)) {
  params_.validate();
  // Fails fast when eps0 lies outside the domain of the residual bound.
  lip_residual(scenario_, branch_, params_.eps0);

  const Point3& target = scenario_.target;
  if (!in_reachable_set(scenario_.task, scenario_.gravity, scenario_.reach, target)) {
    throw OutsideReachableSet("target lies outside the reachable set");
  }
  auto f = residual(scenario_, branch_, target);
  if (!f) throw Unreachable("target is not reachable on this branch");

  current_ = target;
  current_f_ = *f;
  best_ = target;
  best_f_ = *f;
  eps_ = params_.eps0;
  if (params_.record_trace) trace_.recorded.push_back(target);
  if (current_f_ <= 0.0 || current_f_ < params_.stop_residual()) {
    finish(SolveStatus::converged, target, current_f_);
  }
}

double BranchProjector::objective(const Point3& p, double cutoff) const {
  if (!in_reachable_set(scenario_.task, scenario_.gravity, scenario_.reach, p)) return kInf;
  auto v = residual_bounded(scenario_, branch_, p, cutoff);
  return v ? *v : kInf;
}

double BranchProjector::converged_distance() const {
  return distance(scenario_.target, result_point_);
}

void BranchProjector::finish(SolveStatus status, Point3 point, double value) {
  status_ = status;
  result_point_ = point;
  result_f_ = value;
}

void BranchProjector::mark_dominated() {
  if (!finished()) finish(SolveStatus::dominated, best_, best_f_);
}

void BranchProjector::step() {
  if (finished()) return;
  if (k_ >= params_.max_iter) {
    finish(SolveStatus::iter_cap, best_, best_f_);
    return;
  }
  const double gamma = params_.gamma;
  const double lambda = params_.lambda;

  TraceRecord rec{k_, eps_, current_f_, 0.0, radius_, current_, StepKind::shrink};
  Point3 next = current_;
  double next_f = current_f_;
  double next_eps = eps_;
  bool recorded_now = false;
  std::optional<Point3> previous_recorded = last_recorded_;

  if (current_f_ < eps_ * (1.0 + gamma)) {
    // Close to the level set at the current accuracy: record the point and
    // tighten eps.
    ++m_;
    last_recorded_ = current_;
    recorded_now = true;
    if (params_.record_trace) trace_.recorded.push_back(current_);
    next_eps = current_f_ <= eps_ ? lambda * current_f_ : lambda * eps_;
  } else {
    const double lip = lip_residual(scenario_, branch_, eps_).value;
    const double r = (current_f_ - eps_) / (std::sqrt(static_cast<double>(dim_)) * lip);
    radius_ += r;
    rec.kind = StepKind::expand;
    rec.step = r;
    rec.radius = radius_;
    const double delta = params_.delta_ratio * gamma * eps_;
    try {
      const SphereSample s = sphere_argmin(
          [this](const Point3& p, double cutoff) { return objective(p, cutoff); },
          scenario_.target, radius_, dim_, params_.grid, delta);
      next = s.point;
      next_f = s.value;
    } catch (const InfeasibleSphere&) {
      if (params_.record_trace) trace_.iterations.push_back(rec);
      ++k_;
      finish(SolveStatus::infeasible_branch, best_, best_f_);
      return;
    }
  }
  if (params_.record_trace) trace_.iterations.push_back(rec);
  ++k_;

  if (next_f < best_f_) {
    best_ = next;
    best_f_ = next_f;
  }
  const double stop = params_.stop_residual();
  if (next_f <= 0.0 || next_f < stop) {
    finish(SolveStatus::converged, next, next_f);
    return;
  }
  if (recorded_now && params_.eps_q && previous_recorded &&
      distance(*previous_recorded, *last_recorded_) < *params_.eps_q) {
    finish(SolveStatus::residual_floor, best_, best_f_);
    return;
  }
  if (next_eps < params_.eps_floor_ratio * params_.eps0) {
    finish(SolveStatus::residual_floor, best_, best_f_);
    return;
  }
  current_ = next;
  current_f_ = next_f;
  eps_ = next_eps;
}

BranchOutcome BranchProjector::outcome() const {
  BranchOutcome out;
  out.trace = trace_;
  SolveResult& r = out.result;
  r.branch = branch_;
  r.iterations = k_;
  r.status = status_ ? *status_ : SolveStatus::iter_cap;
  r.point = status_ ? result_point_ : best_;
  r.residual = status_ ? result_f_ : best_f_;
  r.distance = distance(scenario_.target, r.point);
  if (auto b = residual_breakdown(scenario_, branch_, r.point)) r.angles = b->angles;
  if (r.status == SolveStatus::converged) r.grazing = touches_boundary(scenario_, r.point, r.angles);
  return out;
}

BranchOutcome project_branch(const Scenario& scenario, Branch branch, const SolverParams& params) {
  BranchProjector p(scenario, branch, params);
  while (!p.finished()) p.step();
  return p.outcome();
}

Solution solve(const Scenario& scenario, const SolverParams& params) {
  std::array<BranchProjector, 2> runs{BranchProjector(scenario, Branch::low, params),
                                      BranchProjector(scenario, Branch::high, params)};
  auto converged = [&](int i) {
    return runs[static_cast<std::size_t>(i)].status() == SolveStatus::converged;
  };
  std::array<double, 2> done_at{kInf, kInf};
  for (int i = 0; i < 2; ++i) {
    if (converged(i)) done_at[static_cast<std::size_t>(i)] = runs[static_cast<std::size_t>(i)].converged_distance();
  }
  while (!runs[0].finished() || !runs[1].finished()) {
    // Advance the branch with the smaller search radius; the low branch
    // goes first on ties.
    int i = 0;
    if (runs[0].finished()) {
      i = 1;
    } else if (!runs[1].finished() && runs[1].radius() < runs[0].radius()) {
      i = 1;
    }
    auto& run = runs[static_cast<std::size_t>(i)];
    const double other_done = done_at[static_cast<std::size_t>(1 - i)];
    if (run.radius() > other_done) {
      run.mark_dominated();
      continue;
    }
    run.step();
    if (run.finished() && converged(i)) done_at[static_cast<std::size_t>(i)] = run.converged_distance();
  }

  Solution sol;
  sol.branches = {runs[0].outcome(), runs[1].outcome()};
  const SolveResult& lo = sol.branches[0].result;
  const SolveResult& hi = sol.branches[1].result;
  const bool lo_ok = lo.status == SolveStatus::converged;
  const bool hi_ok = hi.status == SolveStatus::converged;
  if (lo_ok && hi_ok) {
    sol.best = hi.distance < lo.distance ? hi : lo;
  } else if (lo_ok || hi_ok) {
    sol.best = lo_ok ? lo : hi;
  } else if (lo.status == SolveStatus::infeasible_branch && hi.status != SolveStatus::infeasible_branch) {
    sol.best = hi;
  } else if (hi.status == SolveStatus::infeasible_branch && lo.status != SolveStatus::infeasible_branch) {
    sol.best = lo;
  } else {
    sol.best = hi.residual < lo.residual ? hi : lo;
  }
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

bool inside(const Circle& c, Point2 p) {
  return std::hypot(p.x - c.center.x, p.y - c.center.y) <= c.radius * (1.0 + 1e-12) + 1e-12;
}

Circle from_two(Point2 a, Point2 b) {
  const Point2 c{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  return {c, 0.5 * std::hypot(a.x - b.x, a.y - b.y)};
}

Circle from_three(Point2 a, Point2 b, Point2 c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-300) {
    // Collinear: the farthest pair spans the circle.
    Circle best = from_two(a, b);
    for (const Circle& cand : {from_two(a, c), from_two(b, c)}) {
      if (cand.radius > best.radius) best = cand;
    }
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {{a.x + ux, a.y + uy}, std::hypot(ux, uy)};
}

}  // namespace

Circle smallest_enclosing_circle(std::span<const Point2> pts) {
  if (pts.empty()) throw DomainError("smallest enclosing circle of an empty set");
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(c, pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, pts[j])) continue;
      c = from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!inside(c, pts[k])) c = from_three(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

Point2 chebyshev_center(std::span<const Point2> points) {
  return smallest_enclosing_circle(points).center;
}

}  // namespace invball
