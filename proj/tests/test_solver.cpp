#include <doctest.h>

#include <cmath>
#include <vector>

#include "invball/error.hpp"
#include "invball/lipschitz.hpp"
#include "invball/solver.hpp"
#include "support.hpp"

using namespace invball;
using namespace testing_support;

namespace {

SolverParams with_eps(double eps, bool trace = false) {
  SolverParams p;
  p.eps0 = eps;
  p.record_trace = trace;
  return p;
}

}  // namespace

TEST_CASE("sphere argmin: distance to a point on the sphere") {
  const Point3 m{10.0, -3.0, 2.0};
  const double r = 7.0;
  const Point3 p3{m.x + r * 0.36, m.y - r * 0.48, m.z + r * 0.8};
  auto to_p3 = [&](const Point3& x, double) { return dist(x, p3); };
  const auto s3 = sphere_argmin(to_p3, m, r, 3, SphereGrid{}, 1e-6);
  CHECK(dist(s3.point, m) == doctest::Approx(r).epsilon(1e-12));
  CHECK(dist(s3.point, p3) < 0.05);

  const Point3 p2{m.x + r * std::cos(2.0), m.y + r * std::sin(2.0), m.z};
  auto to_p2 = [&](const Point3& x, double) { return dist(x, p2); };
  const auto s2 = sphere_argmin(to_p2, m, r, 2, SphereGrid{}, 1e-6);
  CHECK(s2.point.z == m.z);
  CHECK(dist(s2.point, p2) < 1e-3);
}

TEST_CASE("sphere argmin: ties and exclusions") {
  const Point3 m{0.0, 0.0, 0.0};
  auto flat = [](const Point3&, double) { return 1.0; };
  const auto c = sphere_argmin(flat, m, 2.0, 2, SphereGrid{}, 1e-6);
  CHECK(c.point.x == 2.0);
  CHECK(c.point.y == 0.0);
  const auto s = sphere_argmin(flat, m, 2.0, 3, SphereGrid{}, 1e-6);
  CHECK(s.point.z == 2.0);

  // Excluded half: the first admissible index wins.
  auto half = [](const Point3& x, double) { return x.y < 0.5 ? INFINITY : 1.0; };
  const auto h = sphere_argmin(half, m, 2.0, 2, SphereGrid{}, 1e-6);
  CHECK(h.point.y >= 0.5);
  CHECK(h.point.y < 0.52);

  auto none = [](const Point3&, double) { return INFINITY; };
  CHECK_THROWS_AS(sphere_argmin(none, m, 1.0, 3, SphereGrid{}, 1e-6), InfeasibleSphere);
  CHECK_THROWS_AS(sphere_argmin(flat, m, 0.0, 3, SphereGrid{}, 1e-6), DomainError);
}

TEST_CASE("sphere argmin: Task I circle against a dense sweep") {
  const auto s = planar(kM2, cone_e1());
  auto f = [&](const Point3& p, double) {
    if (!in_reachable_set(s.task, s.gravity, s.reach, p)) return double(INFINITY);
    auto v = residual(s, Branch::low, p);
    return v ? *v : double(INFINITY);
  };
  const double radius = 100.0;
  const SphereGrid grid;
  const auto got = sphere_argmin(f, s.target, radius, 2, grid, 1e-4);
  double best = INFINITY;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    best = std::min(best, f({s.target.x + radius * std::cos(a), s.target.y + radius * std::sin(a), 0.0}, INFINITY));
  }
  // One grid cell of arc changes F by at most L * cell length (1-norm).
  const double cell = radius * 2.0 * kPi / grid.circle * std::sqrt(2.0);
  const double slack = lip_residual(s, Branch::low, 1e-4).value * cell;
  CHECK(got.value <= best + slack);
  CHECK(got.value >= best - 1e-12);
}

TEST_CASE("parameters") {
  SolverParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.stop_residual() == p.eps0);
  p.gamma = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidScenario);
  p = {};
  p.eps_star = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidScenario);
  p = {};
  p.eps0 = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidScenario);
}

TEST_CASE("project branch: feasible target") {
  const GravityContext ctx(180.0);
  const Point2 in = impact_point_planar(ctx, {0.05, deg_to_rad(37.0)});
  const auto s = planar({in.x, in.y, 0.0}, cone_e1());
  const auto out = project_branch(s, Branch::low, with_eps(0.1));
  CHECK(out.result.status == SolveStatus::converged);
  CHECK(out.result.iterations == 0);
  CHECK(out.result.distance == 0.0);
  CHECK(out.result.angles.psi == doctest::Approx(deg_to_rad(37.0)));

  const auto both = solve(s, with_eps(0.01));
  CHECK(both.best.distance == 0.0);
}

TEST_CASE("project branch: Task I M2 E1 at 0.01") {
  const auto s = planar(kM2, cone_e1());
  const auto p = with_eps(0.01, true);
  const auto out = project_branch(s, Branch::low, p);
  REQUIRE(out.result.status == SolveStatus::converged);
  CHECK(out.result.point.x == doctest::Approx(3081.4).epsilon(20.0 / 3081.4));
  CHECK(std::abs(rad_to_deg(out.result.angles.psi) - 34.4) <= 0.5);
  CHECK(std::abs(rad_to_deg(out.result.angles.phi)) <= 0.5);
  CHECK(out.result.residual < 0.01);
  check_trace(s, out, p);
}

TEST_CASE("project branch: Task II.a M1 E2 at 0.1") {
  const auto s = spatial(kM1, cone_e2());
  const auto p = with_eps(0.1, true);
  const auto out = project_branch(s, Branch::low, p);
  REQUIRE(out.result.status == SolveStatus::converged);
  CHECK(std::abs(out.result.point.x - 108.7) <= 30.0);
  CHECK(std::abs(out.result.point.y + 0.5) <= 30.0);
  CHECK(std::abs(out.result.point.z - 25.9) <= 30.0);
  CHECK(std::abs(rad_to_deg(out.result.angles.phi) + 0.3) <= 1.0);
  CHECK(std::abs(rad_to_deg(out.result.angles.psi) - 14.3) <= 1.0);
  check_trace(s, out, p);
}

TEST_CASE("solve: Task I M2 E2 at 0.01") {
  const auto s = planar(kM2, cone_e2());
  const auto sol = solve(s, with_eps(0.01));
  REQUIRE(sol.best.status == SolveStatus::converged);
  CHECK(std::abs(sol.best.point.x - 2316.7) <= 20.0);
  CHECK(std::abs(sol.best.point.y - 217.0) <= 20.0);
  CHECK(std::abs(rad_to_deg(sol.best.angles.phi) - 5.4) <= 0.5);
  CHECK(std::abs(rad_to_deg(sol.best.angles.psi) - 22.4) <= 0.5);
  // The lobbed branch is either farther or stopped as dominated.
  const auto& hi = sol.branches[1].result;
  CHECK((hi.status == SolveStatus::dominated || hi.distance >= sol.best.distance));
}

TEST_CASE("solve: Task II.b M2 E2 at 0.1") {
  const auto s = terrain(kM2, cone_e2());
  const auto sol = solve(s, with_eps(0.1));
  REQUIRE(sol.best.status == SolveStatus::converged);
  CHECK(sol.best.residual < 0.1);
  CHECK(std::abs(sol.best.point.x - 2502.2) <= 30.0);
  CHECK(std::abs(sol.best.point.y - 107.1) <= 30.0);
  CHECK(std::abs(sol.best.point.z + 8.6) <= 30.0);
  CHECK(std::abs(rad_to_deg(sol.best.angles.phi) - 2.5) <= 1.0);
  CHECK(std::abs(rad_to_deg(sol.best.angles.psi) - 24.4) <= 1.0);
}

TEST_CASE("solve: iteration cap keeps the best point") {
  const auto s = spatial(kM2, cone_e2());
  auto p = with_eps(0.01);
  p.max_iter = 50;
  const auto out = project_branch(s, Branch::low, p);
  CHECK(out.result.status == SolveStatus::iter_cap);
  CHECK(out.result.iterations == 50);
  CHECK(out.result.residual == doctest::Approx(residual_F(s, Branch::low, out.result.point)));
}

TEST_CASE("solve: targets outside the reachable set") {
  auto s = spatial(kM2, cone_e2());
  s.target = {50.0, 0.0, 0.0};
  CHECK_THROWS_AS(solve(s, with_eps(0.1)), OutsideReachableSet);
  s.target = {100.0, 0.0, 1700.0};
  CHECK_THROWS_AS(solve(s, with_eps(0.1)), OutsideReachableSet);
}

TEST_CASE("chebyshev center") {
  const std::vector<Point2> two{{0.0, 0.0}, {4.0, 2.0}};
  const auto c2 = chebyshev_center(two);
  CHECK(c2.x == doctest::Approx(2.0));
  CHECK(c2.y == doctest::Approx(1.0));

  const std::vector<Point2> tri{{0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0}};
  const auto circle = smallest_enclosing_circle(tri);
  CHECK(circle.center.x == doctest::Approx(1.0));
  CHECK(circle.center.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(circle.radius == doctest::Approx(1.0));

  const std::vector<Point2> one{{3.0, -4.0}};
  CHECK(chebyshev_center(one).x == 3.0);
  CHECK(chebyshev_center(one).y == -4.0);
  CHECK_THROWS_AS(chebyshev_center(std::vector<Point2>{}), DomainError);
}
