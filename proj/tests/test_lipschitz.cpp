#include <doctest.h>

#include <cmath>

#include "invball/error.hpp"
#include "invball/lipschitz.hpp"
#include "support.hpp"

using namespace invball;
using namespace testing_support;

namespace {

// Bisection on the equation in tau directly, independent of the angle form.
double tau_oracle(double eps) {
  auto f = [eps](double t) { return (kPi / 2 - eps - std::asin(t)) * std::sqrt(1.0 - t * t) - (1.0 - t); };
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("tau root") {
  CHECK(tau_root(kTauEpsMax) == 0.0);
  for (double eps : {0.05, 0.1, 0.2, 0.4, 0.57}) {
    CHECK(tau_root(eps) == doctest::Approx(tau_oracle(eps)).epsilon(1e-9));
  }
  // Small eps pushes tau towards 1; the angle form keeps sqrt(1 - tau^2) > 0.
  const double small = 1e-6;
  CHECK(std::sin(tau_root_angle(small)) > 0.0);
  CHECK(tau_root_angle(small) < 1e-5);

  CHECK_THROWS_AS(tau_root(0.0), DomainError);
  CHECK_THROWS_AS(tau_root(-0.1), DomainError);
  CHECK_THROWS_AS(tau_root(kTauEpsMax + 1e-9), DomainError);
  CHECK(lip_arcsin(0.1) == doctest::Approx(1.0 / std::sqrt(1.0 - tau_oracle(0.1) * tau_oracle(0.1))).epsilon(1e-8));
}

TEST_CASE("cone and azimuth bounds") {
  CHECK(lip_cone(cone_e1()) == 1.0);
  CHECK(lip_cone(cone_e2()) == 1.0);
  VisibilityCone steep = cone_e1();
  steep.upper = steep.upper.with_declared_lipschitz(3.0);
  CHECK(lip_cone(steep) == 3.0);
  CHECK(lip_azimuth(100.0) == doctest::Approx(std::sqrt(2.0) / 100.0));
  CHECK_THROWS_AS(lip_azimuth(0.0), DomainError);
}

TEST_CASE("elevation bounds") {
  const GravityContext ctx(180.0);
  const double v2 = ctx.v2();
  const auto wi = planar_reach(ctx, 100.0);
  const auto wii = spatial_reach(ctx, 100.0, -10.0);

  // 2 eps at the top of the tau domain: tau = 0, bound 1 / (sqrt 2 v^2).
  CHECK(lip_elevation(Task::planar, kTauEpsMax / 2, ctx, wi).value ==
        doctest::Approx(1.0 / (std::sqrt(2.0) * v2)));
  const double t = tau_oracle(0.1);
  CHECK(lip_elevation(Task::planar, 0.05, ctx, wi).value ==
        doctest::Approx(1.0 / (std::sqrt(2.0) * v2 * std::sqrt(1.0 - t * t))).epsilon(1e-8));
  CHECK_THROWS_AS(lip_elevation(Task::planar, 0.3, ctx, wi), DomainError);

  // Hand arithmetic: beta = 6616.2, rho = 3313.9, L(0.1) = 2.593.
  const double beta = v2 + std::sqrt(v2 * v2 - 1e4 + 20.0 * v2);
  CHECK(beta == doctest::Approx(6616.2).epsilon(1e-5));
  const double lip = lip_elevation(Task::spatial, 0.1, ctx, wii).value;
  CHECK(lip == doctest::Approx(2.593).epsilon(2e-4));
  CHECK(lip == doctest::Approx((wii.rho / 0.2 + beta * std::sqrt(2.0)) / 1e4).epsilon(1e-14));
  CHECK_THROWS_AS(lip_elevation(Task::spatial, 0.0, ctx, wii), DomainError);
}

TEST_CASE("residual bounds") {
  // Task I: w1 lip(g) (lip(phi) + lip(psi_I)(eps)) against w2.
  {
    const auto s = planar(kM2, cone_e1());
    const double expect = std::sqrt(2.0) / 100.0 + lip_elevation(Task::planar, 0.1, s.gravity, s.reach).value;
    CHECK(lip_residual(s, Branch::low, 0.1).value == doctest::Approx(expect));
    CHECK(lip_residual(s, Branch::high, 0.1).value == lip_residual(s, Branch::low, 0.1).value);
  }
  // Task II.b: the arc term dominates at 0.001 (3313.9 / 0.8 + 1) = 4.143.
  {
    const auto s = terrain(kM1, cone_e1());
    CHECK(lip_residual(s, Branch::low, 0.1).value == doctest::Approx(4.143).epsilon(2e-4));
  }
  // Scaling all weights and eps together scales the bound.
  {
    auto a = planar(kM2, cone_e2());
    auto b = a;
    b.weights = a.weights.scaled(2.0);
    CHECK(lip_residual(b, Branch::low, 0.2).value ==
          doctest::Approx(2.0 * lip_residual(a, Branch::low, 0.1).value).epsilon(1e-14));
  }
  // Smaller eps, larger bound.
  {
    const auto s = spatial(kM2, cone_e2());
    double prev = 0.0;
    for (double eps : {0.2, 0.1, 0.05, 0.01, 0.001}) {
      const double v = lip_residual(s, Branch::low, eps).value;
      CHECK(v > prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(lip_residual(planar(kM2, cone_e1()), Branch::low, 0.0), DomainError);
}
