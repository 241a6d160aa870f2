#include "invball/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invball/error.hpp"

namespace invball {

double tau_root_angle(double eps) {
  if (!(eps > 0.0 && eps <= kTauEpsMax)) {
    throw DomainError("tau_root requires eps in (0, pi/2 - 1], got " + std::to_string(eps));
  }
  if (eps == kTauEpsMax) return kPi / 2;
  // With tau = cos(u) the equation reads (u - eps) sin u = 1 - cos u. The
  // difference is negative on (0, u*) and positive on (u*, pi/2], and
  // changes sign exactly once, past u = eps.
  auto f = [eps](double u) {
    const double h = std::sin(0.5 * u);
    return (u - eps) * std::sin(u) - 2.0 * h * h;
  };
  double lo = eps;
  double hi = kPi / 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double tau_root(double eps) {
  if (eps == kTauEpsMax) return 0.0;
  return std::cos(tau_root_angle(eps));
}

double lip_arcsin(double eps) { return 1.0 / std::sin(tau_root_angle(eps)); }

double lip_cone(const VisibilityCone& cone) {
  return std::max({cone.lower.lipschitz(), cone.upper.lipschitz(), 1.0});
}

double lip_azimuth(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  return std::sqrt(2.0) / kappa;
}

EpsLipBound lip_elevation(Task task, double eps, const GravityContext& ctx,
                          const ReachableSetParams& params) {
  if (task == Task::planar) {
    if (!(eps > 0.0 && 2.0 * eps <= kTauEpsMax)) {
      throw DomainError("planar elevation bound requires 2 eps in (0, pi/2 - 1], got eps = " +
                        std::to_string(eps));
    }
    const double value = 1.0 / (std::sqrt(2.0) * ctx.v2() * std::sin(tau_root_angle(2.0 * eps)));
    return {eps, value};
  }
  if (!(eps > 0.0)) throw DomainError("spatial elevation bound requires eps > 0");
  const double v2 = ctx.v2();
  const double kappa = params.kappa;
  const double beta = v2 + std::sqrt(v2 * v2 - kappa * kappa - 2.0 * v2 * params.z_min);
  const double value = (params.rho / (2.0 * eps) + beta * std::sqrt(2.0)) / (kappa * kappa);
  return {eps, value};
}

EpsLipBound lip_residual(const Scenario& s, Branch /*j*/, double eps) {
  if (!(eps > 0.0)) throw DomainError("residual bound requires eps > 0");
  const auto& w = s.weights;
  const double lg = lip_cone(s.cone);
  // The cone term absorbs the whole slack: the elevation bound is taken at
  // eps / (w1 lip(g)) so that w1 lip(g) times its slack is exactly eps.
  const double nested = eps / (w[0] * lg);
  const double elevation = lip_elevation(s.task, nested, s.gravity, s.reach).value;
  const double cone_term = w[0] * lg * (lip_azimuth(s.reach.kappa) + elevation);

  double value = std::max(cone_term, w[1]);
  if (s.task == Task::spatial) value = std::max(value, w[2]);
  if (s.task == Task::terrain) {
    const double lh = s.terrain->lipschitz();
    // The arc-clearance bound carries slack w5 * eps5; eps5 = eps keeps that
    // within eps for w5 <= 1, larger weights shrink eps5 accordingly.
    const double eps5 = eps / std::max(w[4], 1.0);
    const double arc_term = w[4] * lh * (s.reach.rho * lh / (8.0 * eps5) + 1.0);
    value = std::max({value, w[2] * lh, w[3] * lh, arc_term});
  }
  return {eps, value};
}

}  // namespace invball
