#include "invball/geometry.hpp"

#include <string>

#include "invball/error.hpp"

namespace invball {

namespace {

// Relative slack absorbing round-off when a point produced by the forward
// map sits exactly on a fold (maximum range or the envelope).
constexpr double kFoldSlack = 1e-12;

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::planar:
      return "I";
    case Task::spatial:
      return "II.a";
    case Task::terrain:
      return "II.b";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  if (text == "I") return Task::planar;
  if (text == "II.a" || text == "IIa") return Task::spatial;
  if (text == "II.b" || text == "IIb") return Task::terrain;
  throw InvalidScenario("unknown task '" + std::string(text) + "' (expected I, II.a or II.b)");
}

GravityContext::GravityContext(double v0, double g) : v0_(v0), g_(g) {
  if (!(v0 > 0.0) || !std::isfinite(v0)) {
    throw InvalidScenario("muzzle speed must be positive, got " + std::to_string(v0));
  }
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw InvalidScenario("gravitational acceleration must be positive, got " +
                          std::to_string(g));
  }
  v_ = v0 / std::sqrt(g);
  v2_ = v0 * v0 / g;
}

GravityContext dimensionless_speed(double v0, double g) { return GravityContext(v0, g); }

ReachableSetParams planar_reach(const GravityContext& ctx, double kappa) {
  if (!(kappa > 0.0)) throw InvalidScenario("kappa must be positive");
  if (!(ctx.v2() > kappa)) throw InvalidScenario("kappa exceeds the maximum range v^2");
  return {kappa, 0.0, ctx.v2()};
}

ReachableSetParams spatial_reach(const GravityContext& ctx, double kappa, double z_min) {
  if (!(kappa > 0.0)) throw InvalidScenario("kappa must be positive");
  if (!(z_min < 0.0)) throw InvalidScenario("z_min must be negative");
  const double rho = ctx.v() * std::sqrt(ctx.v2() - 2.0 * z_min);
  if (!(rho > kappa)) throw InvalidScenario("kappa exceeds the maximum range");
  return {kappa, z_min, rho};
}

Velocity velocity_from_angles(const GravityContext& ctx, ShotAngles a) {
  if (!(std::abs(a.psi) < kPi / 2)) throw DomainError("elevation must lie in (-pi/2, pi/2)");
  const double horizontal = ctx.v0() * std::cos(a.psi);
  return {horizontal * std::cos(a.phi), horizontal * std::sin(a.phi), ctx.v0() * std::sin(a.psi)};
}

Point2 impact_point_planar(const GravityContext& ctx, ShotAngles a) {
  if (!(a.psi >= 0.0 && a.psi < kPi / 2)) {
    throw DomainError("planar impact requires elevation in [0, pi/2)");
  }
  const double r = ctx.v2() * std::sin(2.0 * a.psi);
  return {r * std::cos(a.phi), r * std::sin(a.phi)};
}

Point3 trajectory_point(const GravityContext& ctx, ShotAngles a, double r) {
  if (!(r >= 0.0)) throw DomainError("ground range must be non-negative");
  if (!(std::abs(a.psi) < kPi / 2)) throw DomainError("elevation must lie in (-pi/2, pi/2)");
  const double t = std::tan(a.psi);
  const double z = r * t - (1.0 + t * t) * r * r / (2.0 * ctx.v2());
  return {r * std::cos(a.phi), r * std::sin(a.phi), z};
}

double azimuth(Point2 n, double kappa) {
  if (!(n.x >= kappa)) throw OutsideReachableSet("azimuth requires x >= kappa");
  return azimuth_of(n.x, n.y);
}

double azimuth(Point3 n, double kappa) { return azimuth(Point2{n.x, n.y}, kappa); }

std::optional<double> try_inverse_elevation_planar(const GravityContext& ctx, Point2 n, Branch j) {
  const double r = std::hypot(n.x, n.y);
  double ratio = r / ctx.v2();
  if (ratio > 1.0) {
    if (ratio > 1.0 + kFoldSlack) return std::nullopt;
    ratio = 1.0;
  }
  const double half = 0.5 * std::asin(ratio);
  return j == Branch::low ? half : kPi / 2 - half;
}

double inverse_elevation_planar(const GravityContext& ctx, Point2 n, Branch j) {
  auto psi = try_inverse_elevation_planar(ctx, n, j);
  if (!psi) throw Unreachable("ground range exceeds the maximum range v^2");
  return *psi;
}

double spatial_radicand(const GravityContext& ctx, Point3 n) {
  const double v2 = ctx.v2();
  return v2 * v2 - (n.x * n.x + n.y * n.y + 2.0 * v2 * n.z);
}

std::optional<double> try_inverse_elevation_spatial(const GravityContext& ctx, Point3 n, Branch j) {
  const double v2 = ctx.v2();
  const double r2 = n.x * n.x + n.y * n.y;
  double radicand = spatial_radicand(ctx, n);
  if (radicand < 0.0) {
    if (radicand < -kFoldSlack * v2 * v2) return std::nullopt;
    radicand = 0.0;
  }
  const double r = std::sqrt(r2);
  if (!(r > 0.0)) return std::nullopt;
  const double s = std::sqrt(radicand);
  if (j == Branch::high) return std::atan((v2 + s) / r);
  // (v^2 - s) rewritten without cancellation: (v^4 - s^2) / (v^2 + s).
  return std::atan((r2 + 2.0 * v2 * n.z) / ((v2 + s) * r));
}

double inverse_elevation_spatial(const GravityContext& ctx, Point3 n, Branch j) {
  auto psi = try_inverse_elevation_spatial(ctx, n, j);
  if (!psi) throw Unreachable("point lies above the envelope of trajectories");
  return *psi;
}

double envelope_height(const GravityContext& ctx, double r) {
  return 0.5 * (ctx.v2() - r * r / ctx.v2());
}

bool in_reachable_set(Task task, const GravityContext& ctx, const ReachableSetParams& params,
                      Point3 n) {
  if (!(n.x >= params.kappa)) return false;
  const double r = std::sqrt(n.x * n.x + n.y * n.y);
  if (!(r <= params.rho)) return false;
  if (task == Task::planar) return true;
  return n.z >= params.z_min && n.z <= envelope_height(ctx, r);
}

}  // namespace invball
