#pragma once

// Vacuum trajectory geometry in the gun-centered frame: x downrange, z up
// (against gravity), origin at the muzzle.

#include <cmath>
#include <optional>
#include <string_view>

namespace invball {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kStandardGravity = 9.80665;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Barrel semi-axis direction: azimuth phi and elevation psi, radians.
struct ShotAngles {
  double phi = 0.0;
  double psi = 0.0;
};

struct Velocity {
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
};

/// Selects one single-valued branch of the two-valued inverse map:
/// `low` is the flat (direct-fire) arc, `high` the lobbed one.
enum class Branch { low = 1, high = 2 };

/// I: impact in the horizon plane. II.a: nearest trajectory point to a
/// target in space. II.b: impact on a terrain surface with line of sight.
enum class Task { planar, spatial, terrain };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

inline int dimension(Task task) { return task == Task::planar ? 2 : 3; }
inline int branch_index(Branch b) { return b == Branch::low ? 1 : 2; }

/// Muzzle speed together with the gravity scale. The only combination the
/// vacuum trajectory depends on is v^2 = v0^2 / g, a length in metres.
class GravityContext {
 public:
  GravityContext(double v0, double g = kStandardGravity);

  double v0() const { return v0_; }
  double g() const { return g_; }
  double v() const { return v_; }
  double v2() const { return v2_; }

 private:
  double v0_;
  double g_;
  double v_;
  double v2_;
};

GravityContext dimensionless_speed(double v0, double g = kStandardGravity);

/// Bounds of the reachable sets. For the planar task rho = v^2 and z_min is
/// unused; for the spatial tasks rho = v * sqrt(v^2 - 2 z_min).
struct ReachableSetParams {
  double kappa = 0.0;
  double z_min = 0.0;
  double rho = 0.0;
};

ReachableSetParams planar_reach(const GravityContext& ctx, double kappa);
ReachableSetParams spatial_reach(const GravityContext& ctx, double kappa, double z_min);

Velocity velocity_from_angles(const GravityContext& ctx, ShotAngles a);

/// Impact point in the horizon plane. Requires psi in [0, pi/2).
Point2 impact_point_planar(const GravityContext& ctx, ShotAngles a);

/// Point of the trajectory with angles `a` whose ground-plane distance from
/// the muzzle is r >= 0.
Point3 trajectory_point(const GravityContext& ctx, ShotAngles a, double r);

/// Unchecked azimuth arctan(y / x), valid for x > 0.
inline double azimuth_of(double x, double y) { return std::atan2(y, x); }

/// Azimuth of a point with x >= kappa; throws OutsideReachableSet otherwise.
double azimuth(Point2 n, double kappa);
double azimuth(Point3 n, double kappa);

std::optional<double> try_inverse_elevation_planar(const GravityContext& ctx, Point2 n, Branch j);
double inverse_elevation_planar(const GravityContext& ctx, Point2 n, Branch j);

/// v^4 - (x^2 + y^2 + 2 v^2 z); negative means no elevation reaches the point.
double spatial_radicand(const GravityContext& ctx, Point3 n);

std::optional<double> try_inverse_elevation_spatial(const GravityContext& ctx, Point3 n, Branch j);
double inverse_elevation_spatial(const GravityContext& ctx, Point3 n, Branch j);

/// Height of the envelope of all trajectories (paraboloid of safety) at
/// ground range r.
double envelope_height(const GravityContext& ctx, double r);

/// Membership in the reachable set of the task (planar tasks ignore z).
bool in_reachable_set(Task task, const GravityContext& ctx, const ReachableSetParams& params,
                      Point3 n);

}  // namespace invball
