#pragma once

// Feasibility description of the three aiming tasks: the visibility cone of
// admissible barrel directions, the terrain field, and the aggregated
// max-type residuals whose zero sublevel set is the feasible set.

#include <array>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "invball/geometry.hpp"

namespace invball {

/// An elevation bound psi = g(phi) of the visibility cone, radians in and out.
class BoundFunction {
 public:
  /// g(phi) = value.
  static BoundFunction constant(double value);
  /// g(phi) = |(offset + amplitude * sin(phi)) * scale|.
  static BoundFunction abs_sine(double offset, double amplitude, double scale);
  /// Piecewise-linear interpolation through (phi, psi) knots sorted by phi,
  /// held constant outside the knot range.
  static BoundFunction table(std::vector<std::pair<double, double>> knots);

  double operator()(double phi) const;
  /// Same value with sin(phi) supplied by the caller; lets the two bounds
  /// of a cone share one sine evaluation.
  double at(double phi, double sin_phi) const;
  bool uses_sine() const { return std::holds_alternative<AbsSine>(form_); }

  /// Lipschitz constant in phi: the declared value if one was given,
  /// otherwise the exact constant of the functional form.
  double lipschitz() const { return declared_lip_ ? *declared_lip_ : exact_lip_; }
  bool has_declared_lipschitz() const { return declared_lip_.has_value(); }
  BoundFunction with_declared_lipschitz(double lip) const;

 private:
  struct Constant {
    double value;
  };
  struct AbsSine {
    double offset, amplitude, scale;
  };
  struct Table {
    std::vector<std::pair<double, double>> knots;
  };

  explicit BoundFunction(std::variant<Constant, AbsSine, Table> form, double exact_lip)
      : form_(std::move(form)), exact_lip_(exact_lip) {}

  std::variant<Constant, AbsSine, Table> form_;
  double exact_lip_ = 0.0;
  std::optional<double> declared_lip_;
};

/// The set E of admissible (phi, psi): theta1 <= phi <= theta2 and
/// lower(phi) <= psi <= upper(phi). Slices with lower > upper are empty.
struct VisibilityCone {
  double theta1 = 0.0;
  double theta2 = 2.0 * kPi;
  BoundFunction lower = BoundFunction::constant(-kPi / 2);
  BoundFunction upper = BoundFunction::constant(kPi / 2);
};

/// E1: 35 deg <= psi <= 40 deg for every azimuth.
VisibilityCone cone_e1();
/// E2: |(4 + sin phi) pi/36| <= psi <= |(1 + sin phi) pi/9|.
VisibilityCone cone_e2();

/// max{theta1 - phi, phi - theta2, lower(phi) - psi, psi - upper(phi)}.
/// Negative azimuths are shifted into [0, 2 pi) only when theta1 > 0.
double cone_violation(const VisibilityCone& cone, ShotAngles a);

/// Spot-checks declared Lipschitz constants of the bound functions by
/// sampling azimuth pairs; throws InvalidScenario on a violation.
void validate_cone(const VisibilityCone& cone, int pairs = 20000, unsigned seed = 7);

/// Terrain H(x, y, z) as a min/max tree over affine pieces a x + b y + c z + d.
/// The solid is {H <= 0} and its boundary {H = 0}.
class TerrainField {
 public:
  static TerrainField affine(double a, double b, double c, double d);
  static TerrainField min_of(std::vector<TerrainField> children);
  static TerrainField max_of(std::vector<TerrainField> children);
  static TerrainField constant(double value) { return affine(0, 0, 0, value); }
  /// min{max{90 - x, x - 130, -10 - y, y - 30, z - 20}, z + 10}: a 40 x 40 x 30 m
  /// block standing on the floor z = -10.
  static TerrainField block_on_floor();
  /// H = z - z0.
  static TerrainField flat_floor(double z0);

  double operator()(const Point3& p) const;

  /// Lipschitz constant under the 1-norm, bounded by the largest absolute
  /// coefficient row-sum |a| + |b| + |c| over the affine pieces.
  double lipschitz() const { return lip_; }

 private:
  enum class Op { affine, min, max };
  struct Node {
    Op op;
    std::array<double, 4> coef{};  // affine only
    int arity = 0;                 // min/max only
  };

  TerrainField() = default;
  static TerrainField combine(Op op, std::vector<TerrainField> children);

  std::vector<Node> postfix_;
  int stack_depth_ = 0;
  double lip_ = 0.0;
};

/// Checks H(0,0,0) >= 0 and, on a sample of points with z <= z_min, H <= 0.
void validate_terrain(const TerrainField& terrain, double z_min, double extent,
                      int samples = 20000, unsigned seed = 11);

/// Resolution of the two 1-D clearance minimizations: n + 1 uniform samples
/// over [0, 1], then golden-section refinement around the best sample.
struct ClearanceGrid {
  int n_lambda = 64;
  int n_mu = 64;
  int refine_iters = 24;
};

double segment_clearance(const TerrainField& terrain, Point3 m, Point3 n, const ClearanceGrid& grid);

double trajectory_clearance(const GravityContext& ctx, const TerrainField& terrain, ShotAngles a,
                            double r, const ClearanceGrid& grid);

/// Weights of the residual components, in the order the residual lists them.
struct WeightSet {
  std::array<double, 5> w{};
  int count = 0;

  double operator[](int i) const { return w[static_cast<std::size_t>(i)]; }
  static WeightSet defaults(Task task);
  static WeightSet from(Task task, const std::vector<double>& values);
  WeightSet scaled(double factor) const;
};

/// A fully specified aiming problem: everything the residual and the
/// projection need except the solver's own parameters.
struct Scenario {
  Task task = Task::planar;
  GravityContext gravity{180.0};
  ReachableSetParams reach{};
  Point3 target{};
  VisibilityCone cone{};
  std::optional<TerrainField> terrain;
  WeightSet weights{};
  ClearanceGrid clearance{};
};

/// Builds a scenario with the task's reachable set and default weights.
Scenario make_scenario(Task task, double v0, double kappa, double z_min, Point3 target,
                       VisibilityCone cone, std::optional<TerrainField> terrain = std::nullopt,
                       double g = kStandardGravity);

/// Per-component values of a residual evaluation (already weighted).
struct ResidualBreakdown {
  std::array<double, 5> components{};
  int count = 0;
  double value = 0.0;
  ShotAngles angles{};
};

/// F_{task, j}(n). Returns nullopt when the branch has no elevation reaching
/// n (negative radicand, or range beyond v^2 in the planar task).
std::optional<double> residual(const Scenario& s, Branch j, const Point3& n);
std::optional<ResidualBreakdown> residual_breakdown(const Scenario& s, Branch j, const Point3& n);

/// Throwing form of `residual`: unreachable points raise Unreachable.
double residual_F(const Scenario& s, Branch j, const Point3& n);

/// Residual evaluation that may stop early: when the cheap components
/// already exceed `cutoff`, returns that partial maximum (a lower bound of
/// F that is > cutoff) without computing the clearance minimizations.
std::optional<double> residual_bounded(const Scenario& s, Branch j, const Point3& n, double cutoff);

}  // namespace invball
