#pragma once

// Certified bounds L(eps) with |f(a) - f(b)| <= L(eps) * ||a - b||_1 + eps for
// every function in the residual chain. All bounds are in the 1-norm.

#include "invball/constraints.hpp"

namespace invball {

/// A bound that holds with additive slack `eps`; eps == 0 marks a plain
/// Lipschitz constant.
struct EpsLipBound {
  double eps = 0.0;
  double value = 0.0;
};

/// Largest eps accepted by tau_root: pi/2 - 1.
inline constexpr double kTauEpsMax = kPi / 2 - 1.0;

/// Root tau in [0, 1) of (pi/2 - eps - arcsin tau) sqrt(1 - tau^2) = 1 - tau,
/// for eps in (0, pi/2 - 1]. Throws DomainError otherwise.
double tau_root(double eps);

/// arccos(tau_root(eps)). Keeps sqrt(1 - tau^2) = sin(angle) accurate when
/// tau is close to 1 (small eps).
double tau_root_angle(double eps);

/// eps-Lipschitz bound of arcsin on [0, 1]: (1 - tau(eps)^2)^(-1/2).
double lip_arcsin(double eps);

/// max{lip(g1), lip(g2), 1}.
double lip_cone(const VisibilityCone& cone);

/// sqrt(2) / kappa.
double lip_azimuth(double kappa);

/// Bound for the inverse elevation of the planar task (needs 2 eps in
/// (0, pi/2 - 1]) or of the spatial tasks (any eps > 0).
EpsLipBound lip_elevation(Task task, double eps, const GravityContext& ctx,
                          const ReachableSetParams& params);

/// Bound for the residual of the scenario's task at slack eps.
EpsLipBound lip_residual(const Scenario& s, Branch j, double eps);

}  // namespace invball
