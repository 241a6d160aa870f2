#include "invball/constraints.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "invball/error.hpp"

namespace invball {

// ---------------------------------------------------------------------------
// Visibility cone

BoundFunction BoundFunction::constant(double value) { return BoundFunction(Constant{value}, 0.0); }

BoundFunction BoundFunction::abs_sine(double offset, double amplitude, double scale) {
  return BoundFunction(AbsSine{offset, amplitude, scale}, std::abs(amplitude * scale));
}

BoundFunction BoundFunction::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw InvalidScenario("bound table needs at least one knot");
  double lip = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double dphi = knots[i].first - knots[i - 1].first;
    if (!(dphi > 0.0)) throw InvalidScenario("bound table knots must be strictly increasing in phi");
    lip = std::max(lip, std::abs(knots[i].second - knots[i - 1].second) / dphi);
  }
  return BoundFunction(Table{std::move(knots)}, lip);
}

BoundFunction BoundFunction::with_declared_lipschitz(double lip) const {
  if (!(lip >= 0.0) || !std::isfinite(lip)) {
    throw InvalidScenario("declared Lipschitz constant must be finite and non-negative");
  }
  BoundFunction copy = *this;
  copy.declared_lip_ = lip;
  return copy;
}

double BoundFunction::operator()(double phi) const {
  return uses_sine() ? at(phi, std::sin(phi)) : at(phi, 0.0);
}

double BoundFunction::at(double phi, double sin_phi) const {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  if (const auto* s = std::get_if<AbsSine>(&form_)) {
    return std::abs((s->offset + s->amplitude * sin_phi) * s->scale);
  }
  const auto& knots = std::get<Table>(form_).knots;
  if (phi <= knots.front().first) return knots.front().second;
  if (phi >= knots.back().first) return knots.back().second;
  auto hi = std::upper_bound(knots.begin(), knots.end(), phi,
                             [](double p, const auto& k) { return p < k.first; });
  auto lo = hi - 1;
  const double t = (phi - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

VisibilityCone cone_e1() {
  return {0.0, 2.0 * kPi, BoundFunction::constant(7.0 * kPi / 36.0),
          BoundFunction::constant(8.0 * kPi / 36.0)};
}

VisibilityCone cone_e2() {
  return {0.0, 2.0 * kPi, BoundFunction::abs_sine(4.0, 1.0, kPi / 36.0),
          BoundFunction::abs_sine(1.0, 1.0, kPi / 9.0)};
}

double cone_violation(const VisibilityCone& cone, ShotAngles a) {
  const double phi = (cone.theta1 > 0.0 && a.phi < 0.0) ? a.phi + 2.0 * kPi : a.phi;
  const double sp = (cone.lower.uses_sine() || cone.upper.uses_sine()) ? std::sin(phi) : 0.0;
  return std::max({cone.theta1 - phi, phi - cone.theta2, cone.lower.at(phi, sp) - a.psi,
                   a.psi - cone.upper.at(phi, sp)});
}

void validate_cone(const VisibilityCone& cone, int pairs, unsigned seed) {
  if (!(cone.theta1 <= cone.theta2)) throw InvalidScenario("cone requires theta1 <= theta2");
  std::mt19937_64 rng(seed);
  const double lo = std::min(cone.theta1, -kPi / 2);
  const double hi = std::max(cone.theta2, kPi / 2);
  std::uniform_real_distribution<double> phi_dist(lo, hi);
  std::uniform_real_distribution<double> step_dist(-0.05, 0.05);
  auto check = [&](const BoundFunction& f, const char* name) {
    if (!f.has_declared_lipschitz()) return;
    const double lip = f.lipschitz();
    for (int i = 0; i < pairs; ++i) {
      const double a = phi_dist(rng);
      // Mix far pairs with near pairs; near pairs are the ones that expose
      // an underestimated slope.
      const double b = (i % 2 == 0) ? phi_dist(rng) : a + step_dist(rng);
      const double lhs = std::abs(f(a) - f(b));
      const double rhs = lip * std::abs(a - b);
      if (lhs > rhs * (1.0 + 1e-9) + 1e-12) {
        throw InvalidScenario(std::string("declared Lipschitz constant of ") + name +
                              " is violated near phi = " + std::to_string(a));
      }
    }
  };
  check(cone.lower, "g1");
  check(cone.upper, "g2");
}

// ---------------------------------------------------------------------------
// Terrain

TerrainField TerrainField::affine(double a, double b, double c, double d) {
  TerrainField t;
  t.postfix_.push_back(Node{Op::affine, {a, b, c, d}, 0});
  t.stack_depth_ = 1;
  t.lip_ = std::abs(a) + std::abs(b) + std::abs(c);
  return t;
}

TerrainField TerrainField::combine(Op op, std::vector<TerrainField> children) {
  if (children.empty()) throw InvalidScenario("terrain min/max needs at least one operand");
  TerrainField t;
  int depth = 0;
  int i = 0;
  for (auto& child : children) {
    // Child i is evaluated with i earlier results already on the stack.
    depth = std::max(depth, i + child.stack_depth_);
    t.lip_ = std::max(t.lip_, child.lip_);
    t.postfix_.insert(t.postfix_.end(), child.postfix_.begin(), child.postfix_.end());
    ++i;
  }
  t.postfix_.push_back(Node{op, {}, static_cast<int>(children.size())});
  t.stack_depth_ = depth;
  return t;
}

TerrainField TerrainField::min_of(std::vector<TerrainField> children) {
  return combine(Op::min, std::move(children));
}

TerrainField TerrainField::max_of(std::vector<TerrainField> children) {
  return combine(Op::max, std::move(children));
}

TerrainField TerrainField::block_on_floor() {
  auto block = max_of({affine(-1, 0, 0, 90), affine(1, 0, 0, -130), affine(0, -1, 0, -10),
                       affine(0, 1, 0, -30), affine(0, 0, 1, -20)});
  return min_of({std::move(block), affine(0, 0, 1, 10)});
}

TerrainField TerrainField::flat_floor(double z0) { return affine(0, 0, 1, -z0); }

double TerrainField::operator()(const Point3& p) const {
  constexpr int kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap_stack;
  double* stack = inline_stack;
  if (stack_depth_ > kInline) {
    heap_stack.resize(static_cast<std::size_t>(stack_depth_));
    stack = heap_stack.data();
  }
  int top = 0;
  for (const Node& node : postfix_) {
    if (node.op == Op::affine) {
      stack[top++] = node.coef[0] * p.x + node.coef[1] * p.y + node.coef[2] * p.z + node.coef[3];
      continue;
    }
    const int base = top - node.arity;
    double acc = stack[base];
    // Left to right; on ties the first operand is kept.
    if (node.op == Op::min) {
      for (int i = base + 1; i < top; ++i) {
        if (stack[i] < acc) acc = stack[i];
      }
    } else {
      for (int i = base + 1; i < top; ++i) {
        if (stack[i] > acc) acc = stack[i];
      }
    }
    top = base;
    stack[top++] = acc;
  }
  return stack[0];
}

void validate_terrain(const TerrainField& terrain, double z_min, double extent, int samples,
                      unsigned seed) {
  if (!(terrain(Point3{}) >= 0.0)) {
    throw InvalidScenario("terrain places the gun inside the solid: H(0,0,0) < 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> horizontal(-extent, extent);
  std::uniform_real_distribution<double> depth(0.0, extent);
  for (int i = 0; i < samples; ++i) {
    const Point3 p{horizontal(rng), horizontal(rng), z_min - depth(rng)};
    if (terrain(p) > 1e-9) {
      throw InvalidScenario("terrain must satisfy H <= 0 wherever z <= z_min; violated at (" +
                            std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                            std::to_string(p.z) + ")");
    }
  }
}

// ---------------------------------------------------------------------------
// Clearance minimizations

namespace {

template <class F>
double minimize_on_unit_interval(F&& f, int n, int refine_iters) {
  n = std::max(n, 2);
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(static_cast<double>(i) / n);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (refine_iters <= 0) return best;

  constexpr double kInvPhi = 0.6180339887498949;
  double a = static_cast<double>(std::max(best_i - 1, 0)) / n;
  double b = static_cast<double>(std::min(best_i + 1, n)) / n;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  best = std::min({best, fc, fd});
  for (int it = 0; it < refine_iters; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      best = std::min(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      best = std::min(best, fd);
    }
  }
  return best;
}

}  // namespace

double segment_clearance(const TerrainField& terrain, Point3 m, Point3 n, const ClearanceGrid& grid) {
  const Point3 d{n.x - m.x, n.y - m.y, n.z - m.z};
  return minimize_on_unit_interval(
      [&](double t) { return terrain(Point3{m.x + t * d.x, m.y + t * d.y, m.z + t * d.z}); },
      grid.n_lambda, grid.refine_iters);
}

double trajectory_clearance(const GravityContext& ctx, const TerrainField& terrain, ShotAngles a,
                            double r, const ClearanceGrid& grid) {
  if (!(r >= 0.0)) throw DomainError("ground range must be non-negative");
  const double c = r * std::cos(a.phi);
  const double s = r * std::sin(a.phi);
  const double tan_psi = std::tan(a.psi);
  const double lin = r * tan_psi;
  const double quad = (1.0 + tan_psi * tan_psi) * r * r / (2.0 * ctx.v2());
  return minimize_on_unit_interval(
      [&](double mu) { return terrain(Point3{mu * c, mu * s, mu * lin - mu * mu * quad}); },
      grid.n_mu, grid.refine_iters);
}

// ---------------------------------------------------------------------------
// Weights and scenarios

WeightSet WeightSet::defaults(Task task) {
  switch (task) {
    case Task::planar:
      return {{1.0, 0.01, 0, 0, 0}, 2};
    case Task::spatial:
      return {{1.0, 0.01, 0.01, 0, 0}, 3};
    case Task::terrain:
      return {{1.0, 0.01, 0.001, 0.001, 0.001}, 5};
  }
  return {};
}

WeightSet WeightSet::from(Task task, const std::vector<double>& values) {
  const int expected = defaults(task).count;
  if (static_cast<int>(values.size()) != expected) {
    throw InvalidScenario("task " + std::string(to_string(task)) + " expects " +
                          std::to_string(expected) + " weights, got " +
                          std::to_string(values.size()));
  }
  WeightSet ws;
  ws.count = expected;
  for (int i = 0; i < expected; ++i) {
    if (!(values[static_cast<std::size_t>(i)] > 0.0)) {
      throw InvalidScenario("weights must be positive");
    }
    ws.w[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
  }
  return ws;
}

WeightSet WeightSet::scaled(double factor) const {
  WeightSet ws = *this;
  for (int i = 0; i < count; ++i) ws.w[static_cast<std::size_t>(i)] *= factor;
  return ws;
}

Scenario make_scenario(Task task, double v0, double kappa, double z_min, Point3 target,
                       VisibilityCone cone, std::optional<TerrainField> terrain, double g) {
  Scenario s;
  s.task = task;
  s.gravity = GravityContext(v0, g);
  s.reach = task == Task::planar ? planar_reach(s.gravity, kappa)
                                 : spatial_reach(s.gravity, kappa, z_min);
  s.target = task == Task::planar ? Point3{target.x, target.y, 0.0} : target;
  s.cone = std::move(cone);
  if (task == Task::terrain && !terrain) {
    throw InvalidScenario("task II.b requires a terrain");
  }
  s.terrain = std::move(terrain);
  s.weights = WeightSet::defaults(task);
  return s;
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

// Components that need no 1-D minimization. Returns false if unreachable.
bool cheap_components(const Scenario& s, Branch j, const Point3& n, ResidualBreakdown& out) {
  const auto& w = s.weights;
  const double phi = azimuth_of(n.x, n.y);
  std::optional<double> psi;
  if (s.task == Task::planar) {
    psi = try_inverse_elevation_planar(s.gravity, Point2{n.x, n.y}, j);
  } else {
    psi = try_inverse_elevation_spatial(s.gravity, n, j);
  }
  if (!psi) return false;
  out.angles = {phi, *psi};
  out.components[0] = w[0] * cone_violation(s.cone, out.angles);
  out.components[1] = w[1] * (s.reach.kappa - n.x);
  switch (s.task) {
    case Task::planar:
      out.count = 2;
      break;
    case Task::spatial:
      out.components[2] = w[2] * (s.reach.z_min - n.z);
      out.count = 3;
      break;
    case Task::terrain:
      out.components[2] = w[2] * std::abs((*s.terrain)(n));
      out.count = 3;
      break;
  }
  out.value = *std::max_element(out.components.begin(), out.components.begin() + out.count);
  return true;
}

double segment_component(const Scenario& s, const Point3& n) {
  return -s.weights[3] * segment_clearance(*s.terrain, s.target, n, s.clearance);
}

double arc_component(const Scenario& s, const Point3& n, ShotAngles angles) {
  const double r = std::sqrt(n.x * n.x + n.y * n.y);
  return -s.weights[4] * trajectory_clearance(s.gravity, *s.terrain, angles, r, s.clearance);
}

}  // namespace

std::optional<ResidualBreakdown> residual_breakdown(const Scenario& s, Branch j, const Point3& n) {
  ResidualBreakdown out;
  if (!cheap_components(s, j, n, out)) return std::nullopt;
  if (s.task == Task::terrain) {
    out.components[3] = segment_component(s, n);
    out.components[4] = arc_component(s, n, out.angles);
    out.count = 5;
    out.value = *std::max_element(out.components.begin(), out.components.end());
  }
  return out;
}

std::optional<double> residual(const Scenario& s, Branch j, const Point3& n) {
  auto b = residual_breakdown(s, j, n);
  if (!b) return std::nullopt;
  return b->value;
}

double residual_F(const Scenario& s, Branch j, const Point3& n) {
  auto f = residual(s, j, n);
  if (!f) throw Unreachable("no elevation of this branch reaches the point");
  return *f;
}

std::optional<double> residual_bounded(const Scenario& s, Branch j, const Point3& n, double cutoff) {
  ResidualBreakdown out;
  if (!cheap_components(s, j, n, out)) return std::nullopt;
  if (s.task != Task::terrain || out.value > cutoff) return out.value;
  double value = std::max(out.value, segment_component(s, n));
  if (value > cutoff) return value;
  return std::max(value, arc_component(s, n, out.angles));
}

}  // namespace invball
