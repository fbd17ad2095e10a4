#include "osmoflow/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osmoflow {

using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;

void require_positive(const VectorXd& v, double floor, const char* which) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(v[i] > floor) || !std::isfinite(v[i]))
      throw std::domain_error(std::string("concentration not strictly positive in ") +
                              which + " phase (value " + std::to_string(v[i]) +
                              " at node " + std::to_string(i) + ")");
  }
}
}  // namespace

void TwoPhaseRadialField::validate() const {
  inner_grid.validate();
  outer_grid.validate();
  if (inner_values.size() != inner_grid.size() ||
      outer_values.size() != outer_grid.size())
    throw std::invalid_argument("TwoPhaseRadialField: value/grid size mismatch");
  if (!inner_grid.is_disk())
    throw std::invalid_argument("TwoPhaseRadialField: inner grid must start at r=0");
  if (inner_grid.hi != outer_grid.lo)
    throw std::invalid_argument("TwoPhaseRadialField: phase grids must meet at the membrane");
}

void RadialState::validate() const {
  c.validate();
  if (!(R > 0.0) || c.inner_grid.hi != R)
    throw std::invalid_argument("RadialState: inner grid must span (0, R)");
  if (!(c.outer_grid.hi > R))
    throw std::invalid_argument("RadialState: container must enclose the membrane");
  if (!std::isfinite(t)) throw std::invalid_argument("RadialState: non-finite time");
}

RadialState make_uniform_state(double R, double R_container, int n_inner,
                               int n_outer,
                               const std::function<double(double)>& c_plus,
                               const std::function<double(double)>& c_minus) {
  RadialState s;
  s.R = R;
  s.t = 0.0;
  s.c.inner_grid = RadialGrid::uniform(0.0, R, n_inner);
  s.c.outer_grid = RadialGrid::uniform(R, R_container, n_outer);
  s.c.inner_values = s.c.inner_grid.nodes.unaryExpr(c_plus);
  s.c.outer_values = s.c.outer_grid.nodes.unaryExpr(c_minus);
  s.validate();
  return s;
}

double mean_curvature(double R, int dim) {
  if (!(R > 0.0)) throw std::invalid_argument("mean_curvature: R must be positive");
  return -(dim - 1.0) / R;
}

std::pair<double, double> phase_mass(const RadialState& s) {
  s.validate();
  const VectorXd wi = radial_weights(s.c.inner_grid);
  const VectorXd wo = radial_weights(s.c.outer_grid);
  return {2.0 * kPi * wi.dot(s.c.inner_values), 2.0 * kPi * wo.dot(s.c.outer_values)};
}

double energy(const RadialState& s, double floor) {
  s.validate();
  require_positive(s.c.inner_values, floor, "inner");
  require_positive(s.c.outer_values, floor, "outer");
  auto clnc = [](double c) { return c * std::log(c); };
  const VectorXd wi = radial_weights(s.c.inner_grid);
  const VectorXd wo = radial_weights(s.c.outer_grid);
  double e = wi.dot(s.c.inner_values.unaryExpr(clnc)) +
             wo.dot(s.c.outer_values.unaryExpr(clnc));
  return 2.0 * kPi * e + 2.0 * kPi * s.R;
}

double dissipation(const RadialState& s, const PhysParams& p, double floor) {
  s.validate();
  p.validate();
  require_positive(s.c.inner_values, floor, "inner");
  require_positive(s.c.outer_values, floor, "outer");

  const VectorXd di = derivative_matrix(s.c.inner_grid) * s.c.inner_values;
  const VectorXd dout = derivative_matrix(s.c.outer_grid) * s.c.outer_values;
  const VectorXd wi = radial_weights(s.c.inner_grid);
  const VectorXd wo = radial_weights(s.c.outer_grid);

  double fisher = 0.0;
  for (int i = 0; i < wi.size(); ++i)
    fisher += p.kappa_plus * wi[i] * di[i] * di[i] / s.c.inner_values[i];
  for (int i = 0; i < wo.size(); ++i)
    fisher += p.kappa_minus * wo[i] * dout[i] * dout[i] / s.c.outer_values[i];

  const double jump = s.c.inner_trace() - s.c.outer_trace();
  const double v = jump + mean_curvature(s.R, p.dim);
  return 2.0 * kPi * fisher + 2.0 * kPi * s.R * v * v;
}

}  // namespace osmoflow
