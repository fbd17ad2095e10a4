#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "osmoflow/grid.hpp"
#include "osmoflow/params.hpp"

namespace osmoflow {

// Piecewise-smooth radially symmetric scalar field: one profile per phase,
// inner grid on [0, R], outer grid on [R, R_container].
struct TwoPhaseRadialField {
  RadialGrid inner_grid;
  RadialGrid outer_grid;
  Eigen::VectorXd inner_values;
  Eigen::VectorXd outer_values;

  void validate() const;
  // trace values at the membrane r = inner_grid.hi (nodal on both families)
  double inner_trace() const { return inner_values[inner_values.size() - 1]; }
  double outer_trace() const { return outer_values[0]; }
};

// Full radially symmetric configuration at one instant: membrane radius R,
// time stamp, and the concentration field.
struct RadialState {
  double R = 1.0;
  double t = 0.0;
  TwoPhaseRadialField c;

  void validate() const;  // grid spans must tile (0, R_container) with the membrane at R
  double R_container() const { return c.outer_grid.hi; }
};

// Convenience constructor: uniform vertex-centered grids, profiles sampled
// from callables of r.
RadialState make_uniform_state(double R, double R_container, int n_inner,
                               int n_outer,
                               const std::function<double(double)>& c_plus,
                               const std::function<double(double)>& c_minus);

// Mean curvature of the sphere of radius R with respect to the inner normal
// convention used throughout: H = -(dim-1)/R.
double mean_curvature(double R, int dim = 2);

// Solute content per phase, (M_plus, M_minus) = 2*pi*integral c r dr.
std::pair<double, double> phase_mass(const RadialState& s);

// Lyapunov functional E = integral_C c ln c dx + |interface|.
// Throws std::domain_error if the concentration is not strictly positive
// (values below `floor` are an error, never clamped).
double energy(const RadialState& s, double floor = 1e-12);

// Dissipation functional
//   D = sument integral kappa |c'|^2 / c dx + |S_R| (jump(c) + H)^2,
// the negative of dE/dt along radially symmetric solutions.
double dissipation(const RadialState& s, const PhysParams& p, double floor = 1e-12);

}  // namespace osmoflow
