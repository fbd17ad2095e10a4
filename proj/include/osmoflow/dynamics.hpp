#pragma once

// Time integration: the nonlinear radially symmetric problem (moving
// membrane, two diffusing concentration fields) and linear single-mode
// evolution under the discrete generator of linop.hpp.
//
// The radial scheme is an ALE finite-volume method on front-fixed
// coordinates (inner phase xi = r/R in [0,1], outer phase
// eta = (r-R)/(R_C-R) in [0,1], both on uniform vertex grids).  Diffusive
// fluxes are implicit (tridiagonal solve per phase), mesh-motion fluxes and
// the radius update are explicit.  The membrane and wall faces carry zero
// total solute flux, so per-phase mass is conserved to rounding.  In radial
// symmetry the incompressible Stokes velocity vanishes identically, so the
// interface law reduces to R' = [[c]] + H with H = -1/R.

#include <string>
#include <vector>

#include "osmoflow/field.hpp"
#include "osmoflow/linop.hpp"
#include "osmoflow/params.hpp"

namespace osmoflow {

enum class SimStatus {
  Completed,
  AbortedPositivity,  // a concentration dropped below the positivity floor
  AbortedGeometry,    // membrane radius left (margin, R_C - margin)
  AbortedCFL,         // explicit mesh-motion flux violated its CFL bound
  AbortedMaxSteps,
};

const char* to_string(SimStatus s);

struct StepperConfig {
  double dt = 0.0;       // time step; <= 0 selects 0.1 * (finest spacing)
  double t_end = 1.0;
  int sample_every = 10;  // record one sample per this many steps
  long max_steps = 20000000;
  double positivity_floor = 1e-12;
  double geometry_margin_rel = 1e-3;  // fraction of R_container kept clear
  double cfl_limit = 0.45;
};

struct TrajectorySample {
  double t = 0.0;
  double R = 0.0;
  double Rdot = 0.0;
  double mass_plus = 0.0;
  double mass_minus = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
};

struct Trajectory {
  SimStatus status = SimStatus::Completed;
  std::string message;
  std::vector<TrajectorySample> samples;  // includes the initial and final states
  RadialState final_state;
  long steps = 0;
  double dt = 0.0;  // step size actually used
};

// Integrate the radially symmetric flow from `initial` until t_end (or an
// abort condition).  Aborts never throw: the status and message record what
// happened and the trajectory holds everything computed up to that point.
Trajectory simulate_radial(const RadialState& initial, const PhysParams& p,
                           const StepperConfig& cfg);

// ---------------------------------------------------------------------------
// Linear mode evolution x' = M x by backward Euler with a reused LU factor.

struct ModeEvolution {
  int k = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> norms;  // Euclidean norm of the reduced coordinate vector
  ModeState final_state;
};

// project_out_kernel removes the kernel component of the initial state
// (mode 0 only; see remove_kernel_component).
ModeEvolution linear_mode_evolve(const ModeOperator& op, const ModeState& initial,
                                 double dt, double t_end, int sample_every = 1,
                                 bool project_out_kernel = false);

// ---------------------------------------------------------------------------
// Exponential-rate estimation: least-squares slope of log(norm) against time
// over the samples whose norm lies strictly inside (norm_min, norm_max).

struct RateFit {
  double rate = 0.0;       // fitted d/dt log(norm); negative for decay
  double stderr_ = 0.0;    // standard error of the slope
  double intercept = 0.0;  // fitted log-norm at t = 0
  int n_points = 0;
};

RateFit decay_rate_fit(const std::vector<double>& times,
                       const std::vector<double>& norms, double norm_min,
                       double norm_max);

// Convenience form: fit over the final `tail_fraction` of the samples.
// Throws std::domain_error if the tail contains nonpositive norms.
RateFit decay_rate_fit(const std::vector<double>& times,
                       const std::vector<double>& norms, double tail_fraction);

}  // namespace osmoflow
