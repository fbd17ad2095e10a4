#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "osmoflow/grid.hpp"
#include "osmoflow/params.hpp"

namespace osmoflow {

// Interface Stokes problem for a single angular mode k on the reference
// geometry: membrane at r = 1, rigid wall at r = R_container, one creeping
// fluid per phase, driven by prescribed traction jumps across the membrane.
//
// Real mode convention.  For k >= 1 the fields are
//   u_r = a(r) cos(k th),  u_th = b(r) sin(k th),  p = q(r) cos(k th),
// and for k = 0 they are axisymmetric, u_r = a(r), u_th = b(r) (swirl),
// p = q(r).  The collocation matrix is real; complex traction amplitudes are
// handled by solving the real and imaginary parts against the same factorization.
// A negative k maps to |k| with the sign of the sin-components flipped.
struct ModeStokesProblem {
  int k = 2;
  std::complex<double> h_normal{0.0, 0.0};   // jump of traction·n across the membrane
  std::complex<double> h_tangent{0.0, 0.0};  // jump of traction·e_th across the membrane
  PhysParams params{};
  int n_inner = 48;  // collocation nodes, drop phase
  int n_outer = 48;  // collocation nodes, shell phase
};

// Optional manufactured data: momentum forcing f, mass source g (div u = -g),
// and velocity jumps l at the membrane.  All real-valued profiles of r.
struct ModeStokesData {
  std::function<double(double)> f_r_plus, f_t_plus, g_plus;
  std::function<double(double)> f_r_minus, f_t_minus, g_minus;
  double l_r = 0.0;
  double l_t = 0.0;
};

struct ModeFlowSolution {
  int k = 0;
  RadialGrid inner_grid, outer_grid;
  Eigen::VectorXcd ur_plus, utheta_plus, p_plus;
  Eigen::VectorXcd ur_minus, utheta_minus, p_minus;
  std::complex<double> v_interface{0.0, 0.0};   // u_r amplitude at the membrane
  std::complex<double> pressure_jump{0.0, 0.0}; // p_plus(1) - p_minus(1)
  double solver_residual = 0.0;                 // scaled inf-norm residual of the collocation system
};

// Solve the mode-k interface Stokes problem.  At k = 0 the pressure is only
// determined up to a constant; the solver gauges the shell-phase pressure to
// zero area mean via a bordered Lagrange-multiplier row.
ModeFlowSolution solve_stokes_mode(const ModeStokesProblem& prob,
                                   const ModeStokesData* data = nullptr);

// Normal-velocity response v_k: the u_r amplitude at the membrane produced by
// the curvature-driven normal traction h_n = (dim-1) - k^2 of a unit shape
// perturbation in mode k.  Closed forms give v_0 = v_1 = 0 and the sign law
// v_k ((dim-1) - k^2) >= 0: surface tension never pumps energy into a mode.
double normal_velocity_response(int k, const PhysParams& p, int n = 48);

// Both sides of the per-mode energy identity for the curvature-driven
// response flow,
//   ang * v_k * (m - k^2) = 1/2 int_C nu |eps(u)|^2 dx,
// with eps(u) = grad u + (grad u)^T and ang = 2 pi (k = 0) or pi (k >= 1).
// `residual` is |surface - strain| / max(1, |surface|, |strain|).
struct EnergyIdentity {
  double surface_side = 0.0;
  double strain_side = 0.0;
  double residual = 0.0;
};
EnergyIdentity stokes_energy_identity(int k, const PhysParams& p, int n = 48);

// A manufactured mode-k solution with smooth non-polynomial profiles (so the
// spectral solver shows genuine convergence rather than exactness), together
// with the forcing/jump data that reproduces it.  Exact profiles are provided
// for error measurement; the shell velocity vanishes at the wall as required.
// For k = 0 the manufactured pressure is reported with shell area mean zero,
// matching the solver's gauge.
struct ManufacturedStokes {
  ModeStokesProblem problem;
  ModeStokesData data;
  std::function<double(double)> a_plus, b_plus, q_plus;
  std::function<double(double)> a_minus, b_minus, q_minus;
};
ManufacturedStokes manufactured_stokes(int k, const PhysParams& p, int n);

// Sup-norm error of the computed solution against the manufactured fields.
double manufactured_stokes_error(const ManufacturedStokes& ms);

// Lopatinskii–Shapiro condition for the flat two-phase Stokes interface.
// For each tangential frequency xi != 0 the decaying solutions of the
// Fourier-transformed model problem form a four-dimensional space; velocity
// continuity eliminates two coefficients and the two traction-jump rows leave
// a 2x2 boundary symbol M(xi).  With degree-0 normalization M is independent
// of xi and det M = -2 (nu_plus + nu_minus)^2 != 0: the interface conditions
// are maximally elliptic for every viscosity pair.
struct LSReport {
  Eigen::VectorXd xi;
  double min_singular_value = 0.0;     // min over the sweep
  std::complex<double> det_M{0.0, 0.0};  // value at xi[0] after normalization
  double det_spread = 0.0;             // max |det(xi) - det(xi_0)| over the sweep
};
LSReport verify_lopatinskii(double nu_plus, double nu_minus,
                            const Eigen::VectorXd& xi);

}  // namespace osmoflow
