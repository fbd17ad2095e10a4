#pragma once

#include <Eigen/Dense>
#include <vector>

#include "osmoflow/params.hpp"

namespace osmoflow {

// A spherical equilibrium: flat concentrations c_plus, c_minus on either side
// of a membrane of radius R_star, with osmotic balance
//   c_plus - c_minus = (dim-1)/R_star.
struct Equilibrium {
  double R_star = 1.0;
  double c_plus = 2.0;
  double c_minus = 1.0;
};

// Result of the equilibrium search for given phase masses.  `roots` may hold
// several equilibria (or none); `scan_R`/`scan_F` record the sampled balance
// function so callers can report *why* no root was found.
struct EquilibriumScan {
  std::vector<Equilibrium> roots;
  Eigen::VectorXd scan_R;
  Eigen::VectorXd scan_F;
  bool found() const { return !roots.empty(); }
};

// Solve the osmotic balance
//   F(R) = M_plus/(pi R^2) - M_minus/(pi (R_C^2 - R^2)) - (dim-1)/R = 0
// for R in (0, R_container): sign-change scan on `scan_points` samples
// followed by bisection to ~1e-12 absolute accuracy in R.
EquilibriumScan find_equilibrium(double M_plus, double M_minus,
                                 double R_container, int dim = 2,
                                 int scan_points = 1024);

// The 2x2 matrix of the conserved-quantity pairing restricted to the kernel
// of the linearized evolution operator at the spherical equilibrium.  Its
// invertibility is what rules out secular (Jordan-block) kernel growth.
struct PhiMatrix {
  Eigen::Matrix2d A;
  double det = 0.0;
};

// Closed-form path (areas of the phases entered analytically).
PhiMatrix phi_matrix(const PhysParams& p);

// Independent path: the same pairings evaluated by radial quadrature of the
// kernel fields on n-point grids.  Used to cross-check phi_matrix.
PhiMatrix phi_matrix_quadrature(const PhysParams& p, int n = 64);

}  // namespace osmoflow
