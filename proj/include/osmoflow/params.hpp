#pragma once

namespace osmoflow {

// Physical parameters of the two-phase Stokes–osmosis model in the reference
// configuration: semipermeable membrane at r = 1, rigid container wall at
// r = R_container.  Phase “+” is the enclosed drop, phase “−” the shell
// between membrane and wall.  All quantities are dimensionless.
struct PhysParams {
  double nu_plus = 1.0;       // fluid viscosity, drop phase
  double nu_minus = 1.0;      // fluid viscosity, shell phase
  double kappa_plus = 1.0;    // solute diffusivity, drop phase
  double kappa_minus = 1.0;   // solute diffusivity, shell phase
  double ctilde_plus = 2.0;   // equilibrium solute concentration, drop phase
  double ctilde_minus = 1.0;  // equilibrium solute concentration, shell phase
  double R_container = 2.0;   // container radius (> 1)
  int dim = 2;                // spatial dimension (the solvers assume 2)

  // curvature scale of the unit sphere; also the equilibrium jump
  // ctilde_plus - ctilde_minus required by the osmotic balance
  double m() const { return dim - 1.0; }
  double alpha_plus() const { return kappa_plus / ctilde_plus; }
  double alpha_minus() const { return kappa_minus / ctilde_minus; }

  void validate() const;  // throws std::invalid_argument

  // Linearization around the spherical equilibrium additionally needs the
  // osmotic balance [[ctilde]] = dim - 1 to hold; throws if it does not.
  void require_equilibrium_balance() const;
};

}  // namespace osmoflow
