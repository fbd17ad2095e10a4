#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "osmoflow/grid.hpp"
#include "osmoflow/params.hpp"

namespace osmoflow {

// State of one angular mode of the linearization around the spherical
// equilibrium: chemical-potential-like profiles mu on each phase plus the
// shape-perturbation amplitude rho.  Profiles live on the operator's uniform
// vertex grids; for k >= 1 the drop profile must vanish at r = 0.
struct ModeState {
  int k = 0;
  Eigen::VectorXcd mu_plus;
  Eigen::VectorXcd mu_minus;
  std::complex<double> rho{0.0, 0.0};
};

// The mode-k generator of the linearized coupled diffusion / shape dynamics,
// discretized by a conservative finite-volume scheme on uniform vertex grids
// (drop phase [0,1], shell phase [1, R_container]).
//
// Interior nodes carry the standard five-point radial Laplacian (identical to
// the finite-volume flux form on this grid); the membrane and wall nodes carry
// half-cell flux balances in which the boundary fluxes are supplied by the
// linearized transmission conditions
//   kappa dn mu = -ctilde ( [[mu]] + (m - k^2) rho )   on both membrane sides,
//   dn mu_minus = 0                                    at the wall,
// and the shape amplitude evolves by
//   rho' = ( [[mu]] + (m - k^2) rho ) + v_k rho,
// v_k being the Stokes normal-velocity response.  Imposing the boundary
// conditions through fluxes (rather than eliminating trace unknowns) makes
// the discrete energy identity exact: the quadratic form below is nonnegative
// in exact arithmetic, not just up to discretization error.
class ModeOperator {
 public:
  int k = 0;
  PhysParams params;
  RadialGrid inner_grid, outer_grid;
  double v_k = 0.0;        // Stokes response entering the rho equation
  Eigen::MatrixXd matrix;  // real generator on the reduced coordinates

  // reduced coordinates drop the Dirichlet origin slot when k >= 1
  int reduced_size() const;
  Eigen::VectorXcd reduce(const ModeState& s) const;
  ModeState extend(const Eigen::VectorXcd& y) const;
  ModeState apply(const ModeState& s) const;  // time derivative

  // Strong-form residuals of the three transmission/wall conditions,
  // evaluated with one-sided second-order stencils.  O(h^2) for smooth
  // states in the domain of the continuum operator; a diagnostic, the
  // flux-form generator does not require them to vanish.
  Eigen::Vector3cd bc_residual(const ModeState& s) const;

  // Adjust the two membrane traces and the wall trace so the strong-form
  // conditions hold exactly; used to build admissible test states.
  ModeState make_admissible(const ModeState& s) const;
};

ModeOperator assemble_mode_operator(const PhysParams& p, int k, int n_inner,
                                    int n_outer, int stokes_n = 48);

// Indefinite pairing the generator is symmetric against:
//   <w,v>_G = ang [ ctilde_minus (w+, v+)_r + ctilde_plus (w-, v-)_r
//                   - ctilde_plus ctilde_minus (m - k^2) rho_w conj(rho_v) ],
// ang = 2 pi (k = 0) or pi (k >= 1); (.,.)_r is the r-weighted L2 pairing.
std::complex<double> g_inner(const ModeOperator& op, const ModeState& w,
                             const ModeState& v);

// The dissipation functional -<(L+K)w, w>_G of the discrete generator.
// Nonnegative real part for every state (exact summation-by-parts structure);
// throws std::invalid_argument when the state is not admissible at tolerance
// `bc_tol` (relative, strong-form residuals).
std::complex<double> quadratic_form(const ModeOperator& op, const ModeState& s,
                                    double bc_tol = 1e-6);

// Exact kernel of the continuum operator, sampled on the grids:
//   k = 0:  (m, 0, -1) and (0, m, +1);   k = +-1:  (0, 0, 1).
std::vector<ModeState> null_space_basis(const PhysParams& p, int n_inner,
                                        int n_outer);

// G-oblique projection removing the mode-0 kernel component (the kernel Gram
// matrix in <.,.>_G is invertible).  Identity for |k| >= 2; removes rho for
// |k| = 1.
ModeState remove_kernel_component(const ModeOperator& op, const ModeState& s);

struct SpectrumOptions {
  double spurious_rel = 1e-3;  // two-grid agreement needed to retain an eigenvalue
  double tol_zero = 1e-6;      // |lambda| below this counts as kernel
  int stokes_n = 48;           // resolution for the v_k response solves
};

// Eigenvalues of the mode-k generator at resolutions (n, 2n-1 nodes); the
// returned `retained` list holds fine-grid eigenvalues confirmed by a nearby
// coarse-grid eigenvalue (relative distance <= spurious_rel), which removes
// discretization artifacts.
struct ModeSpectrum {
  int k = 0;
  std::vector<std::complex<double>> fine, coarse;
  std::vector<std::complex<double>> retained;         // fine, filtered
  std::vector<std::complex<double>> retained_coarse;  // coarse, filtered
};
ModeSpectrum eigen_spectrum(const PhysParams& p, int k, int n,
                            const SpectrumOptions& opt = {});

// Aggregated spectrum over modes |k| <= k_max (negative modes mirror positive
// ones).  `gap` is -max Re over retained non-kernel eigenvalues;
// `refinement_delta` compares the gap computed from the fine and coarse
// filtered lists, measuring resolution independence.
struct SpectrumReport {
  int k_max = 0;
  int n = 0;
  double tol_zero = 1e-6;
  double spurious_rel = 1e-3;
  int kernel_dimension = 0;
  double gap = 0.0;
  double max_imag = 0.0;
  double refinement_delta = 0.0;
  std::map<int, std::vector<std::complex<double>>> modes;  // k >= 0 -> retained
  std::map<int, int> kernel_by_mode;                       // k >= 0 -> kernel count
  double elapsed_seconds = 0.0;  // informational; not serialized to outputs
};
SpectrumReport spectrum_report(const PhysParams& p, int k_max, int n,
                               const SpectrumOptions& opt = {});

// Semisimplicity probe for the zero eigenvalue: for each kernel eigenvector e
// of the mode-k generator M, the least-squares residual min_x ||Mx - e||/||e||
// is bounded away from zero iff e has no generalized eigenvector (no secular
// growth).  `vacuous` marks modes without kernel.
struct SemisimplicityCheck {
  int k = 0;
  int kernel_count = 0;
  double min_residual_ratio = 0.0;
  bool vacuous = true;
};
SemisimplicityCheck semisimplicity_check(const PhysParams& p, int k, int n,
                                         const SpectrumOptions& opt = {});
// Low-level variant on a prebuilt generator matrix (also used to exercise the
// vacuous path on shifted operators).
SemisimplicityCheck semisimplicity_check_matrix(const Eigen::MatrixXd& M,
                                                double tol_zero);

}  // namespace osmoflow
