#pragma once

#include <Eigen/Dense>

namespace osmoflow::cheb {

// Chebyshev–Gauss–Lobatto machinery on [-1, 1].  Nodes are stored in the
// classical descending order x_j = cos(pi j / M), j = 0..M.

// x_j = cos(pi j / M), length M+1.
Eigen::VectorXd cgl_nodes(int M);

// Dense spectral differentiation matrix on the CGL nodes (negative-sum-trick
// diagonal, so constants are annihilated to the last bit).
Eigen::MatrixXd cgl_diff(const Eigen::VectorXd& x);

// Weights w with sum_j w_j f(x_j) == integral_{-1}^{1} f for every polynomial
// of degree <= M (Clenshaw–Curtis via exact Chebyshev-coefficient integrals).
Eigen::VectorXd weights_full(int M);

// Weights for the half interval: sum_j w_j f(x_j) == integral_0^1 f for every
// polynomial of degree <= M.  Needed for disk grids, where only the positive
// half of a symmetric grid is stored.
Eigen::VectorXd weights_half(int M);

// Operators for a radial coordinate on a disk of radius `radius`, sampled at
// the n positive nodes of a (2n-1)-point CGL grid (no node at r = 0).  A mode
// profile f extends to the full grid through its parity s = ±1, f(-r)=s f(r);
// the folded matrices/weights act on the stored half and are exact for the
// corresponding parity class.
struct DiskOperators {
  Eigen::VectorXd r;        // ascending, in (0, radius], last node == radius
  Eigen::MatrixXd D1_even;  // d/dr for even profiles
  Eigen::MatrixXd D1_odd;   // d/dr for odd profiles
  Eigen::MatrixXd D2_even;  // d^2/dr^2 for even profiles
  Eigen::MatrixXd D2_odd;
  Eigen::VectorXd w_even;   // integral_0^radius f dr, f even
  Eigen::VectorXd w_odd;    // same, f odd
};

DiskOperators disk_operators(double radius, int n);

// Operators for an annulus [lo, hi] on a mapped n-point CGL grid.
struct AnnulusOperators {
  Eigen::VectorXd r;   // ascending, r[0] == lo, r[n-1] == hi
  Eigen::MatrixXd D1;
  Eigen::MatrixXd D2;
  Eigen::VectorXd w;   // integral_lo^hi f dr, exact for degree <= n-1
};

AnnulusOperators annulus_operators(double lo, double hi, int n);

}  // namespace osmoflow::cheb
