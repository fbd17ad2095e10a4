#pragma once

#include <Eigen/Dense>

namespace osmoflow {

enum class GridFamily { Uniform, Chebyshev };

// A 1-D radial grid on [lo, hi] with ascending nodes.
//
// Disk grids (touching the coordinate origin, lo == 0) differ by family:
//   - Uniform: vertex-centered, nodes include r = 0 and r = hi.
//   - Chebyshev: positive half of a symmetric Gauss–Lobatto grid; no node at
//     r = 0 (profiles are closed there by parity instead), last node == hi.
struct RadialGrid {
  GridFamily family = GridFamily::Uniform;
  double lo = 0.0;
  double hi = 1.0;
  Eigen::VectorXd nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  double span() const { return hi - lo; }
  bool is_disk() const { return lo == 0.0; }
  double spacing() const;  // uniform grids only

  static RadialGrid uniform(double lo, double hi, int n);
  static RadialGrid chebyshev_annulus(double lo, double hi, int n);
  static RadialGrid chebyshev_disk(double radius, int n);

  void validate() const;  // throws std::invalid_argument on malformed grids
};

// Weights for the natural radial measure: sum_i w_i f(r_i) ~ integral f(r) r dr
// over the grid span.  `parity` is the parity of f about r = 0 and only
// matters for Chebyshev disk grids (+1 even, -1 odd).
//
// Uniform grids use the vertex-centered finite-volume rule (faces at node
// midpoints); it is the rule under which the conservative evolution scheme
// preserves phase masses to roundoff.  Chebyshev grids integrate the
// polynomial interpolant of f(r)·r exactly.
Eigen::VectorXd radial_weights(const RadialGrid& g, int parity = +1);

// Dense first-derivative operator on the grid nodes.  Uniform grids: central
// second-order differences with one-sided second-order closures at the ends.
// Chebyshev grids: exact spectral differentiation (parity-folded on disks).
Eigen::MatrixXd derivative_matrix(const RadialGrid& g, int parity = +1);

}  // namespace osmoflow
