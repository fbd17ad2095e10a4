#include "osmoflow/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "osmoflow/chebyshev.hpp"

namespace osmoflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double RadialGrid::spacing() const {
  if (family != GridFamily::Uniform)
    throw std::logic_error("spacing(): grid is not uniform");
  return (hi - lo) / (size() - 1);
}

RadialGrid RadialGrid::uniform(double lo, double hi, int n) {
  RadialGrid g;
  g.family = GridFamily::Uniform;
  g.lo = lo;
  g.hi = hi;
  g.nodes = VectorXd::LinSpaced(n, lo, hi);
  g.validate();
  return g;
}

RadialGrid RadialGrid::chebyshev_annulus(double lo, double hi, int n) {
  RadialGrid g;
  g.family = GridFamily::Chebyshev;
  g.lo = lo;
  g.hi = hi;
  g.nodes = cheb::annulus_operators(lo, hi, n).r;
  g.validate();
  return g;
}

RadialGrid RadialGrid::chebyshev_disk(double radius, int n) {
  RadialGrid g;
  g.family = GridFamily::Chebyshev;
  g.lo = 0.0;
  g.hi = radius;
  g.nodes = cheb::disk_operators(radius, n).r;
  g.validate();
  return g;
}

void RadialGrid::validate() const {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw std::invalid_argument("RadialGrid: need 0 <= lo < hi finite");
  if (size() < 4) throw std::invalid_argument("RadialGrid: need at least 4 nodes");
  for (int i = 1; i < size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
  const bool cheb_disk = family == GridFamily::Chebyshev && lo == 0.0;
  if (!cheb_disk && nodes[0] != lo)
    throw std::invalid_argument("RadialGrid: first node must equal lo");
  if (cheb_disk && !(nodes[0] > 0.0))
    throw std::invalid_argument("RadialGrid: Chebyshev disk grid must not contain r=0");
  if (nodes[size() - 1] != hi)
    throw std::invalid_argument("RadialGrid: last node must equal hi");
}

VectorXd radial_weights(const RadialGrid& g, int parity) {
  g.validate();
  const int n = g.size();
  if (g.family == GridFamily::Uniform) {
    // Vertex-centered finite volumes: node i owns [r_{i-1/2}, r_{i+1/2}]
    // clipped to the span; w_i = (f_r^2 - f_l^2)/2 so that sum w_i = (hi^2-lo^2)/2.
    const double h = g.spacing();
    VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      const double fl = std::max(g.lo, g.nodes[i] - 0.5 * h);
      const double fr = std::min(g.hi, g.nodes[i] + 0.5 * h);
      w[i] = 0.5 * (fr * fr - fl * fl);
    }
    return w;
  }
  if (g.is_disk()) {
    // integrand f(r)·r has parity opposite to f
    auto ops = cheb::disk_operators(g.hi, n);
    const VectorXd& w = (parity == +1) ? ops.w_odd : ops.w_even;
    return w.cwiseProduct(g.nodes);
  }
  auto ops = cheb::annulus_operators(g.lo, g.hi, n);
  return ops.w.cwiseProduct(g.nodes);
}

MatrixXd derivative_matrix(const RadialGrid& g, int parity) {
  g.validate();
  const int n = g.size();
  if (g.family == GridFamily::Uniform) {
    const double h = g.spacing();
    MatrixXd D = MatrixXd::Zero(n, n);
    for (int i = 1; i < n - 1; ++i) {
      D(i, i - 1) = -0.5 / h;
      D(i, i + 1) = 0.5 / h;
    }
    D(0, 0) = -1.5 / h;
    D(0, 1) = 2.0 / h;
    D(0, 2) = -0.5 / h;
    D(n - 1, n - 1) = 1.5 / h;
    D(n - 1, n - 2) = -2.0 / h;
    D(n - 1, n - 3) = 0.5 / h;
    return D;
  }
  if (g.is_disk()) {
    auto ops = cheb::disk_operators(g.hi, n);
    return (parity == +1) ? ops.D1_even : ops.D1_odd;
  }
  return cheb::annulus_operators(g.lo, g.hi, n).D1;
}

}  // namespace osmoflow
