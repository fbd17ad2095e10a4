#include "osmoflow/equilibria.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "osmoflow/grid.hpp"

namespace osmoflow {

namespace {
constexpr double kPi = std::numbers::pi;

// Osmotic balance of a candidate radius: flat concentrations determined by
// the phase masses must satisfy the Young–Laplace/van 't Hoff relation
// c_plus - c_minus + H = 0 with H = -(dim-1)/R.
double balance(double R, double M_plus, double M_minus, double R_C, int dim) {
  const double c_plus = M_plus / (kPi * R * R);
  const double c_minus = M_minus / (kPi * (R_C * R_C - R * R));
  return c_plus - c_minus - (dim - 1.0) / R;
}
}  // namespace

EquilibriumScan find_equilibrium(double M_plus, double M_minus,
                                 double R_container, int dim, int scan_points) {
  if (!(M_plus > 0.0) || !(M_minus > 0.0))
    throw std::invalid_argument("find_equilibrium: phase masses must be positive");
  if (!(R_container > 0.0) || !std::isfinite(R_container))
    throw std::invalid_argument("find_equilibrium: R_container must be positive");
  if (dim != 2) throw std::invalid_argument("find_equilibrium: only dim == 2");
  if (scan_points < 8) throw std::invalid_argument("find_equilibrium: scan too coarse");

  EquilibriumScan out;
  out.scan_R.resize(scan_points);
  out.scan_F.resize(scan_points);
  for (int j = 0; j < scan_points; ++j) {
    out.scan_R[j] = R_container * (j + 1.0) / (scan_points + 1.0);
    out.scan_F[j] = balance(out.scan_R[j], M_plus, M_minus, R_container, dim);
  }

  auto push_root = [&](double R) {
    for (const auto& e : out.roots)
      if (std::abs(e.R_star - R) < 1e-9 * R_container) return;
    Equilibrium eq;
    eq.R_star = R;
    eq.c_plus = M_plus / (kPi * R * R);
    eq.c_minus = M_minus / (kPi * (R_container * R_container - R * R));
    out.roots.push_back(eq);
  };

  for (int j = 0; j + 1 < scan_points; ++j) {
    double a = out.scan_R[j], b = out.scan_R[j + 1];
    double fa = out.scan_F[j], fb = out.scan_F[j + 1];
    if (fa == 0.0) {
      push_root(a);
      continue;
    }
    if (fa * fb >= 0.0) continue;
    for (int it = 0; it < 200 && (b - a) > 1e-15 * R_container; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = balance(mid, M_plus, M_minus, R_container, dim);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (fa * fm < 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    push_root(0.5 * (a + b));
  }
  if (out.scan_F[scan_points - 1] == 0.0) push_root(out.scan_R[scan_points - 1]);
  return out;
}

PhiMatrix phi_matrix(const PhysParams& p) {
  p.require_equilibrium_balance();
  const double m = p.m();
  const double S = 2.0 * kPi;                                       // |unit circle|
  const double area_plus = kPi;                                     // |D_plus|
  const double area_minus = kPi * (p.R_container * p.R_container - 1.0);  // |D_minus|

  PhiMatrix out;
  out.A << S - m * area_plus / p.ctilde_plus, -S,
           S, -S + m * area_minus / p.ctilde_minus;
  out.det = out.A.determinant();
  return out;
}

PhiMatrix phi_matrix_quadrature(const PhysParams& p, int n) {
  p.require_equilibrium_balance();
  const double m = p.m();
  const double S = 2.0 * kPi;

  // Kernel fields at mode 0: e1 = (mu_plus = m, mu_minus = 0, rho = -1),
  // e2 = (0, m, +1).  The conserved pairings
  //   Phi_1(w) = -S rho - (1/ctilde_plus)  int_{D+} mu_plus dx
  //   Phi_2(w) = -S rho + (1/ctilde_minus) int_{D-} mu_minus dx
  // are evaluated here by radial quadrature of the (flat) kernel profiles.
  const auto gi = RadialGrid::chebyshev_disk(1.0, n);
  const auto go = RadialGrid::chebyshev_annulus(1.0, p.R_container, n);
  const Eigen::VectorXd wi = radial_weights(gi);
  const Eigen::VectorXd wo = radial_weights(go);
  const double int_plus = 2.0 * kPi * wi.dot(Eigen::VectorXd::Constant(gi.size(), m));
  const double int_minus = 2.0 * kPi * wo.dot(Eigen::VectorXd::Constant(go.size(), m));

  PhiMatrix out;
  out.A(0, 0) = -S * (-1.0) - int_plus / p.ctilde_plus;
  out.A(0, 1) = -S * (+1.0) - 0.0;
  out.A(1, 0) = -S * (-1.0) + 0.0;
  out.A(1, 1) = -S * (+1.0) + int_minus / p.ctilde_minus;
  out.det = out.A.determinant();
  return out;
}

}  // namespace osmoflow
