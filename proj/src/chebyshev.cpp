#include "osmoflow/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osmoflow::cheb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd cgl_nodes(int M) {
  if (M < 1) throw std::invalid_argument("cgl_nodes: M must be >= 1");
  VectorXd x(M + 1);
  for (int j = 0; j <= M; ++j) x[j] = std::cos(std::numbers::pi * j / M);
  return x;
}

MatrixXd cgl_diff(const VectorXd& x) {
  const int M = static_cast<int>(x.size()) - 1;
  MatrixXd D = MatrixXd::Zero(M + 1, M + 1);
  auto c = [M](int i) { return (i == 0 || i == M) ? 2.0 : 1.0; };
  for (int i = 0; i <= M; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= M; ++j) {
      if (i == j) continue;
      const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = (c(i) / c(j)) * sgn / (x[i] - x[j]);
      row_sum += D(i, j);
    }
    D(i, i) = -row_sum;  // constants differentiate to exactly zero
  }
  return D;
}

namespace {

// integral of T_k over [-1,1]
double t_full(int k) {
  if (k % 2 == 1) return 0.0;
  return 2.0 / (1.0 - static_cast<double>(k) * k);
}

// T_k(0)
double cheb_at_zero(int k) {
  if (k % 2 == 1) return 0.0;
  return (k / 2) % 2 == 0 ? 1.0 : -1.0;
}

// integral of T_k over [0,1], from the antiderivative
// (T_{k+1}/(k+1) - T_{k-1}/(k-1))/2 valid for k >= 2
double t_half(int k) {
  if (k == 0) return 1.0;
  if (k == 1) return 0.5;
  const double up = (1.0 - cheb_at_zero(k + 1)) / (k + 1);
  const double dn = (1.0 - cheb_at_zero(k - 1)) / (k - 1);
  return 0.5 * (up - dn);
}

// Quadrature weights on the (M+1)-point CGL grid for a target functional
// given by the integrals t_k of the Chebyshev basis: w_j = sum_k t_k C_kj,
// where C maps node values to Chebyshev coefficients.
VectorXd weights_from_moments(int M, double (*t)(int)) {
  VectorXd w = VectorXd::Zero(M + 1);
  auto c = [M](int k) { return (k == 0 || k == M) ? 2.0 : 1.0; };
  for (int j = 0; j <= M; ++j) {
    const double dj = (j == 0 || j == M) ? 0.5 : 1.0;
    double acc = 0.0;
    for (int k = 0; k <= M; ++k) {
      const double Ckj =
          (2.0 / (M * c(k))) * dj * std::cos(std::numbers::pi * j * k / M);
      acc += t(k) * Ckj;
    }
    w[j] = acc;
  }
  return w;
}

}  // namespace

VectorXd weights_full(int M) { return weights_from_moments(M, &t_full); }

VectorXd weights_half(int M) { return weights_from_moments(M, &t_half); }

DiskOperators disk_operators(double radius, int n) {
  if (n < 4) throw std::invalid_argument("disk_operators: need n >= 4");
  if (!(radius > 0)) throw std::invalid_argument("disk_operators: radius must be > 0");
  const int M = 2 * n - 1;  // odd, so no node at the origin
  const VectorXd x = cgl_nodes(M);
  const MatrixXd D = cgl_diff(x);
  const MatrixXd D2 = D * D;
  const VectorXd wh = weights_half(M);

  // Fold onto the positive half: for a profile of parity s, f(x_{M-j}) = s f(x_j).
  auto fold = [&](const MatrixXd& A, double s) {
    MatrixXd F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = A(i, j) + s * A(i, M - j);
    return F;
  };
  VectorXd we(n), wo(n);
  for (int j = 0; j < n; ++j) {
    we[j] = wh[j] + wh[M - j];
    wo[j] = wh[j] - wh[M - j];
  }

  DiskOperators ops;
  ops.D1_even = fold(D, +1.0) / radius;
  ops.D1_odd = fold(D, -1.0) / radius;
  ops.D2_even = fold(D2, +1.0) / (radius * radius);
  ops.D2_odd = fold(D2, -1.0) / (radius * radius);
  ops.w_even = we * radius;
  ops.w_odd = wo * radius;
  ops.r = radius * x.head(n);

  // Store ascending in r: reverse rows/cols of everything.
  ops.r.reverseInPlace();
  ops.w_even.reverseInPlace();
  ops.w_odd.reverseInPlace();
  auto rev = [n](MatrixXd& A) {
    A = A.colwise().reverse().rowwise().reverse().eval();
  };
  rev(ops.D1_even);
  rev(ops.D1_odd);
  rev(ops.D2_even);
  rev(ops.D2_odd);
  return ops;
}

AnnulusOperators annulus_operators(double lo, double hi, int n) {
  if (n < 4) throw std::invalid_argument("annulus_operators: need n >= 4");
  if (!(hi > lo)) throw std::invalid_argument("annulus_operators: need hi > lo");
  const int M = n - 1;
  const VectorXd x = cgl_nodes(M);
  const MatrixXd D = cgl_diff(x);
  const double J = 0.5 * (hi - lo);  // dr/dx

  AnnulusOperators ops;
  ops.r = (lo + hi) / 2.0 + J * x.array();
  ops.D1 = D / J;
  ops.D2 = (D * D) / (J * J);
  ops.w = weights_full(M) * J;

  ops.r.reverseInPlace();
  ops.w.reverseInPlace();
  ops.D1 = ops.D1.colwise().reverse().rowwise().reverse().eval();
  ops.D2 = ops.D2.colwise().reverse().rowwise().reverse().eval();
  return ops;
}

}  // namespace osmoflow::cheb
