#include "osmoflow/linop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "osmoflow/stokes.hpp"

namespace osmoflow {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;

double angular_factor(int k) { return k == 0 ? 2.0 * kPi : kPi; }
}  // namespace

int ModeOperator::reduced_size() const {
  return static_cast<int>(matrix.rows());
}

VectorXcd ModeOperator::reduce(const ModeState& s) const {
  const int N = inner_grid.size(), M = outer_grid.size();
  if (s.k != k || s.mu_plus.size() != N || s.mu_minus.size() != M)
    throw std::invalid_argument("ModeOperator::reduce: state/operator mismatch");
  const int skip = (k == 0) ? 0 : 1;  // Dirichlet origin slot for k >= 1
  VectorXcd y(N - skip + M + 1);
  y.head(N - skip) = s.mu_plus.tail(N - skip);
  y.segment(N - skip, M) = s.mu_minus;
  y[N - skip + M] = s.rho;
  return y;
}

ModeState ModeOperator::extend(const VectorXcd& y) const {
  const int N = inner_grid.size(), M = outer_grid.size();
  const int skip = (k == 0) ? 0 : 1;
  if (y.size() != N - skip + M + 1)
    throw std::invalid_argument("ModeOperator::extend: wrong reduced size");
  ModeState s;
  s.k = k;
  s.mu_plus = VectorXcd::Zero(N);
  s.mu_plus.tail(N - skip) = y.head(N - skip);
  s.mu_minus = y.segment(N - skip, M);
  s.rho = y[N - skip + M];
  return s;
}

ModeState ModeOperator::apply(const ModeState& s) const {
  return extend(matrix * reduce(s));
}

Eigen::Vector3cd ModeOperator::bc_residual(const ModeState& s) const {
  const int N = inner_grid.size(), M = outer_grid.size();
  if (s.k != k || s.mu_plus.size() != N || s.mu_minus.size() != M)
    throw std::invalid_argument("ModeOperator::bc_residual: state/operator mismatch");
  const double h = inner_grid.spacing(), H = outer_grid.spacing();
  const double mk2 = params.m() - static_cast<double>(k) * k;
  const auto& up = s.mu_plus;
  const auto& um = s.mu_minus;
  const std::complex<double> dp =
      (3.0 * up[N - 1] - 4.0 * up[N - 2] + up[N - 3]) / (2.0 * h);
  const std::complex<double> dm = (-3.0 * um[0] + 4.0 * um[1] - um[2]) / (2.0 * H);
  const std::complex<double> dw =
      (3.0 * um[M - 1] - 4.0 * um[M - 2] + um[M - 3]) / (2.0 * H);
  Eigen::Vector3cd r;
  r[0] = params.alpha_plus() * dp + (up[N - 1] - um[0]) + mk2 * s.rho;
  r[1] = params.alpha_plus() * dp - params.alpha_minus() * dm;
  r[2] = dw;
  return r;
}

ModeState ModeOperator::make_admissible(const ModeState& s) const {
  const int N = inner_grid.size(), M = outer_grid.size();
  ModeState out = s;
  const double h = inner_grid.spacing(), H = outer_grid.spacing();
  const double ap = params.alpha_plus(), am = params.alpha_minus();
  const double mk2 = params.m() - static_cast<double>(k) * k;
  if (k != 0) out.mu_plus[0] = 0.0;

  // wall trace from dn mu = 0
  out.mu_minus[M - 1] = (4.0 * out.mu_minus[M - 2] - out.mu_minus[M - 3]) / 3.0;

  // membrane traces from the two transmission conditions
  Eigen::Matrix2d B;
  B << 3.0 * ap / (2.0 * h) + 1.0, -1.0,
       3.0 * ap / (2.0 * h), 3.0 * am / (2.0 * H);
  const std::complex<double> inner_tail =
      ap * (-4.0 * out.mu_plus[N - 2] + out.mu_plus[N - 3]) / (2.0 * h);
  const std::complex<double> outer_tail =
      am * (4.0 * out.mu_minus[1] - out.mu_minus[2]) / (2.0 * H);
  Eigen::Vector2cd rhs;
  rhs[0] = -inner_tail - mk2 * s.rho;
  rhs[1] = -inner_tail + outer_tail;
  const Eigen::Matrix2d Binv = B.inverse();
  Eigen::Vector2cd t;
  t[0] = Binv(0, 0) * rhs[0] + Binv(0, 1) * rhs[1];
  t[1] = Binv(1, 0) * rhs[0] + Binv(1, 1) * rhs[1];
  out.mu_plus[N - 1] = t[0];
  out.mu_minus[0] = t[1];
  return out;
}

ModeOperator assemble_mode_operator(const PhysParams& p, int k, int n_inner,
                                    int n_outer, int stokes_n) {
  p.require_equilibrium_balance();
  k = std::abs(k);
  if (n_inner < 6 || n_outer < 6)
    throw std::invalid_argument("assemble_mode_operator: need >= 6 nodes per phase");

  ModeOperator op;
  op.k = k;
  op.params = p;
  op.inner_grid = RadialGrid::uniform(0.0, 1.0, n_inner);
  op.outer_grid = RadialGrid::uniform(1.0, p.R_container, n_outer);
  op.v_k = normal_velocity_response(k, p, stokes_n);

  const int N = n_inner, M = n_outer;
  const double h = op.inner_grid.spacing(), H = op.outer_grid.spacing();
  const double kp = p.kappa_plus, km = p.kappa_minus;
  const double cp = p.ctilde_plus, cm = p.ctilde_minus;
  const double mk2 = p.m() - static_cast<double>(k) * k;
  const VectorXd Vi = radial_weights(op.inner_grid);
  const VectorXd Vo = radial_weights(op.outer_grid);

  const int skip = (k == 0) ? 0 : 1;
  const int S = N - skip + M + 1;
  // reduced index of a full slot (inner i -> i-skip, outer j -> N-skip+j, rho last)
  auto ri = [&](int i) { return i - skip; };
  auto ro = [&](int j) { return N - skip + j; };
  const int rrho = N - skip + M;

  MatrixXd A = MatrixXd::Zero(S, S);

  if (k == 0) {
    // origin half cell: 2-D polar Laplacian closure, identical to the
    // finite-volume balance on [0, h/2]
    A(ri(0), ri(0)) = -4.0 * kp / (h * h);
    A(ri(0), ri(1)) = 4.0 * kp / (h * h);
  }
  // drop interior: kappa ( mu'' + mu'/r - k^2 mu / r^2 )
  for (int i = 1; i < N - 1; ++i) {
    const double r = op.inner_grid.nodes[i];
    const int row = ri(i);
    if (i - 1 >= skip) A(row, ri(i - 1)) += kp * (1.0 / (h * h) - 1.0 / (2.0 * r * h));
    A(row, ri(i)) += kp * (-2.0 / (h * h) - static_cast<double>(k) * k / (r * r));
    A(row, ri(i + 1)) += kp * (1.0 / (h * h) + 1.0 / (2.0 * r * h));
  }
  // membrane half cell, drop side:
  //   V t' = -kp r_f (t - mu_{N-2})/h - kp k^2 (int_cell dr/r) t - cp J,
  // J = [[mu]] + (m - k^2) rho being the common transmission flux; the
  // angular term integrates -k^2 mu / r over the half cell exactly
  {
    const double rf = 1.0 - 0.5 * h;
    const double V = Vi[N - 1];
    const int row = ri(N - 1);
    A(row, ri(N - 2)) += kp * rf / (h * V);
    A(row, ri(N - 1)) += -kp * rf / (h * V) - cp / V;
    A(row, ri(N - 1)) += -kp * k * k * (-std::log1p(-0.5 * h)) / V;
    A(row, ro(0)) += cp / V;
    A(row, rrho) += -cp * mk2 / V;
  }
  // membrane half cell, shell side: V t' = +cm J + km r_f (mu_1 - t)/H - angular
  {
    const double rf = 1.0 + 0.5 * H;
    const double V = Vo[0];
    const int row = ro(0);
    A(row, ri(N - 1)) += cm / V;
    A(row, ro(0)) += -cm / V - km * rf / (H * V);
    A(row, ro(0)) += -km * k * k * std::log1p(0.5 * H) / V;
    A(row, ro(1)) += km * rf / (H * V);
    A(row, rrho) += cm * mk2 / V;
  }
  // shell interior
  for (int j = 1; j < M - 1; ++j) {
    const double r = op.outer_grid.nodes[j];
    const int row = ro(j);
    A(row, ro(j - 1)) += km * (1.0 / (H * H) - 1.0 / (2.0 * r * H));
    A(row, ro(j)) += km * (-2.0 / (H * H) - static_cast<double>(k) * k / (r * r));
    A(row, ro(j + 1)) += km * (1.0 / (H * H) + 1.0 / (2.0 * r * H));
  }
  // wall half cell: zero flux through the wall, angular term kept
  {
    const double rf = p.R_container - 0.5 * H;
    const double V = Vo[M - 1];
    const int row = ro(M - 1);
    A(row, ro(M - 2)) += km * rf / (H * V);
    A(row, ro(M - 1)) += -km * rf / (H * V);
    A(row, ro(M - 1)) +=
        -km * k * k * (-std::log1p(-0.5 * H / p.R_container)) / V;
  }
  // shape amplitude: rho' = J + v_k rho
  A(rrho, ri(N - 1)) += 1.0;
  A(rrho, ro(0)) += -1.0;
  A(rrho, rrho) += mk2 + op.v_k;

  op.matrix = std::move(A);
  return op;
}

std::complex<double> g_inner(const ModeOperator& op, const ModeState& w,
                             const ModeState& v) {
  const int N = op.inner_grid.size(), M = op.outer_grid.size();
  if (w.mu_plus.size() != N || v.mu_plus.size() != N || w.mu_minus.size() != M ||
      v.mu_minus.size() != M)
    throw std::invalid_argument("g_inner: state/operator mismatch");
  const VectorXd wi = radial_weights(op.inner_grid);
  const VectorXd wo = radial_weights(op.outer_grid);
  const double mk2 = op.params.m() - static_cast<double>(op.k) * op.k;

  std::complex<double> plus = 0.0, minus = 0.0;
  for (int i = 0; i < N; ++i) plus += wi[i] * w.mu_plus[i] * std::conj(v.mu_plus[i]);
  for (int j = 0; j < M; ++j) minus += wo[j] * w.mu_minus[j] * std::conj(v.mu_minus[j]);
  const std::complex<double> surf = mk2 * w.rho * std::conj(v.rho);
  return angular_factor(op.k) * (op.params.ctilde_minus * plus +
                                 op.params.ctilde_plus * minus -
                                 op.params.ctilde_plus * op.params.ctilde_minus * surf);
}

std::complex<double> quadratic_form(const ModeOperator& op, const ModeState& s,
                                    double bc_tol) {
  const int N = op.inner_grid.size(), M = op.outer_grid.size();
  const Eigen::Vector3cd r = op.bc_residual(s);
  const double h = op.inner_grid.spacing(), H = op.outer_grid.spacing();
  const double scale =
      (op.params.alpha_plus() / h + op.params.alpha_minus() / H + 1.0) *
          (s.mu_plus.cwiseAbs().maxCoeff() + s.mu_minus.cwiseAbs().maxCoeff() +
           std::abs(s.rho)) +
      1e-300;
  (void)N;
  (void)M;
  if (r.cwiseAbs().maxCoeff() > bc_tol * scale)
    throw std::invalid_argument(
        "quadratic_form: state violates the transmission/wall conditions "
        "(relative residual " +
        std::to_string(r.cwiseAbs().maxCoeff() / scale) + ")");
  const ModeState sdot = op.apply(s);
  return -g_inner(op, sdot, s);
}

std::vector<ModeState> null_space_basis(const PhysParams& p, int n_inner,
                                        int n_outer) {
  p.require_equilibrium_balance();
  const double m = p.m();
  std::vector<ModeState> basis;

  ModeState e1;
  e1.k = 0;
  e1.mu_plus = VectorXcd::Constant(n_inner, m);
  e1.mu_minus = VectorXcd::Zero(n_outer);
  e1.rho = -1.0;
  basis.push_back(e1);

  ModeState e2;
  e2.k = 0;
  e2.mu_plus = VectorXcd::Zero(n_inner);
  e2.mu_minus = VectorXcd::Constant(n_outer, m);
  e2.rho = +1.0;
  basis.push_back(e2);

  for (int k : {+1, -1}) {
    ModeState e;
    e.k = k;
    e.mu_plus = VectorXcd::Zero(n_inner);
    e.mu_minus = VectorXcd::Zero(n_outer);
    e.rho = 1.0;
    basis.push_back(e);
  }
  return basis;
}

ModeState remove_kernel_component(const ModeOperator& op, const ModeState& s) {
  if (std::abs(op.k) >= 2) return s;
  if (op.k != 0)
    throw std::invalid_argument(
        "remove_kernel_component: only mode 0 has a nondegenerate kernel Gram "
        "(at |k| = 1 the kernel vector is G-null)");
  const auto basis = null_space_basis(op.params, op.inner_grid.size(),
                                      op.outer_grid.size());
  const ModeState& e1 = basis[0];
  const ModeState& e2 = basis[1];
  Eigen::Matrix2cd G;
  G << g_inner(op, e1, e1), g_inner(op, e2, e1),
       g_inner(op, e1, e2), g_inner(op, e2, e2);
  Eigen::Vector2cd b;
  b << g_inner(op, s, e1), g_inner(op, s, e2);
  const Eigen::Vector2cd c = G.partialPivLu().solve(b);

  ModeState out = s;
  out.mu_plus -= c[0] * e1.mu_plus + c[1] * e2.mu_plus;
  out.mu_minus -= c[0] * e1.mu_minus + c[1] * e2.mu_minus;
  out.rho -= c[0] * e1.rho + c[1] * e2.rho;
  return out;
}

namespace {
std::vector<std::complex<double>> eigenvalues_of(const MatrixXd& M) {
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen_spectrum: eigensolver failed to converge");
  std::vector<std::complex<double>> out(M.rows());
  for (int i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<std::complex<double>> filter_against(
    const std::vector<std::complex<double>>& keep_from,
    const std::vector<std::complex<double>>& reference, double rel) {
  std::vector<std::complex<double>> out;
  for (const auto& lam : keep_from) {
    for (const auto& mu : reference) {
      if (std::abs(lam - mu) <= rel * std::max(1.0, std::abs(lam))) {
        out.push_back(lam);
        break;
      }
    }
  }
  return out;
}
}  // namespace

ModeSpectrum eigen_spectrum(const PhysParams& p, int k, int n,
                            const SpectrumOptions& opt) {
  k = std::abs(k);
  const int n_fine = 2 * n - 1;  // halves the grid spacing
  ModeSpectrum ms;
  ms.k = k;
  ms.coarse = eigenvalues_of(
      assemble_mode_operator(p, k, n, n, opt.stokes_n).matrix);
  ms.fine = eigenvalues_of(
      assemble_mode_operator(p, k, n_fine, n_fine, opt.stokes_n).matrix);
  ms.retained = filter_against(ms.fine, ms.coarse, opt.spurious_rel);
  ms.retained_coarse = filter_against(ms.coarse, ms.fine, opt.spurious_rel);
  return ms;
}

SpectrumReport spectrum_report(const PhysParams& p, int k_max, int n,
                               const SpectrumOptions& opt) {
  if (k_max < 1) throw std::invalid_argument("spectrum_report: need k_max >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  SpectrumReport rep;
  rep.k_max = k_max;
  rep.n = n;
  rep.tol_zero = opt.tol_zero;
  rep.spurious_rel = opt.spurious_rel;

  double worst_re = -std::numeric_limits<double>::infinity();         // fine gap
  double worst_re_coarse = -std::numeric_limits<double>::infinity();  // coarse gap
  for (int k = 0; k <= k_max; ++k) {
    const ModeSpectrum ms = eigen_spectrum(p, k, n, opt);
    const int mult = (k == 0) ? 1 : 2;  // modes +-k share the spectrum
    int kernel_count = 0;
    for (const auto& lam : ms.retained) {
      if (std::abs(lam) < opt.tol_zero) {
        ++kernel_count;
        rep.max_imag = std::max(rep.max_imag, std::abs(lam.imag()));
        continue;
      }
      worst_re = std::max(worst_re, lam.real());
      rep.max_imag = std::max(rep.max_imag, std::abs(lam.imag()));
    }
    for (const auto& lam : ms.retained_coarse)
      if (std::abs(lam) >= opt.tol_zero)
        worst_re_coarse = std::max(worst_re_coarse, lam.real());
    rep.kernel_dimension += mult * kernel_count;
    rep.kernel_by_mode[k] = kernel_count;
    rep.modes[k] = ms.retained;
  }
  rep.gap = -worst_re;
  const double gap_coarse = -worst_re_coarse;
  rep.refinement_delta = std::abs(rep.gap - gap_coarse) / std::abs(rep.gap);
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SemisimplicityCheck semisimplicity_check_matrix(const MatrixXd& M,
                                                double tol_zero) {
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("semisimplicity_check: eigensolver failed");
  SemisimplicityCheck out;

  // gather the kernel eigenvectors (real parts suffice: kernel eigenvalues of
  // this family are real, but keep imaginary columns if the solver returns any)
  std::vector<VectorXd> cols;
  for (int i = 0; i < M.rows(); ++i) {
    if (std::abs(es.eigenvalues()[i]) >= tol_zero) continue;
    ++out.kernel_count;
    const VectorXcd e = es.eigenvectors().col(i);
    cols.push_back(e.real());
    if (e.imag().norm() > 1e-12 * e.norm()) cols.push_back(e.imag());
  }
  out.vacuous = (out.kernel_count == 0);
  if (out.vacuous) return out;

  MatrixXd K(M.rows(), static_cast<int>(cols.size()));
  for (int j = 0; j < K.cols(); ++j) K.col(j) = cols[j];
  // orthonormal basis of the numerical kernel eigenspace
  const MatrixXd U = Eigen::HouseholderQR<MatrixXd>(K)
                         .householderQ() *
                     MatrixXd::Identity(M.rows(), K.cols());
  // least-squares residual of M x = u, minimized over unit vectors u in the
  // kernel span: sigma_min of (I - P_range) U.  A semisimple zero keeps every
  // kernel direction well away from range(M); a Jordan block sends one to ~0.
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(M);
  const MatrixXd R = U - M * cod.solve(U);
  out.min_residual_ratio =
      Eigen::JacobiSVD<MatrixXd>(R).singularValues().minCoeff();
  return out;
}

SemisimplicityCheck semisimplicity_check(const PhysParams& p, int k, int n,
                                         const SpectrumOptions& opt) {
  const ModeOperator op = assemble_mode_operator(p, std::abs(k), n, n, opt.stokes_n);
  // Run the least-squares test in volume-weighted coordinates (the discrete
  // L^2 geometry of the energy form, with the surface weight made positive).
  // In raw nodal coordinates the angle between kernel and range shrinks like
  // sqrt(h) purely because bulk node counts grow; the weighted angle is a
  // resolution-independent property of the operator.
  const int N = op.inner_grid.size(), M = op.outer_grid.size();
  const VectorXd wi = radial_weights(op.inner_grid);
  const VectorXd wo = radial_weights(op.outer_grid);
  const double mk2 = p.m() - static_cast<double>(op.k) * op.k;
  VectorXd d(op.reduced_size());
  const int skip = (op.k == 0) ? 0 : 1;
  for (int i = skip; i < N; ++i) d[i - skip] = std::sqrt(p.ctilde_minus * wi[i]);
  for (int j = 0; j < M; ++j) d[N - skip + j] = std::sqrt(p.ctilde_plus * wo[j]);
  d[N - skip + M] = std::sqrt(p.ctilde_plus * p.ctilde_minus *
                              std::max(std::abs(mk2), 1.0));
  const MatrixXd scaled =
      d.asDiagonal() * op.matrix * d.cwiseInverse().asDiagonal();
  SemisimplicityCheck out = semisimplicity_check_matrix(scaled, opt.tol_zero);
  out.k = op.k;
  return out;
}

}  // namespace osmoflow
