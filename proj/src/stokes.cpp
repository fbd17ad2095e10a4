#include "osmoflow/stokes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "osmoflow/chebyshev.hpp"

namespace osmoflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXcd;

namespace {

constexpr double kPi = std::numbers::pi;

// Column layout of the mode-k collocation system:
//   [ a+ (n) | b+ (n) | q+ (n) | a- (m) | b- (m) | q- (m) | (lambda at k=0) ]
// a = u_r profile, b = u_th profile, q = pressure profile.
struct Layout {
  int n = 0, m = 0;
  int ia(int i) const { return i; }
  int ib(int i) const { return n + i; }
  int iq(int i) const { return 2 * n + i; }
  int ja(int i) const { return 3 * n + i; }
  int jb(int i) const { return 3 * n + m + i; }
  int jq(int i) const { return 3 * n + 2 * m + i; }
};

struct RealSolveResult {
  VectorXd x_re, x_im;
  double residual = 0.0;
};

// Assemble and solve the collocation system for nonnegative k with real or
// complex traction data.  Rows: momentum at interior nodes (both components),
// continuity at every node, velocity/traction jumps at the membrane, no-slip
// at the wall; at k = 0 a bordered Lagrange multiplier pins the shell
// pressure to zero area mean.
RealSolveResult solve_collocation(int k, const PhysParams& p, int n, int m,
                                  std::complex<double> h_n,
                                  std::complex<double> h_t,
                                  const ModeStokesData* data,
                                  const cheb::DiskOperators& in,
                                  const cheb::AnnulusOperators& out) {
  const Layout L{n, m};
  const bool border = (k == 0);
  const int N = 3 * n + 3 * m + (border ? 1 : 0);

  // parity of the velocity profiles about r = 0 is (-1)^(k+1); pressure (-1)^k
  const bool k_even = (k % 2 == 0);
  const MatrixXd& D1v = k_even ? in.D1_odd : in.D1_even;
  const MatrixXd& D2v = k_even ? in.D2_odd : in.D2_even;
  const MatrixXd& D1p = k_even ? in.D1_even : in.D1_odd;

  MatrixXd A = MatrixXd::Zero(N, N);
  VectorXd b_re = VectorXd::Zero(N), b_im = VectorXd::Zero(N);
  int row = 0;

  const double nu_p = p.nu_plus, nu_m = p.nu_minus;
  const double kk1 = k * k + 1.0;

  // drop phase: radial momentum  -nu (a'' + a'/r - (k^2+1) a/r^2 - 2k b/r^2) + q' = f_r
  for (int i = 0; i < n - 1; ++i, ++row) {
    const double r = in.r[i];
    for (int j = 0; j < n; ++j) {
      A(row, L.ia(j)) += -nu_p * (D2v(i, j) + D1v(i, j) / r);
      A(row, L.iq(j)) += D1p(i, j);
    }
    A(row, L.ia(i)) += nu_p * kk1 / (r * r);
    A(row, L.ib(i)) += nu_p * 2.0 * k / (r * r);
    if (data) b_re[row] = data->f_r_plus(r);
  }
  // drop phase: angular momentum  -nu (b'' + b'/r - (k^2+1) b/r^2 - 2k a/r^2) - k q/r = f_t
  for (int i = 0; i < n - 1; ++i, ++row) {
    const double r = in.r[i];
    for (int j = 0; j < n; ++j)
      A(row, L.ib(j)) += -nu_p * (D2v(i, j) + D1v(i, j) / r);
    A(row, L.ib(i)) += nu_p * kk1 / (r * r);
    A(row, L.ia(i)) += nu_p * 2.0 * k / (r * r);
    A(row, L.iq(i)) += -static_cast<double>(k) / r;
    if (data) b_re[row] = data->f_t_plus(r);
  }
  // drop phase: continuity  a' + a/r + k b/r = -g  (all nodes)
  for (int i = 0; i < n; ++i, ++row) {
    const double r = in.r[i];
    for (int j = 0; j < n; ++j) A(row, L.ia(j)) += D1v(i, j);
    A(row, L.ia(i)) += 1.0 / r;
    A(row, L.ib(i)) += static_cast<double>(k) / r;
    if (border) A(row, 3 * n + 3 * m) = 1.0;
    if (data) b_re[row] = -data->g_plus(r);
  }
  // shell phase: radial momentum (interior nodes)
  for (int i = 1; i < m - 1; ++i, ++row) {
    const double r = out.r[i];
    for (int j = 0; j < m; ++j) {
      A(row, L.ja(j)) += -nu_m * (out.D2(i, j) + out.D1(i, j) / r);
      A(row, L.jq(j)) += out.D1(i, j);
    }
    A(row, L.ja(i)) += nu_m * kk1 / (r * r);
    A(row, L.jb(i)) += nu_m * 2.0 * k / (r * r);
    if (data) b_re[row] = data->f_r_minus(r);
  }
  // shell phase: angular momentum (interior nodes)
  for (int i = 1; i < m - 1; ++i, ++row) {
    const double r = out.r[i];
    for (int j = 0; j < m; ++j)
      A(row, L.jb(j)) += -nu_m * (out.D2(i, j) + out.D1(i, j) / r);
    A(row, L.jb(i)) += nu_m * kk1 / (r * r);
    A(row, L.ja(i)) += nu_m * 2.0 * k / (r * r);
    A(row, L.jq(i)) += -static_cast<double>(k) / r;
    if (data) b_re[row] = data->f_t_minus(r);
  }
  // shell phase: continuity (all nodes)
  for (int i = 0; i < m; ++i, ++row) {
    const double r = out.r[i];
    for (int j = 0; j < m; ++j) A(row, L.ja(j)) += out.D1(i, j);
    A(row, L.ja(i)) += 1.0 / r;
    A(row, L.jb(i)) += static_cast<double>(k) / r;
    if (border) A(row, 3 * n + 3 * m) = 1.0;
    if (data) b_re[row] = -data->g_minus(r);
  }

  // membrane: velocity jumps [[u_r]] = l_r, [[u_th]] = l_t
  A(row, L.ia(n - 1)) = 1.0;
  A(row, L.ja(0)) = -1.0;
  if (data) b_re[row] = data->l_r;
  ++row;
  A(row, L.ib(n - 1)) = 1.0;
  A(row, L.jb(0)) = -1.0;
  if (data) b_re[row] = data->l_t;
  ++row;

  // membrane: normal traction jump [[2 nu a' - q]] = h_n
  for (int j = 0; j < n; ++j) A(row, L.ia(j)) += 2.0 * nu_p * D1v(n - 1, j);
  A(row, L.iq(n - 1)) += -1.0;
  for (int j = 0; j < m; ++j) A(row, L.ja(j)) += -2.0 * nu_m * out.D1(0, j);
  A(row, L.jq(0)) += 1.0;
  b_re[row] = h_n.real();
  b_im[row] = h_n.imag();
  ++row;

  // membrane: tangential traction jump [[nu (b' - b/r - k a/r)]] = h_t (r = 1)
  for (int j = 0; j < n; ++j) A(row, L.ib(j)) += nu_p * D1v(n - 1, j);
  A(row, L.ib(n - 1)) += -nu_p;
  A(row, L.ia(n - 1)) += -nu_p * k;
  for (int j = 0; j < m; ++j) A(row, L.jb(j)) += -nu_m * out.D1(0, j);
  A(row, L.jb(0)) += nu_m;
  A(row, L.ja(0)) += nu_m * k;
  b_re[row] = h_t.real();
  b_im[row] = h_t.imag();
  ++row;

  // wall: no slip
  A(row, L.ja(m - 1)) = 1.0;
  ++row;
  A(row, L.jb(m - 1)) = 1.0;
  ++row;

  if (border) {
    // gauge: shell pressure has zero area mean, sum w_i r_i q_i = 0
    for (int j = 0; j < m; ++j) A(row, L.jq(j)) = out.w[j] * out.r[j];
    ++row;
  }
  if (row != N) throw std::logic_error("stokes assembly: row count mismatch");

  // Row equilibration keeps the spread between O(n^4) differentiation rows
  // and O(1) jump rows out of the factorization.
  VectorXd scale(N);
  for (int i = 0; i < N; ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    scale[i] = (s > 0.0) ? 1.0 / s : 1.0;
  }
  const MatrixXd As = scale.asDiagonal() * A;
  Eigen::PartialPivLU<MatrixXd> lu(As);

  auto solve_one = [&](const VectorXd& rhs) {
    VectorXd x = lu.solve(scale.asDiagonal() * rhs);
    // one step of iterative refinement in working precision
    const VectorXd r = rhs - A * x;
    x += lu.solve(scale.asDiagonal() * r);
    return x;
  };

  RealSolveResult res;
  res.x_re = solve_one(b_re);
  res.x_im = b_im.isZero(0.0) ? VectorXd::Zero(N) : solve_one(b_im);
  const double den = A.cwiseAbs().maxCoeff() * res.x_re.cwiseAbs().maxCoeff() +
                     b_re.cwiseAbs().maxCoeff() + 1e-300;
  res.residual = (b_re - A * res.x_re).cwiseAbs().maxCoeff() / den;
  return res;
}

}  // namespace

ModeFlowSolution solve_stokes_mode(const ModeStokesProblem& prob,
                                   const ModeStokesData* data) {
  prob.params.validate();
  if (prob.n_inner < 8 || prob.n_outer < 8)
    throw std::invalid_argument("solve_stokes_mode: need at least 8 nodes per phase");

  // Negative modes reduce to |k|: with u_th ~ sin(k th), flipping k negates
  // the sin-components, i.e. b and h_t change sign while a, q, h_n are even in k.
  const bool mirrored = prob.k < 0;
  const int k = std::abs(prob.k);
  const std::complex<double> h_t_eff = mirrored ? -prob.h_tangent : prob.h_tangent;
  if (mirrored && data)
    throw std::invalid_argument(
        "solve_stokes_mode: manufactured data requires k >= 0 (mirror it externally)");

  const int n = prob.n_inner, m = prob.n_outer;
  const auto in = cheb::disk_operators(1.0, n);
  const auto out = cheb::annulus_operators(1.0, prob.params.R_container, m);
  const auto sol =
      solve_collocation(k, prob.params, n, m, prob.h_normal, h_t_eff, data, in, out);

  const Layout L{n, m};
  ModeFlowSolution fs;
  fs.k = prob.k;
  fs.inner_grid = RadialGrid::chebyshev_disk(1.0, n);
  fs.outer_grid = RadialGrid::chebyshev_annulus(1.0, prob.params.R_container, m);
  auto take = [&](int off, int count) {
    VectorXcd v(count);
    for (int i = 0; i < count; ++i)
      v[i] = std::complex<double>(sol.x_re[off + i], sol.x_im[off + i]);
    return v;
  };
  fs.ur_plus = take(L.ia(0), n);
  fs.utheta_plus = take(L.ib(0), n);
  fs.p_plus = take(L.iq(0), n);
  fs.ur_minus = take(L.ja(0), m);
  fs.utheta_minus = take(L.jb(0), m);
  fs.p_minus = take(L.jq(0), m);
  if (mirrored) {
    fs.utheta_plus = -fs.utheta_plus;
    fs.utheta_minus = -fs.utheta_minus;
  }
  fs.v_interface = fs.ur_plus[n - 1];
  fs.pressure_jump = fs.p_plus[n - 1] - fs.p_minus[0];
  fs.solver_residual = sol.residual;
  return fs;
}

double normal_velocity_response(int k, const PhysParams& p, int n) {
  ModeStokesProblem prob;
  prob.k = std::abs(k);
  prob.params = p;
  prob.n_inner = prob.n_outer = n;
  prob.h_normal = {p.m() - static_cast<double>(k) * k, 0.0};
  prob.h_tangent = {0.0, 0.0};
  const auto sol = solve_stokes_mode(prob);
  return sol.v_interface.real();
}

EnergyIdentity stokes_energy_identity(int k, const PhysParams& p, int n) {
  k = std::abs(k);
  ModeStokesProblem prob;
  prob.k = k;
  prob.params = p;
  prob.n_inner = prob.n_outer = n;
  prob.h_normal = {p.m() - static_cast<double>(k) * k, 0.0};
  const auto sol = solve_stokes_mode(prob);

  const double ang = (k == 0) ? 2.0 * kPi : kPi;

  // strain-rate density of a mode flow (cos/sin convention):
  //   |eps|^2 = [4 a'^2 + 4 ((a + k b)/r)^2] cos^2 + 2 (b' - b/r - k a/r)^2 sin^2,
  // each angular factor integrating to `ang`.
  auto phase_strain = [&](const VectorXd& a, const VectorXd& b,
                          const Eigen::VectorXd& r, const MatrixXd& D1,
                          const VectorXd& w, double nu) {
    const VectorXd da = D1 * a;
    const VectorXd db = D1 * b;
    double acc = 0.0;
    for (int i = 0; i < r.size(); ++i) {
      const double hoop = (a[i] + k * b[i]) / r[i];
      const double shear = db[i] - b[i] / r[i] - k * a[i] / r[i];
      acc += w[i] * (4.0 * da[i] * da[i] + 4.0 * hoop * hoop + 2.0 * shear * shear);
    }
    return nu * acc;
  };

  const auto in = cheb::disk_operators(1.0, n);
  const auto out = cheb::annulus_operators(1.0, p.R_container, n);
  const bool k_even = (k % 2 == 0);
  const MatrixXd& D1v = k_even ? in.D1_odd : in.D1_even;
  // integrand is even about r=0, so use the odd weights (extra factor r)
  const VectorXd w_in = (k_even ? in.w_odd : in.w_even).cwiseProduct(in.r);
  const VectorXd w_out = out.w.cwiseProduct(out.r);

  EnergyIdentity id;
  id.surface_side =
      ang * sol.v_interface.real() * (p.m() - static_cast<double>(k) * k);
  id.strain_side =
      0.5 * ang *
      (phase_strain(sol.ur_plus.real(), sol.utheta_plus.real(), in.r, D1v, w_in,
                    p.nu_plus) +
       phase_strain(sol.ur_minus.real(), sol.utheta_minus.real(), out.r, out.D1,
                    w_out, p.nu_minus));
  id.residual = std::abs(id.surface_side - id.strain_side) /
                std::max({1.0, std::abs(id.surface_side), std::abs(id.strain_side)});
  return id;
}

ManufacturedStokes manufactured_stokes(int k, const PhysParams& p, int n) {
  if (k < 0) throw std::invalid_argument("manufactured_stokes: need k >= 0");
  p.validate();
  const double RC = p.R_container;
  const double nu_p = p.nu_plus, nu_m = p.nu_minus;
  const double kd = k;

  // Drop phase: r^(k+1) envelopes give the correct parity/regularity at the
  // origin; the smooth non-polynomial factors keep the spectral solver from
  // being exact at any finite n.
  auto a_p = [kd](double r) { return std::pow(r, kd + 1) * std::exp(-r * r); };
  auto da_p = [kd](double r) {
    return std::exp(-r * r) * ((kd + 1) * std::pow(r, kd) - 2.0 * std::pow(r, kd + 2));
  };
  auto dda_p = [kd](double r) {
    return std::exp(-r * r) * (kd * (kd + 1) * std::pow(r, kd - 1) -
                               (4.0 * kd + 6.0) * std::pow(r, kd + 1) +
                               4.0 * std::pow(r, kd + 3));
  };
  auto b_p = [kd](double r) { return std::pow(r, kd + 1) * std::cos(r * r); };
  auto db_p = [kd](double r) {
    return (kd + 1) * std::pow(r, kd) * std::cos(r * r) -
           2.0 * std::pow(r, kd + 2) * std::sin(r * r);
  };
  auto ddb_p = [kd](double r) {
    return kd * (kd + 1) * std::pow(r, kd - 1) * std::cos(r * r) -
           (4.0 * kd + 6.0) * std::pow(r, kd + 1) * std::sin(r * r) -
           4.0 * std::pow(r, kd + 3) * std::cos(r * r);
  };
  auto q_p = [kd](double r) { return std::pow(r, kd) * (2.0 - r * r); };
  auto dq_p = [kd](double r) {
    return 2.0 * kd * std::pow(r, kd - 1) - (kd + 2.0) * std::pow(r, kd + 1);
  };

  // Shell phase: vanishes at the wall, no parity constraint.
  auto a_m = [RC](double r) { return (RC - r) * std::sin(r); };
  auto da_m = [RC](double r) { return -std::sin(r) + (RC - r) * std::cos(r); };
  auto dda_m = [RC](double r) { return -2.0 * std::cos(r) - (RC - r) * std::sin(r); };
  auto b_m = [RC](double r) { return (RC - r) * std::cos(r); };
  auto db_m = [RC](double r) { return -std::cos(r) - (RC - r) * std::sin(r); };
  auto ddb_m = [RC](double r) { return 2.0 * std::sin(r) - (RC - r) * std::cos(r); };
  auto q_m = [](double r) { return std::cos(2.0 * r); };
  auto dq_m = [](double r) { return -2.0 * std::sin(2.0 * r); };

  ManufacturedStokes ms;
  ms.problem.k = k;
  ms.problem.params = p;
  ms.problem.n_inner = ms.problem.n_outer = n;

  const double kk1 = kd * kd + 1.0;
  ms.data.f_r_plus = [=](double r) {
    return -nu_p * (dda_p(r) + da_p(r) / r - kk1 * a_p(r) / (r * r) -
                    2.0 * kd * b_p(r) / (r * r)) +
           dq_p(r);
  };
  ms.data.f_t_plus = [=](double r) {
    return -nu_p * (ddb_p(r) + db_p(r) / r - kk1 * b_p(r) / (r * r) -
                    2.0 * kd * a_p(r) / (r * r)) -
           kd * q_p(r) / r;
  };
  ms.data.g_plus = [=](double r) { return -(da_p(r) + a_p(r) / r + kd * b_p(r) / r); };
  ms.data.f_r_minus = [=](double r) {
    return -nu_m * (dda_m(r) + da_m(r) / r - kk1 * a_m(r) / (r * r) -
                    2.0 * kd * b_m(r) / (r * r)) +
           dq_m(r);
  };
  ms.data.f_t_minus = [=](double r) {
    return -nu_m * (ddb_m(r) + db_m(r) / r - kk1 * b_m(r) / (r * r) -
                    2.0 * kd * a_m(r) / (r * r)) -
           kd * q_m(r) / r;
  };
  ms.data.g_minus = [=](double r) { return -(da_m(r) + a_m(r) / r + kd * b_m(r) / r); };
  ms.data.l_r = a_p(1.0) - a_m(1.0);
  ms.data.l_t = b_p(1.0) - b_m(1.0);
  ms.problem.h_normal = {(2.0 * nu_p * da_p(1.0) - q_p(1.0)) -
                             (2.0 * nu_m * da_m(1.0) - q_m(1.0)),
                         0.0};
  ms.problem.h_tangent = {nu_p * (db_p(1.0) - b_p(1.0) - kd * a_p(1.0)) -
                              nu_m * (db_m(1.0) - b_m(1.0) - kd * a_m(1.0)),
                          0.0};

  // At k = 0 the solver gauges the shell pressure to zero area mean; shift
  // both exact pressures by the (accurately computed) shell mean of q_m.
  double q_shift = 0.0;
  if (k == 0) {
    const auto quad = cheb::annulus_operators(1.0, RC, 200);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < quad.r.size(); ++i) {
      num += quad.w[i] * quad.r[i] * q_m(quad.r[i]);
      den += quad.w[i] * quad.r[i];
    }
    q_shift = num / den;
  }
  ms.a_plus = a_p;
  ms.b_plus = b_p;
  ms.q_plus = [=](double r) { return q_p(r) - q_shift; };
  ms.a_minus = a_m;
  ms.b_minus = b_m;
  ms.q_minus = [=](double r) { return q_m(r) - q_shift; };
  return ms;
}

double manufactured_stokes_error(const ManufacturedStokes& ms) {
  const auto sol = solve_stokes_mode(ms.problem, &ms.data);
  double err = 0.0;
  auto track = [&err](const VectorXcd& got, const Eigen::VectorXd& r,
                      const std::function<double(double)>& exact) {
    for (int i = 0; i < r.size(); ++i)
      err = std::max(err, std::abs(got[i].real() - exact(r[i])));
  };
  track(sol.ur_plus, sol.inner_grid.nodes, ms.a_plus);
  track(sol.utheta_plus, sol.inner_grid.nodes, ms.b_plus);
  track(sol.p_plus, sol.inner_grid.nodes, ms.q_plus);
  track(sol.ur_minus, sol.outer_grid.nodes, ms.a_minus);
  track(sol.utheta_minus, sol.outer_grid.nodes, ms.b_minus);
  track(sol.p_minus, sol.outer_grid.nodes, ms.q_minus);
  return err;
}

LSReport verify_lopatinskii(double nu_plus, double nu_minus,
                            const Eigen::VectorXd& xi) {
  if (!(nu_plus > 0.0) || !(nu_minus > 0.0))
    throw std::invalid_argument("verify_lopatinskii: viscosities must be positive");
  if (xi.size() == 0)
    throw std::invalid_argument("verify_lopatinskii: need at least one frequency");

  using C = std::complex<double>;
  using Mat2c = Eigen::Matrix2cd;
  const C I(0.0, 1.0);

  // Decaying solutions of the Fourier-transformed flat-interface Stokes
  // system, u(y) = (A + B y) e^(sig w y) etc., with sig = -1 above and +1
  // below the interface.  Per phase the space is two-dimensional:
  //   alpha-basis: A = 1, P = 0          (shear mode)
  //   beta-basis:  v(0) = 0, v'(0) = 1   (pressure mode, P = 2 nu)
  struct Trace {
    C u, du, v, dv, pr;
  };
  auto basis = [&I](double nu, double sig, double xiv, bool beta) {
    const double w = std::abs(xiv);
    C A, P;
    if (!beta) {
      A = 1.0;
      P = 0.0;
    } else {
      A = I / xiv;
      P = 2.0 * nu;
    }
    const C B = I * xiv * P / (2.0 * nu * sig * w);
    const C D = P / (2.0 * nu);
    const C Cc = -(I * xiv * A + D) / (sig * w);
    Trace t;
    t.u = A;
    t.du = B + sig * w * A;
    t.v = Cc;
    t.dv = D + sig * w * Cc;
    t.pr = P;
    return t;
  };

  auto symbol = [&](double xiv) {
    const Trace ap = basis(nu_plus, -1.0, xiv, false);
    const Trace bp = basis(nu_plus, -1.0, xiv, true);
    const Trace am = basis(nu_minus, +1.0, xiv, false);
    const Trace bm = basis(nu_minus, +1.0, xiv, true);

    auto stress_t = [&](const Trace& t, double nu) { return nu * (t.du + I * xiv * t.v); };
    auto stress_n = [&](const Trace& t, double nu) { return 2.0 * nu * t.dv - t.pr; };

    // velocity-continuity block: solve for the alpha coefficients
    Mat2c Va, Vb;
    Va << ap.u, -am.u, ap.v, -am.v;
    Vb << bp.u, -bm.u, bp.v, -bm.v;
    if (std::abs(Va.determinant()) < 1e-12)
      throw std::runtime_error("verify_lopatinskii: velocity block degenerate");
    const Mat2c alpha_of_beta = -Va.partialPivLu().solve(Vb);

    Mat2c Sa, Sb;
    Sa << stress_t(ap, nu_plus), -stress_t(am, nu_minus),
        stress_n(ap, nu_plus), -stress_n(am, nu_minus);
    Sb << stress_t(bp, nu_plus), -stress_t(bm, nu_minus),
        stress_n(bp, nu_plus), -stress_n(bm, nu_minus);

    Mat2c M = Sa * alpha_of_beta + Sb;
    // degree-0 normalization: xi-contract the tangential row (divide by -i|xi|),
    // flip the normal row
    const double w = std::abs(xiv);
    M.row(0) *= I * xiv / w;
    M.row(1) *= -1.0;
    return M;
  };

  LSReport rep;
  rep.xi = xi;
  rep.min_singular_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < xi.size(); ++i) {
    if (xi[i] == 0.0)
      throw std::invalid_argument("verify_lopatinskii: frequencies must be nonzero");
    const Mat2c M = symbol(xi[i]);
    const C det = M.determinant();
    if (i == 0) rep.det_M = det;
    rep.det_spread = std::max(rep.det_spread, std::abs(det - rep.det_M));
    Eigen::JacobiSVD<Mat2c> svd(M);
    rep.min_singular_value =
        std::min(rep.min_singular_value, svd.singularValues().minCoeff());
  }
  return rep;
}

}  // namespace osmoflow
