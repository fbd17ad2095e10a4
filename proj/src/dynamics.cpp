#include "osmoflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osmoflow {

using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;

// Thomas algorithm for a tridiagonal system; diag/upper/lower are modified.
void solve_tridiagonal(VectorXd& lower, VectorXd& diag, VectorXd& upper,
                       VectorXd& rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Cell volumes (without the 2*pi angular factor) of the vertex-centered
// partition of [lo, hi] with n uniform nodes: V_i = (rf_i^2 - rf_{i-1}^2)/2,
// faces at midpoints and clipped at the ends.
VectorXd cell_volumes(double lo, double hi, int n) {
  const double dr = (hi - lo) / (n - 1);
  VectorXd v(n);
  double left = lo;
  for (int i = 0; i < n; ++i) {
    const double right = (i == n - 1) ? hi : lo + (i + 0.5) * dr;
    v[i] = 0.5 * (right * right - left * left);
    left = right;
  }
  return v;
}

struct PhaseWork {
  VectorXd lower, diag, upper, rhs;
  void resize(int n) {
    lower.resize(n);
    diag.resize(n);
    upper.resize(n);
    rhs.resize(n);
  }
};

// One implicit-diffusion solve for a single phase on the new geometry.
//   V_new c_new - dt * div(kappa r c_r)_new = rhs
// Interior faces only; boundary faces carry zero total flux.
void implicit_phase_solve(PhaseWork& w, VectorXd& c, const VectorXd& v_new,
                          double lo_new, double hi_new, double kappa, double dt) {
  const int n = static_cast<int>(c.size());
  const double dr = (hi_new - lo_new) / (n - 1);
  w.resize(n);
  w.lower.setZero();
  w.upper.setZero();
  w.diag = v_new;
  for (int f = 0; f < n - 1; ++f) {  // face between cells f and f+1
    const double rf = lo_new + (f + 0.5) * dr;
    const double d = dt * kappa * rf / dr;
    w.diag[f] += d;
    w.upper[f] -= d;
    w.diag[f + 1] += d;
    w.lower[f + 1] -= d;
  }
  solve_tridiagonal(w.lower, w.diag, w.upper, c);
}
}  // namespace

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Completed: return "completed";
    case SimStatus::AbortedPositivity: return "aborted_positivity";
    case SimStatus::AbortedGeometry: return "aborted_geometry";
    case SimStatus::AbortedCFL: return "aborted_cfl";
    case SimStatus::AbortedMaxSteps: return "aborted_max_steps";
  }
  return "unknown";
}

Trajectory simulate_radial(const RadialState& initial, const PhysParams& p,
                           const StepperConfig& cfg) {
  initial.validate();
  p.validate();
  const double R_C = p.R_container;
  if (std::abs(initial.R_container() - R_C) > 1e-12 * R_C)
    throw std::invalid_argument(
        "simulate_radial: params.R_container does not match the state's outer grid");
  if (initial.c.inner_grid.family != GridFamily::Uniform ||
      initial.c.outer_grid.family != GridFamily::Uniform)
    throw std::invalid_argument("simulate_radial: requires uniform radial grids");
  if (cfg.t_end <= 0.0) throw std::invalid_argument("simulate_radial: t_end must be > 0");

  const int N = initial.c.inner_grid.size();
  const int M = initial.c.outer_grid.size();
  double R = initial.R;
  double t = initial.t;
  VectorXd cp = initial.c.inner_values;
  VectorXd cm = initial.c.outer_values;

  const double margin = cfg.geometry_margin_rel * R_C;
  const double spacing0 = std::min(R / (N - 1), (R_C - R) / (M - 1));
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.1 * spacing0;

  Trajectory traj;
  traj.dt = dt;

  auto make_state = [&](double tR, double tt, const VectorXd& a, const VectorXd& b) {
    RadialState s;
    s.R = tR;
    s.t = tt;
    s.c.inner_grid = RadialGrid::uniform(0.0, tR, N);
    s.c.outer_grid = RadialGrid::uniform(tR, R_C, M);
    s.c.inner_values = a;
    s.c.outer_values = b;
    return s;
  };
  auto record = [&](double Rdot) {
    const RadialState s = make_state(R, t, cp, cm);
    const auto mass = phase_mass(s);
    TrajectorySample smp;
    smp.t = t;
    smp.R = R;
    smp.Rdot = Rdot;
    smp.mass_plus = mass.first;
    smp.mass_minus = mass.second;
    smp.energy = energy(s);
    smp.dissipation = dissipation(s, p);
    traj.samples.push_back(smp);
  };
  auto finish = [&](SimStatus st, std::string msg, double Rdot) {
    traj.status = st;
    traj.message = std::move(msg);
    record(Rdot);
    traj.final_state = make_state(R, t, cp, cm);
    return traj;
  };

  record((cp[N - 1] - cm[0]) - 1.0 / R);

  PhaseWork work;
  const long total_steps = static_cast<long>(std::ceil((cfg.t_end - t) / dt - 1e-12));
  for (long step = 0; step < total_steps; ++step) {
    if (step >= cfg.max_steps)
      return finish(SimStatus::AbortedMaxSteps,
                    "max_steps reached at t = " + std::to_string(t), 0.0);

    // interface law (u = 0 in radial symmetry): R' = [[c]] + H
    const double Rdot = (cp[N - 1] - cm[0]) - 1.0 / R;
    const double R_new = R + dt * Rdot;
    if (!(R_new > margin && R_new < R_C - margin))
      return finish(SimStatus::AbortedGeometry,
                    "membrane radius " + std::to_string(R_new) +
                        " left the admissible interval at t = " + std::to_string(t),
                    Rdot);

    const double h_old = R / (N - 1), h_new = R_new / (N - 1);
    const double L_old = R_C - R, L_new = R_C - R_new;
    const double H_old = L_old / (M - 1), H_new = L_new / (M - 1);
    // explicit mesh-motion fluxes: face speed is xi_f R' (inner), (1-eta_f) R'
    // (outer); CFL guard on the smaller of old/new spacings
    const double cfl = std::abs(Rdot) * dt /
                       std::min({h_old, h_new, H_old, H_new});
    if (cfl > cfg.cfl_limit)
      return finish(SimStatus::AbortedCFL,
                    "mesh-motion CFL " + std::to_string(cfl) + " exceeds limit at t = " +
                        std::to_string(t),
                    Rdot);

    // inner phase: rhs = V_old c + dt * (G_{i+1/2} - G_{i-1/2}),
    // G_f = r_f c_f w_f with central c_f (boundary faces: zero total flux)
    {
      VectorXd rhs = cell_volumes(0.0, R, N).cwiseProduct(cp);
      for (int f = 0; f < N - 1; ++f) {
        const double xi_f = (f + 0.5) / (N - 1);
        const double G = (xi_f * R) * 0.5 * (cp[f] + cp[f + 1]) * (xi_f * Rdot);
        rhs[f] += dt * G;
        rhs[f + 1] -= dt * G;
      }
      cp = rhs;
      implicit_phase_solve(work, cp, cell_volumes(0.0, R_new, N), 0.0, R_new,
                           p.kappa_plus, dt);
    }
    // outer phase
    {
      VectorXd rhs = cell_volumes(R, R_C, M).cwiseProduct(cm);
      for (int f = 0; f < M - 1; ++f) {
        const double eta_f = (f + 0.5) / (M - 1);
        const double r_f = R + eta_f * L_old;
        const double G = r_f * 0.5 * (cm[f] + cm[f + 1]) * ((1.0 - eta_f) * Rdot);
        rhs[f] += dt * G;
        rhs[f + 1] -= dt * G;
      }
      cm = rhs;
      implicit_phase_solve(work, cm, cell_volumes(R_new, R_C, M), R_new, R_C,
                           p.kappa_minus, dt);
    }

    R = R_new;
    t += dt;
    const double cmin = std::min(cp.minCoeff(), cm.minCoeff());
    if (cmin < cfg.positivity_floor)
      return finish(SimStatus::AbortedPositivity,
                    "concentration " + std::to_string(cmin) +
                        " fell below the positivity floor at t = " + std::to_string(t),
                    Rdot);

    traj.steps = step + 1;
    const bool last = (step == total_steps - 1);
    if (!last && cfg.sample_every > 0 && (step + 1) % cfg.sample_every == 0)
      record((cp[N - 1] - cm[0]) - 1.0 / R);
  }
  return finish(SimStatus::Completed, "", (cp[N - 1] - cm[0]) - 1.0 / R);
}

ModeEvolution linear_mode_evolve(const ModeOperator& op, const ModeState& initial,
                                 double dt, double t_end, int sample_every,
                                 bool project_out_kernel) {
  if (dt <= 0.0 || t_end <= 0.0)
    throw std::invalid_argument("linear_mode_evolve: dt and t_end must be > 0");
  if (sample_every < 1) sample_every = 1;

  ModeState state = initial;
  if (project_out_kernel) state = remove_kernel_component(op, state);

  VectorXcd y = op.reduce(state);
  const int S = op.reduced_size();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) - dt * op.matrix;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

  ModeEvolution ev;
  ev.k = op.k;
  ev.dt = dt;
  ev.times.push_back(0.0);
  ev.norms.push_back(y.norm());

  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  for (long s = 0; s < steps; ++s) {
    const VectorXd yr = lu.solve(y.real().eval());
    const VectorXd yi = lu.solve(y.imag().eval());
    y.real() = yr;
    y.imag() = yi;
    if ((s + 1) % sample_every == 0 || s == steps - 1) {
      ev.times.push_back((s + 1) * dt);
      ev.norms.push_back(y.norm());
    }
  }
  ev.final_state = op.extend(y);
  return ev;
}

namespace {
RateFit fit_loglinear(const std::vector<double>& ts, const std::vector<double>& ys) {
  RateFit fit;
  fit.n_points = static_cast<int>(ts.size());
  if (fit.n_points < 3) return fit;  // not enough data; rate stays 0

  const int n = fit.n_points;
  double st = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    st += ts[i];
    sy += ys[i];
  }
  const double tbar = st / n, ybar = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (ts[i] - tbar) * (ts[i] - tbar);
    sxy += (ts[i] - tbar) * (ys[i] - ybar);
  }
  fit.rate = sxy / sxx;
  fit.intercept = ybar - fit.rate * tbar;
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.rate * ts[i]);
    ss_res += r * r;
  }
  if (n > 2) fit.stderr_ = std::sqrt(ss_res / (n - 2) / sxx);
  return fit;
}
}  // namespace

RateFit decay_rate_fit(const std::vector<double>& times,
                       const std::vector<double>& norms, double norm_min,
                       double norm_max) {
  if (times.size() != norms.size())
    throw std::invalid_argument("decay_rate_fit: times/norms size mismatch");
  std::vector<double> ts, ys;
  for (size_t i = 0; i < times.size(); ++i) {
    if (norms[i] > norm_min && norms[i] < norm_max) {
      ts.push_back(times[i]);
      ys.push_back(std::log(norms[i]));
    }
  }
  return fit_loglinear(ts, ys);
}

RateFit decay_rate_fit(const std::vector<double>& times,
                       const std::vector<double>& norms, double tail_fraction) {
  if (times.size() != norms.size())
    throw std::invalid_argument("decay_rate_fit: times/norms size mismatch");
  if (tail_fraction <= 0.0 || tail_fraction > 1.0)
    throw std::invalid_argument("decay_rate_fit: tail_fraction must be in (0, 1]");
  const size_t n = times.size();
  const size_t take = std::max<size_t>(1, static_cast<size_t>(
                                              std::ceil(tail_fraction * n)));
  std::vector<double> ts, ys;
  for (size_t i = n - take; i < n; ++i) {
    if (!(norms[i] > 0.0))
      throw std::domain_error("decay_rate_fit: nonpositive norm in the tail");
    ts.push_back(times[i]);
    ys.push_back(std::log(norms[i]));
  }
  return fit_loglinear(ts, ys);
}

}  // namespace osmoflow
