#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "osmoflow/dynamics.hpp"
#include "osmoflow/equilibria.hpp"
#include "osmoflow/field.hpp"

using namespace osmoflow;

namespace {

const double kPi = 3.14159265358979323846;

std::vector<double> linspace_times(double dt, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = i * dt;
  return t;
}

}  // namespace

TEST_CASE("decay rate fit recovers synthetic exponentials") {
  const auto times = linspace_times(0.05, 200);
  std::vector<double> clean(times.size()), noisy(times.size()), flat(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    clean[i] = std::exp(-0.5 * times[i]);
    noisy[i] = clean[i] * (1.0 + 0.01 * std::sin(times[i]));
    flat[i] = 2.0;
  }

  const RateFit a = decay_rate_fit(times, clean, 0.0, 1e300);
  CHECK(a.rate == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(a.n_points == 200);

  const RateFit b = decay_rate_fit(times, clean, 0.5);  // tail form
  CHECK(b.rate == doctest::Approx(-0.5).epsilon(1e-12));

  const RateFit c = decay_rate_fit(times, noisy, 0.0, 1e300);
  CHECK(c.rate == doctest::Approx(-0.5).epsilon(0.01));

  const RateFit d = decay_rate_fit(times, flat, 0.9);
  CHECK(d.rate == doctest::Approx(0.0));
}

TEST_CASE("decay rate fit input validation") {
  const std::vector<double> t = {0.0, 1.0, 2.0};
  const std::vector<double> n = {1.0, 0.5};
  CHECK_THROWS_AS(decay_rate_fit(t, n, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decay_rate_fit(t, {1.0, 0.5, 0.25}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_rate_fit(t, {1.0, 0.5, 0.25}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(decay_rate_fit(t, {1.0, 0.0, -1.0}, 0.9), std::domain_error);
}

TEST_CASE("spherical equilibrium is a fixed point of the nonlinear stepper") {
  const auto s0 = make_uniform_state(1.0, 2.0, 65, 65,
                                     [](double) { return 2.0; },
                                     [](double) { return 1.0; });
  PhysParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;  // 100 steps
  cfg.sample_every = 10;

  const Trajectory tr = simulate_radial(s0, p, cfg);
  REQUIRE(tr.status == SimStatus::Completed);
  CHECK(std::abs(tr.final_state.R - 1.0) < 1e-10);

  const auto& first = tr.samples.front();
  const auto& last = tr.samples.back();
  CHECK(std::abs(last.mass_plus - first.mass_plus) < 1e-12 * first.mass_plus);
  CHECK(std::abs(last.mass_minus - first.mass_minus) < 1e-12 * first.mass_minus);
  CHECK(std::abs(last.energy - first.energy) < 1e-12 * std::abs(first.energy));
}

TEST_CASE("osmotic imbalance drives the membrane in the expected direction") {
  // c+ = 2.2, c- = 1, R = 1: R' (0) = [[c]] - 1/R = 0.2 > 0
  const auto s0 = make_uniform_state(1.0, 2.0, 129, 129,
                                     [](double) { return 2.2; },
                                     [](double) { return 1.0; });
  PhysParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  cfg.sample_every = 1;

  const Trajectory tr = simulate_radial(s0, p, cfg);
  REQUIRE(tr.status == SimStatus::Completed);
  REQUIRE(tr.samples.size() >= 3);
  CHECK(tr.samples.front().Rdot == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(tr.samples[1].R > tr.samples[0].R);
  CHECK(tr.samples.back().R > tr.samples.front().R);

  // per-phase mass conservation to rounding at every sample
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.mass_plus - 2.2 * kPi) < 1e-11 * 2.2 * kPi);
    CHECK(std::abs(s.mass_minus - 3.0 * kPi) < 1e-11 * 3.0 * kPi);
  }
}

TEST_CASE("energy decreases at the rate given by the dissipation functional") {
  const auto s0 = make_uniform_state(1.0, 2.0, 129, 129,
                                     [](double) { return 2.2; },
                                     [](double) { return 1.0; });
  PhysParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.4;
  cfg.sample_every = 10;

  const Trajectory tr = simulate_radial(s0, p, cfg);
  REQUIRE(tr.status == SimStatus::Completed);
  REQUIRE(tr.samples.size() >= 5);

  // centered difference of E against -D at interior samples: after the
  // initial sqrt(t) diffusion layer (where E has unbounded curvature) and
  // while the decay is still fast enough to compare against
  for (std::size_t i = 1; i + 1 < tr.samples.size() && tr.samples[i].t < 0.3; ++i) {
    if (tr.samples[i].t < 0.05) continue;
    const double dEdt = (tr.samples[i + 1].energy - tr.samples[i - 1].energy) /
                        (tr.samples[i + 1].t - tr.samples[i - 1].t);
    const double D = tr.samples[i].dissipation;
    CHECK(std::abs(dEdt + D) <= 0.02 * D);
  }

  // energy is monotone along the whole run
  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    CHECK(tr.samples[i].energy <= tr.samples[i - 1].energy + 1e-12);
}

TEST_CASE("nonlinear relaxation rate matches the linearized mode-0 rate") {
  // mass-preserving perturbation of the reference equilibrium
  const double eps = 1e-3;
  const auto s0 = make_uniform_state(
      1.0, 2.0, 129, 129,
      [&](double r) { return 2.0 + eps * (r * r - 0.5); },
      [&](double r) { return 1.0 + eps * (r * r - 2.5); });
  PhysParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 7.0;
  cfg.sample_every = 5;

  const Trajectory tr = simulate_radial(s0, p, cfg);
  REQUIRE(tr.status == SimStatus::Completed);

  std::vector<double> times, dist;
  for (const auto& s : tr.samples) {
    times.push_back(s.t);
    dist.push_back(std::abs(s.R - 1.0));
  }
  // window below the overshoot peak so only the relaxation tail is fitted
  const RateFit fit = decay_rate_fit(times, dist, 1e-9, 3e-6);
  REQUIRE(fit.n_points >= 4);

  // slowest nonzero mode-0 eigenvalue of the linearization at the equilibrium
  const ModeSpectrum sp = eigen_spectrum(p, 0, 129);
  double lambda = -1e300;
  for (const auto& z : sp.retained)
    if (std::abs(z) > 1e-6) lambda = std::max(lambda, z.real());
  CHECK(lambda < 0.0);
  CHECK(std::abs(fit.rate - lambda) <= 0.05 * std::abs(lambda));
}

TEST_CASE("kernel states are stationary under linear evolution") {
  PhysParams p;
  const auto op = assemble_mode_operator(p, 0, 65, 65);
  const auto basis = null_space_basis(p, 65, 65);

  const ModeEvolution ev = linear_mode_evolve(op, basis[0], 1e-2, 1.0, 10);
  REQUIRE(!ev.norms.empty());
  const double n0 = ev.norms.front();
  for (double n : ev.norms) CHECK(std::abs(n - n0) <= 1e-8 * n0);
  CHECK(op.reduce(ev.final_state).isApprox(op.reduce(basis[0]), 1e-8));
}

TEST_CASE("stepper and mode-evolution input validation") {
  PhysParams p;
  const auto s0 = make_uniform_state(1.0, 2.0, 33, 33,
                                     [](double) { return 2.0; },
                                     [](double) { return 1.0; });
  StepperConfig bad;
  bad.t_end = -1.0;
  CHECK_THROWS_AS(simulate_radial(s0, p, bad), std::invalid_argument);

  auto cheb = s0;
  cheb.c.inner_grid = RadialGrid::chebyshev_disk(1.0, 33);
  StepperConfig ok;
  CHECK_THROWS_AS(simulate_radial(cheb, p, ok), std::invalid_argument);

  const auto op = assemble_mode_operator(p, 2, 33, 33);
  ModeState s;
  s.k = 2;
  s.mu_plus = Eigen::VectorXcd::Zero(33);
  s.mu_minus = Eigen::VectorXcd::Zero(33);
  s.rho = 1.0;
  CHECK_THROWS_AS(linear_mode_evolve(op, s, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(linear_mode_evolve(op, s, 1e-2, 0.0), std::invalid_argument);
}
