#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "osmoflow/linop.hpp"

using namespace osmoflow;

namespace {

const double kPi = 3.14159265358979323846;

ModeState random_state(const ModeOperator& op, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeState s;
  s.k = op.k;
  s.mu_plus.resize(op.inner_grid.size());
  s.mu_minus.resize(op.outer_grid.size());
  for (int i = 0; i < s.mu_plus.size(); ++i) s.mu_plus[i] = {u(rng), u(rng)};
  for (int i = 0; i < s.mu_minus.size(); ++i) s.mu_minus[i] = {u(rng), u(rng)};
  if (op.k != 0) s.mu_plus[0] = 0.0;  // Dirichlet origin slot
  s.rho = {u(rng), u(rng)};
  return s;
}

double slowest_retained(const ModeSpectrum& sp, double tol_zero) {
  double best = -1e300;
  for (const auto& z : sp.retained)
    if (std::abs(z) > tol_zero) best = std::max(best, z.real());
  return best;
}

}  // namespace

TEST_CASE("kernel states are annihilated by the discrete generator") {
  PhysParams p;
  const auto basis = null_space_basis(p, 65, 65);
  REQUIRE(basis.size() == 4);

  for (ModeState s : basis) {
    const auto op = assemble_mode_operator(p, s.k, 65, 65);
    s.k = op.k;  // negative modes mirror onto |k|
    const ModeState ds = op.apply(s);
    const double rel = op.reduce(ds).norm() / op.reduce(s).norm();
    if (s.k == 0)
      CHECK(rel < 1e-9);   // flux-form rows annihilate the affine kernel
    else
      CHECK(rel < 1e-12);  // the |k| = 1 kernel is exactly discrete
  }
}

TEST_CASE("reduced coordinates and round trips") {
  PhysParams p;
  const auto op0 = assemble_mode_operator(p, 0, 33, 41);
  CHECK(op0.reduced_size() == 33 + 41 + 1);
  const auto op1 = assemble_mode_operator(p, 1, 33, 41);
  CHECK(op1.reduced_size() == 32 + 41 + 1);

  std::mt19937 rng(7);
  for (const ModeOperator* op : {&op0, &op1}) {
    const ModeState s = random_state(*op, rng);
    const ModeState back = op->extend(op->reduce(s));
    CHECK((back.mu_plus - s.mu_plus).norm() == 0.0);
    CHECK((back.mu_minus - s.mu_minus).norm() == 0.0);
    CHECK(back.rho == s.rho);
  }
}

TEST_CASE("retained spectra are real and match the pinned slow eigenvalues") {
  PhysParams p;
  SpectrumOptions opt;

  const ModeSpectrum s0 = eigen_spectrum(p, 0, 65, opt);
  const ModeSpectrum s1 = eigen_spectrum(p, 1, 65, opt);
  const ModeSpectrum s2 = eigen_spectrum(p, 2, 65, opt);

  for (const ModeSpectrum* sp : {&s0, &s1, &s2})
    for (const auto& z : sp->retained) CHECK(std::abs(z.imag()) <= 1e-14);

  CHECK(slowest_retained(s0, opt.tol_zero) == doctest::Approx(-1.92209161).epsilon(1e-4));
  CHECK(slowest_retained(s1, opt.tol_zero) == doctest::Approx(-0.62727378).epsilon(1e-4));
  CHECK(slowest_retained(s2, opt.tol_zero) == doctest::Approx(-1.14961320).epsilon(1e-4));

  auto kernel_count = [&](const ModeSpectrum& sp) {
    int c = 0;
    for (const auto& z : sp.retained)
      if (std::abs(z) <= opt.tol_zero) ++c;
    return c;
  };
  CHECK(kernel_count(s0) == 2);
  CHECK(kernel_count(s1) == 1);
  CHECK(kernel_count(s2) == 0);
}

TEST_CASE("all retained non-kernel eigenvalues have negative real part") {
  PhysParams p;
  SpectrumOptions opt;
  for (int k = 0; k <= 6; ++k) {
    const ModeSpectrum sp = eigen_spectrum(p, k, 49, opt);
    CHECK(!sp.retained.empty());
    for (const auto& z : sp.retained)
      if (std::abs(z) > opt.tol_zero) CHECK(z.real() < 0.0);
  }
}

TEST_CASE("dissipation functional is nonnegative on admissible states") {
  PhysParams p;
  std::mt19937 rng(42);
  for (int k : {0, 1, 2}) {
    const auto op = assemble_mode_operator(p, k, 49, 49);
    for (int trial = 0; trial < 10; ++trial) {
      const ModeState s = op.make_admissible(random_state(op, rng));
      const std::complex<double> q = quadratic_form(op, s);
      CHECK(q.real() >= -1e-8 * std::max(1.0, std::abs(q)));
    }
  }
}

TEST_CASE("dissipation functional rejects inadmissible states") {
  PhysParams p;
  const auto op = assemble_mode_operator(p, 2, 49, 49);
  std::mt19937 rng(3);
  const ModeState raw = random_state(op, rng);  // strong-form BCs violated
  CHECK_THROWS_AS(quadratic_form(op, raw), std::invalid_argument);
}

TEST_CASE("discrete generator is self-adjoint in the indefinite pairing") {
  PhysParams p;
  std::mt19937 rng(11);
  for (int k : {0, 1, 2, 5}) {
    const auto op = assemble_mode_operator(p, k, 49, 49);
    const ModeState w = random_state(op, rng);
    const ModeState v = random_state(op, rng);
    const ModeState Mw = op.apply(w);
    const ModeState Mv = op.apply(v);
    const std::complex<double> a = g_inner(op, Mw, v);
    const std::complex<double> b = g_inner(op, w, Mv);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("mode-0 kernel Gram matrix has the exact closed form") {
  PhysParams p;
  const auto op = assemble_mode_operator(p, 0, 65, 65);
  const auto basis = null_space_basis(p, 65, 65);
  // pi * [[-3, 4], [4, 2]] at the reference parameters, exactly (telescoping
  // finite-volume weights integrate the flat kernel profiles with no error)
  const std::complex<double> g11 = g_inner(op, basis[0], basis[0]);
  const std::complex<double> g12 = g_inner(op, basis[0], basis[1]);
  const std::complex<double> g21 = g_inner(op, basis[1], basis[0]);
  const std::complex<double> g22 = g_inner(op, basis[1], basis[1]);
  CHECK(std::abs(g11 - std::complex<double>(-3.0 * kPi, 0.0)) < 1e-12);
  CHECK(std::abs(g12 - std::complex<double>(4.0 * kPi, 0.0)) < 1e-12);
  CHECK(std::abs(g21 - std::complex<double>(4.0 * kPi, 0.0)) < 1e-12);
  CHECK(std::abs(g22 - std::complex<double>(2.0 * kPi, 0.0)) < 1e-12);
}

TEST_CASE("zero eigenvalue is semisimple at the kernel-carrying modes") {
  PhysParams p;
  SpectrumOptions opt;

  const SemisimplicityCheck c0 = semisimplicity_check(p, 0, 65, opt);
  CHECK_FALSE(c0.vacuous);
  CHECK(c0.kernel_count == 2);
  CHECK(c0.min_residual_ratio > 0.1);
  CHECK(c0.min_residual_ratio == doctest::Approx(0.647059).epsilon(1e-3));

  const SemisimplicityCheck c1 = semisimplicity_check(p, 1, 65, opt);
  CHECK_FALSE(c1.vacuous);
  CHECK(c1.kernel_count == 1);
  CHECK(c1.min_residual_ratio > 0.1);
  CHECK(c1.min_residual_ratio == doctest::Approx(0.928513).epsilon(1e-3));

  const SemisimplicityCheck c2 = semisimplicity_check(p, 2, 65, opt);
  CHECK(c2.vacuous);
  CHECK(c2.kernel_count == 0);
}

TEST_CASE("semisimplicity probe flags a genuine Jordan block") {
  Eigen::MatrixXd jordan(2, 2);
  jordan << 0.0, 1.0, 0.0, 0.0;
  const SemisimplicityCheck c = semisimplicity_check_matrix(jordan, 1e-6);
  CHECK_FALSE(c.vacuous);
  CHECK(c.kernel_count >= 1);
  CHECK(c.min_residual_ratio < 1e-3);  // e1 = jordan * e2: secular growth

  Eigen::MatrixXd stable(3, 3);
  stable.setZero();
  stable.diagonal() << -1.0, -2.0, -3.0;
  CHECK(semisimplicity_check_matrix(stable, 1e-6).vacuous);
}

TEST_CASE("kernel projection removes exactly the kernel component") {
  PhysParams p;
  std::mt19937 rng(19);

  const auto op0 = assemble_mode_operator(p, 0, 65, 65);
  const auto basis = null_space_basis(p, 65, 65);
  const ModeState s = random_state(op0, rng);
  const ModeState proj = remove_kernel_component(op0, s);
  // G-orthogonal to both mode-0 kernel states afterwards
  const double scale = std::abs(g_inner(op0, s, s)) + 1.0;
  CHECK(std::abs(g_inner(op0, proj, basis[0])) < 1e-10 * scale);
  CHECK(std::abs(g_inner(op0, proj, basis[1])) < 1e-10 * scale);

  const auto op1 = assemble_mode_operator(p, 1, 49, 49);
  CHECK_THROWS_AS(remove_kernel_component(op1, random_state(op1, rng)),
                  std::invalid_argument);

  const auto op2 = assemble_mode_operator(p, 2, 49, 49);
  const ModeState s2 = random_state(op2, rng);
  const ModeState same = remove_kernel_component(op2, s2);
  CHECK((same.mu_plus - s2.mu_plus).norm() == 0.0);
  CHECK((same.mu_minus - s2.mu_minus).norm() == 0.0);
  CHECK(same.rho == s2.rho);
}

TEST_CASE("operator assembly input validation") {
  PhysParams p;
  CHECK_THROWS_AS(assemble_mode_operator(p, 0, 5, 65), std::invalid_argument);
  CHECK_THROWS_AS(spectrum_report(p, 0, 33), std::invalid_argument);
}
