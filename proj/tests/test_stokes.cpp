#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "osmoflow/stokes.hpp"

using namespace osmoflow;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("curvature-driven response: closed-form values at unit viscosity") {
  PhysParams p;
  // low modes are rational at nu+ = nu- = 1, R_container = 2
  CHECK(std::abs(normal_velocity_response(2, p) + 27.0 / 128.0) < 1e-10);
  CHECK(std::abs(normal_velocity_response(3, p) + 567.0 / 1024.0) < 1e-10);
  // translations and dilations produce no flow
  CHECK(std::abs(normal_velocity_response(0, p)) < 1e-12);
  CHECK(std::abs(normal_velocity_response(1, p)) < 1e-12);
}

TEST_CASE("curvature-driven response: sign law for all low modes") {
  PhysParams p;
  const double m = p.m();
  for (int k = 0; k <= 16; ++k) {
    const double v = normal_velocity_response(k, p);
    const double product = v * (m - k * k);
    CHECK(product >= -1e-12);    // surface tension never feeds a mode
    if (k >= 2) CHECK(product > 0.0);
  }
  // large-k asymptote v_k -> -k/4 at unit viscosities
  CHECK(normal_velocity_response(16, p) == doctest::Approx(-4.0).epsilon(5e-3));
}

TEST_CASE("mode mirror: k and -k solutions agree up to the sin-component flip") {
  ModeStokesProblem a;
  a.k = 3;
  a.h_normal = {0.7, 0.0};
  a.h_tangent = {-0.4, 0.0};
  ModeStokesProblem b = a;
  b.k = -3;
  b.h_tangent = {0.4, 0.0};

  const ModeFlowSolution sa = solve_stokes_mode(a);
  const ModeFlowSolution sb = solve_stokes_mode(b);
  CHECK((sa.ur_plus - sb.ur_plus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sa.ur_minus - sb.ur_minus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sa.p_plus - sb.p_plus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sa.utheta_plus + sb.utheta_plus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sa.utheta_minus + sb.utheta_minus).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(sa.v_interface - sb.v_interface) < 1e-14);
}

TEST_CASE("axisymmetric mode: normal traction becomes a pure pressure jump") {
  ModeStokesProblem prob;
  prob.k = 0;
  prob.h_normal = {1.0, 0.0};
  const ModeFlowSolution s = solve_stokes_mode(prob);
  CHECK(std::abs(s.pressure_jump - std::complex<double>(-1.0, 0.0)) < 1e-10);
  CHECK(std::abs(s.v_interface) < 1e-12);
  CHECK(s.solver_residual < 1e-12);
}

TEST_CASE("per-mode energy identity") {
  PhysParams p;
  const double m = p.m();
  for (int k = 2; k <= 8; ++k) {
    const EnergyIdentity id = stokes_energy_identity(k, p, 48);
    CHECK(id.residual <= 1e-6);
    // the surface side is exactly ang * v_k * (m - k^2) by construction
    const double surface = kPi * normal_velocity_response(k, p, 48) * (m - k * k);
    CHECK(std::abs(id.surface_side - surface) <=
          1e-12 * std::max(1.0, std::abs(surface)));
    CHECK(id.surface_side > 0.0);  // dissipation is positive for flowing modes
  }
}

TEST_CASE("energy identity residual decreases under refinement") {
  PhysParams p;
  // mode 3 carries the weakest origin regularity of the strain density and
  // converges at a finite algebraic order; refinement must still pay off
  const double coarse = stokes_energy_identity(3, p, 24).residual;
  const double fine = stokes_energy_identity(3, p, 48).residual;
  CHECK(fine < 1e-6);
  CHECK(coarse / fine >= 4.0);
}

TEST_CASE("manufactured solutions converge spectrally") {
  PhysParams p;
  const std::vector<int> levels = {8, 10, 12};
  for (int k : {1, 2, 3}) {
    std::vector<double> errs;
    for (int n : levels) {
      const auto ms = manufactured_stokes(k, p, n);
      errs.push_back(manufactured_stokes_error(ms));
      CHECK(solve_stokes_mode(ms.problem, &ms.data).solver_residual < 1e-12);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    if (k == 3) {
      const double order1 = std::log(errs[0] / errs[1]) / std::log(10.0 / 8.0);
      const double order2 = std::log(errs[1] / errs[2]) / std::log(12.0 / 10.0);
      CHECK(order1 >= 2.0);
      CHECK(order2 >= 2.0);
    }
  }
}

TEST_CASE("stokes solver input validation") {
  ModeStokesProblem bad;
  bad.k = 2;
  bad.n_inner = 7;
  CHECK_THROWS_AS(solve_stokes_mode(bad), std::invalid_argument);

  PhysParams p;
  auto ms = manufactured_stokes(2, p, 12);
  ms.problem.k = -2;
  CHECK_THROWS_AS(solve_stokes_mode(ms.problem, &ms.data), std::invalid_argument);
  CHECK_THROWS_AS(manufactured_stokes(-1, p, 12), std::invalid_argument);
}
