#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "osmoflow/equilibria.hpp"
#include "osmoflow/params.hpp"

using namespace osmoflow;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("equilibrium radius for perturbed masses") {
  // M+ = 2.2 pi, M- = 3 pi in the R_container = 2 vessel
  const auto scan = find_equilibrium(2.2 * kPi, 3.0 * kPi, 2.0);
  REQUIRE(scan.found());
  REQUIRE(scan.roots.size() == 1);
  const Equilibrium& e = scan.roots[0];

  CHECK(e.R_star == doctest::Approx(1.052119767322).epsilon(1e-9));

  // masses are reproduced by the root
  CHECK(e.c_plus * kPi * e.R_star * e.R_star ==
        doctest::Approx(2.2 * kPi).epsilon(1e-10));
  CHECK(e.c_minus * kPi * (4.0 - e.R_star * e.R_star) ==
        doctest::Approx(3.0 * kPi).epsilon(1e-10));

  // osmotic balance at the root: jump(c) = -H = 1/R
  CHECK(e.c_plus - e.c_minus == doctest::Approx(1.0 / e.R_star).epsilon(1e-10));
}

TEST_CASE("reference masses recover the unit sphere") {
  const auto scan = find_equilibrium(2.0 * kPi, 3.0 * kPi, 2.0);
  REQUIRE(scan.found());
  REQUIRE(scan.roots.size() == 1);
  CHECK(scan.roots[0].R_star == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(scan.roots[0].c_plus == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(scan.roots[0].c_minus == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tiny masses admit no equilibrium but still report the scan") {
  const auto scan = find_equilibrium(1e-4 * kPi, 1e-4 * kPi, 2.0);
  CHECK_FALSE(scan.found());
  CHECK(scan.roots.empty());
  CHECK(scan.scan_R.size() == 1024);
  CHECK(scan.scan_F.size() == scan.scan_R.size());
  CHECK(scan.scan_F.allFinite());
}

TEST_CASE("find_equilibrium input validation") {
  CHECK_THROWS_AS(find_equilibrium(-1.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(find_equilibrium(1.0, 1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(find_equilibrium(1.0, 1.0, 2.0, 3), std::invalid_argument);
}

TEST_CASE("mass-to-concentration matrix at the reference parameters") {
  PhysParams p;  // ctilde = (2, 1), R_container = 2: balanced by construction
  const PhiMatrix phi = phi_matrix(p);

  CHECK(phi.A(0, 0) == doctest::Approx(1.5 * kPi).epsilon(1e-12));
  CHECK(phi.A(0, 1) == doctest::Approx(-2.0 * kPi).epsilon(1e-12));
  CHECK(phi.A(1, 0) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(phi.A(1, 1) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(phi.det == doctest::Approx(5.5 * kPi * kPi).epsilon(1e-12));

  // quadrature evaluation of the same matrix agrees with the closed form
  const PhiMatrix phiq = phi_matrix_quadrature(p, 64);
  CHECK((phiq.A - phi.A).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(phiq.det == doctest::Approx(phi.det).epsilon(1e-10));
}

TEST_CASE("phi determinant stays positive away from the reference point") {
  PhysParams p;
  p.ctilde_minus = 5.0;
  p.ctilde_plus = 6.0;  // keeps the osmotic balance jump = 1
  p.R_container = 3.0;
  CHECK(phi_matrix(p).det > 0.0);
}

TEST_CASE("phi matrix requires the osmotic balance") {
  PhysParams p;
  p.ctilde_plus = 5.0;  // jump = 4 != m = 1
  CHECK_THROWS_AS(phi_matrix(p), std::invalid_argument);
}
