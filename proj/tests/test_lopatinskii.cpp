#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "osmoflow/stokes.hpp"

using namespace osmoflow;

namespace {

Eigen::VectorXd default_xi() {
  Eigen::VectorXd xi(4);
  xi << 0.7, 1.3, -2.2, 5.0;
  return xi;
}

}  // namespace

TEST_CASE("boundary symbol determinant at unit viscosities") {
  const LSReport rep = verify_lopatinskii(1.0, 1.0, default_xi());
  // det M = -2 (nu+ + nu-)^2 = -8, purely real
  CHECK(std::abs(rep.det_M.real() + 8.0) / 8.0 < 1e-13);
  CHECK(std::abs(rep.det_M.imag()) < 1e-13);
  // min singular value of M = sqrt(2) (nu+ + nu-) = 2 sqrt(2)
  CHECK(rep.min_singular_value ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-8));
  CHECK(rep.det_spread < 1e-13);
  CHECK(rep.xi == default_xi());
}

TEST_CASE("boundary symbol determinant for asymmetric viscosities") {
  const LSReport rep = verify_lopatinskii(2.5, 0.3, default_xi());
  const double expected = -2.0 * (2.5 + 0.3) * (2.5 + 0.3);  // -15.68
  CHECK(std::abs(rep.det_M.real() - expected) / std::abs(expected) < 1e-13);
  CHECK(std::abs(rep.det_M.imag()) < 1e-13);
  CHECK(rep.min_singular_value > 0.0);
}

TEST_CASE("normalized determinant is frequency independent") {
  Eigen::VectorXd xi_a(3), xi_b(3);
  xi_a << 0.11, 0.97, 3.4;
  xi_b << -7.2, 12.5, -0.03;
  const LSReport a = verify_lopatinskii(1.7, 0.9, xi_a);
  const LSReport b = verify_lopatinskii(1.7, 0.9, xi_b);
  CHECK(std::abs(a.det_M - b.det_M) < 1e-12);
  CHECK(a.det_spread < 1e-12);
  CHECK(b.det_spread < 1e-12);
}

TEST_CASE("lopatinskii verification input validation") {
  CHECK_THROWS_AS(verify_lopatinskii(0.0, 1.0, default_xi()), std::invalid_argument);
  CHECK_THROWS_AS(verify_lopatinskii(1.0, -2.0, default_xi()), std::invalid_argument);
  CHECK_THROWS_AS(verify_lopatinskii(1.0, 1.0, Eigen::VectorXd()), std::invalid_argument);
}
