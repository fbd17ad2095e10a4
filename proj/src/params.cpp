#include "osmoflow/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace osmoflow {

void PhysParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("PhysParams: ") + name +
                                  " must be positive and finite");
  };
  positive(nu_plus, "nu_plus");
  positive(nu_minus, "nu_minus");
  positive(kappa_plus, "kappa_plus");
  positive(kappa_minus, "kappa_minus");
  positive(ctilde_plus, "ctilde_plus");
  positive(ctilde_minus, "ctilde_minus");
  if (!(R_container > 1.0) || !std::isfinite(R_container))
    throw std::invalid_argument(
        "PhysParams: R_container must exceed the unit membrane radius");
  if (dim != 2)
    throw std::invalid_argument("PhysParams: only dim == 2 is supported");
}

void PhysParams::require_equilibrium_balance() const {
  validate();
  const double jump = ctilde_plus - ctilde_minus;
  if (std::abs(jump - m()) > 1e-12)
    throw std::invalid_argument(
        "PhysParams: osmotic balance requires ctilde_plus - ctilde_minus = dim - 1; got " +
        std::to_string(jump));
}

}  // namespace osmoflow
