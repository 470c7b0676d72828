#include "casimir/geometry.hpp"

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

void validate(const Geometry& g) {
  if (!(g.r1 > 0.0) || !(g.r2 > 0.0)) throw_domain("geometry: radii must be positive");
  if (std::isinf(g.r1) && std::isinf(g.r2)) throw_domain("geometry: at least one sphere needed");
  if (!(g.gap > 0.0) || std::isinf(g.gap)) throw_domain("geometry: gap must be positive and finite");
}

double ThermalSpec::matsubara(int n) const {
  return 2.0 * constants::pi * n * constants::k_B * temperature / constants::hbar;
}

double ThermalSpec::thermal_wavelength() const {
  if (temperature == 0.0) return std::numeric_limits<double>::infinity();
  return constants::hbar * constants::c / (constants::k_B * temperature);
}

}  // namespace casimir
