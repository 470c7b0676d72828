#pragma once

#include "casimir/log_scaled.hpp"
#include "casimir/materials.hpp"
#include "casimir/mie.hpp"
#include "casimir/polarization.hpp"

namespace casimir {

// A 2x2 block of reflection matrix elements <k_j, p_j| R |k_i, p_i> stored as
// exp(exponent) * m[p_j][p_i]. The exponent is kept apart so that callers can
// combine it with translation factors before exponentiating.
struct ReflectionElement {
  double exponent = 0.0;
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  double value(Polarization out, Polarization in) const;
};

// S_p ~ (x/2) r_p e^{2 x sin(Theta/2)}, Fresnel coefficient at incidence
// cos = sin(Theta/2). eps = +infinity for a perfect reflector.
LogScaled wkb_amplitude(Polarization p, const ScatteringKinematics& kin, double x, double eps);
LogScaled wkb_amplitude(Polarization p, const ScatteringKinematics& kin, double xi, double radius,
                        const DielectricModel& model);

struct WkbReflection {
  double rho[2][2];  // [p_out][p_in]
  double exponent;   // 2 (xi R / c) sin(Theta/2) = 2 R kappa_eff
  double prefactor;  // pi R / kappa_out, in m^2
};

// Effective wave number kappa_eff = xi sin(Theta/2) / c
//   = sqrt((q^2 + k_i k_j cos(dphi) + kappa_i kappa_j) / 2), q = xi / c,
// valid down to xi = 0.
double effective_kappa(const PlaneWaveMode& in, const PlaneWaveMode& out);

// Specular-reflection approximation of the element for in.s = -out.s.
WkbReflection wkb_reflection(const PlaneWaveMode& in, const PlaneWaveMode& out, double radius,
                             const DielectricModel& model);

ReflectionElement to_element(const WkbReflection& w);

}  // namespace casimir
