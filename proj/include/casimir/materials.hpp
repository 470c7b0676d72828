#pragma once

#include <string>
#include <variant>

namespace casimir {

struct PerfectReflector {};

// eps(i xi) = 1 + omega_p^2 / xi^2
struct Plasma {
  double plasma_frequency;  // rad/s
};

// eps(i xi) = 1 + omega_p^2 / (xi (xi + gamma))
struct Drude {
  double plasma_frequency;  // rad/s
  double relaxation_rate;   // rad/s
};

// frequency independent eps >= 1
struct Dielectric {
  double eps0;
};

using DielectricModel = std::variant<PerfectReflector, Plasma, Drude, Dielectric>;

// Factories validating the parameter invariants.
DielectricModel make_perfect_reflector();
DielectricModel make_plasma(double plasma_frequency);
DielectricModel make_drude(double plasma_frequency, double relaxation_rate);
DielectricModel make_dielectric(double eps0);

void validate(const DielectricModel& model);

bool is_perfect_reflector(const DielectricModel& model);

// Parses `perfect`, `plasma:<omega_p>`, `drude:<omega_p>:<gamma>`,
// `dielectric:<eps0>`.
DielectricModel parse_material(const std::string& spec);
std::string to_string(const DielectricModel& model);

// eps(i xi); +infinity for a perfect reflector. Throws for xi <= 0.
double permittivity(const DielectricModel& model, double xi);

struct FresnelPair {
  double r_te;
  double r_tm;
};

// Fresnel coefficients on the imaginary frequency axis, for an angle of
// incidence with cos(theta) = c kappa / xi >= 1 (SI arguments).
FresnelPair fresnel(const DielectricModel& model, double xi, double kappa);

// Same coefficients written through cos(theta) = c kappa / xi directly; `eps`
// may be +infinity. Used by the nondimensional integrands.
FresnelPair fresnel_from_cosine(double eps, double cos_theta);

// xi -> 0 limit at fixed kappa (1/m). Each model has its own branch.
FresnelPair fresnel_zero_freq(const DielectricModel& model, double kappa);

}  // namespace casimir
