#pragma once

#include "casimir/geometry.hpp"
#include "casimir/materials.hpp"
#include "casimir/polarization.hpp"

namespace casimir {

struct PfaValue {
  double value = 0.0;
  double est_error = 0.0;  // absolute
  int n_max_used = 0;      // last Matsubara index (0 at T = 0)
};

struct PfaOptions {
  double quad_tol = 1e-13;       // relative, per one-dimensional integral
  double matsubara_tol = 1e-12;  // stop when |term| < tol |sum| ...
  double min_t_cutoff = 5.0;     // ... and xi_n L / c exceeds this
};

// r-th round-trip trace in the saddle-point approximation, one polarization:
//   (R_eff / 2r) int_{xi/c}^inf dkappa [r_p^(1) r_p^(2) e^{-2 kappa L}]^r
double tr_m_r_pfa(Polarization p, int r, double xi, double gap, double r_eff, const MaterialPair& mats,
                  const PfaOptions& opt = {});
// summed over both polarizations
double tr_m_r_pfa(int r, double xi, double gap, double r_eff, const MaterialPair& mats,
                  const PfaOptions& opt = {});

// Nondimensional per-frequency kernels, t = xi L / c:
//   Phi_p(t) = int_t^inf du Li_2(r1 r2 e^{-2u})
//   G_p(t)   = int_t^inf du u log(1 - r1 r2 e^{-2u})
double pfa_phi(Polarization p, double t, double gap, const MaterialPair& mats, const PfaOptions& opt = {});
double pfa_g(Polarization p, double t, double gap, const MaterialPair& mats, const PfaOptions& opt = {});

// Free energy (J) in PFA; T > 0.
PfaValue free_energy(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                     const PfaOptions& opt = {});
PfaValue free_energy_zero_T(const Geometry& g, const MaterialPair& mats, const PfaOptions& opt = {});

// Same free energy from -(k_B T / 2) sum_n sum_r tr M^r / r with the PFA traces.
PfaValue free_energy_mercator(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                              const PfaOptions& opt = {});

// Parallel-plate free energy per unit area (J/m^2); T = 0 allowed.
PfaValue plate_free_energy(double gap, const MaterialPair& mats, const ThermalSpec& th,
                           const PfaOptions& opt = {});

// F = 2 pi R_eff F_PP(L, T) in newtons; T = 0 allowed.
PfaValue force(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
               const PfaOptions& opt = {});

// -dF/dL by a fourth-order central difference of the free energy,
// step h = rel_step * L.
PfaValue force_from_energy(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                           double rel_step = 1e-3, const PfaOptions& opt = {});

// delta F(L, T) = F(L, T) - F(L, 0) from the Poisson-summed representation.
PfaValue thermal_correction(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                            const PfaOptions& opt = {});
// The same difference evaluated directly (Matsubara sum minus T = 0 integral).
PfaValue thermal_correction_direct(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                                   const PfaOptions& opt = {});

// Wave number below which a fraction `fraction` of the m = 1 Poisson term of
// the thermal correction is accumulated (cumulative integral over kappa,
// settled to within 1 - fraction of the total). Units 1/m.
double thermal_kappa_support(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                             double fraction = 0.9);

// Order-of-magnitude figures with all order-one factors set to 1.
struct EffectiveAreaEstimate {
  double delta_k;                // (L R1)^{-1/2}, 1/m
  double theta_cap;              // (L / R1)^{1/2}, rad
  double cap_diameter;           // (R1 L)^{1/2}, m
  double area;                   // R1 L, m^2
  double cap_diameter_thermal;   // (R1 lambda_T)^{1/2}, m
  double area_thermal;           // R1 lambda_T, m^2
};
EffectiveAreaEstimate effective_area(const Geometry& g, const ThermalSpec& th);

}  // namespace casimir
