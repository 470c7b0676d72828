#pragma once

#include <vector>

#include "casimir/log_scaled.hpp"
#include "casimir/materials.hpp"

namespace casimir {

// Scattering geometry of one reflection on the imaginary frequency axis.
struct ScatteringKinematics {
  double cos_theta;       // <= -1 for every round-trip channel
  double sin_half_theta;  // sqrt((1 - cos_theta) / 2) >= 1
};

// cos(Theta) = -(c/xi)^2 (k_i . k_j + kappa_i kappa_j), SI arguments.
// Throws if kappa^2 != (xi/c)^2 + k^2 for either mode.
ScatteringKinematics scattering_angle(double k_i, double k_j, double delta_phi, double kappa_i,
                                      double kappa_j, double xi);

ScatteringKinematics kinematics_from_cosine(double cos_theta);

struct AngularFunctions {
  LogScaled pi;
  LogScaled tau;
};

// pi_l(z) = P_l'(z), tau_l(z) = z P_l'(z) - (1 - z^2) P_l''(z).
AngularFunctions angular_functions(int ell, double z);

// Generates (pi_l, tau_l) for l = 1, 2, ... by upward recurrence. Values are
// kept in a rescaled frame so that |z| >> 1 and l ~ 10^5 do not overflow.
class AngularRecurrence {
 public:
  explicit AngularRecurrence(double z);
  int ell() const { return ell_; }
  AngularFunctions current() const;
  void advance();

 private:
  double t_;         // |z|
  int parity_sign_;  // -1 for z < 0
  int ell_ = 1;
  double prev_ = 0.0;  // pi_{l-1} in the scaled frame
  double cur_ = 1.0;   // pi_l in the scaled frame
  double log_scale_ = 0.0;
};

struct MieCoefficients {
  LogScaled a;
  LogScaled b;
};

struct MieAmplitudes {
  LogScaled s1;
  LogScaled s2;
  int terms = 0;  // partial waves summed
};

inline constexpr double kDefaultMieTolerance = 1e-9;
inline constexpr int kMaxPartialWaves = 10'000'000;

// Mie coefficients and amplitudes of one homogeneous sphere at one imaginary
// frequency. x = xi R / c, eps = eps(i xi) (+infinity for a perfect
// reflector). Bessel tables are built lazily and grown geometrically.
class MieSphere {
 public:
  MieSphere(double x, double eps);
  MieSphere(double xi, double radius, const DielectricModel& model);

  double size_parameter() const { return x_; }
  double permittivity() const { return eps_; }

  MieCoefficients coefficients(int ell);

  // S_1 and S_2 at the given kinematics, truncated adaptively.
  MieAmplitudes amplitudes(const ScatteringKinematics& kin, double tol = kDefaultMieTolerance);

  // Sum over l = 1..l_max without the convergence loop.
  MieAmplitudes amplitudes_truncated(double cos_theta, int l_max);

 private:
  void ensure(int l_max);

  double x_;
  double eps_;
  int table_max_ = 0;
  std::vector<LogScaled> a_;  // index l, entry 0 unused
  std::vector<LogScaled> b_;
};

// Convenience wrapper around MieSphere::coefficients.
MieCoefficients mie_coefficients(int ell, double x, double eps);

// Exponent-scaled modified spherical Bessel data used by the Mie
// coefficients; exposed for tests.
struct ModifiedBesselTable {
  std::vector<double> log_i;      // log i_l(z), l = 0..l_max
  std::vector<double> log_k;      // log k_l(z), with k_0 = (pi/2) e^{-z} / z
  std::vector<double> ratio_i;    // i_l / i_{l-1}, l = 1..l_max+1 (index l)
  std::vector<double> ratio_k;    // k_l / k_{l-1}, l = 1..l_max (index l)
};
ModifiedBesselTable modified_bessel_table(double z, int l_max);

// Ratios i_l(z) / i_{l-1}(z) for l = 1..l_max (index l) by backward recurrence.
std::vector<double> modified_bessel_i_ratios(double z, int l_max);

// xi -> 0 limit of the amplitudes divided by xi (units of seconds), for a
// sphere of radius R. The combination that survives is
// y = 2 R kappa_eff with kappa_eff = lim xi sin(Theta/2) / c
//   = sqrt((k_i.k_j + kappa_i kappa_j) / 2) at xi = 0.
// S_1/xi = -(R/c) sum_l l/(l+1) F_l y^{2l}/(2l)!,  S_2/xi = (R/c) sum_l E_l y^{2l}/(2l)!
class ZeroFrequencySphere {
 public:
  ZeroFrequencySphere(double radius, const DielectricModel& model);

  // Returns S_1/xi and S_2/xi.
  MieAmplitudes amplitudes_over_xi(double kappa_eff);

  // The dimensionless series  sum_l g_l y^{2l} / (2l)!  for TE (with the
  // l/(l+1) factor and sign included) and TM.
  MieAmplitudes series(double y);

 private:
  double te_factor(int ell);
  double tm_factor(int ell) const;
  void ensure_plasma(int l_max);

  double radius_;
  DielectricModel model_;
  std::vector<double> plasma_ratio_;  // i_l(w)/i_{l-1}(w), w = omega_p R / c
};

}  // namespace casimir
