#pragma once

#include "casimir/constants.hpp"

namespace casimir {

enum class Polarization { TE = 0, TM = 1 };

// Plane wave on the imaginary frequency axis: transverse wave vector of
// modulus k at azimuth phi, propagating towards +z (s = +1) or -z (s = -1).
struct PlaneWaveMode {
  double xi;   // rad/s
  double k;    // 1/m
  double phi;  // rad
  int s;       // +1 or -1

  double kappa() const;
};

// -K: same modulus, opposite direction.
PlaneWaveMode reversed(const PlaneWaveMode& mode);

// Coefficients A, B, C, D of the change from the TE/TM basis to the
// perpendicular/parallel basis of the scattering plane spanned by K_in, K_out.
struct PolarizationCoefficients {
  double a;
  double b;
  double c;
  double d;
};

PolarizationCoefficients abcd(const PlaneWaveMode& in, const PlaneWaveMode& out);

// Scalar products between the TE/TM unit vectors of two modes.
struct BasisDotProducts {
  double te_te;
  double tm_tm;
  double te_tm;  // TE(in) . TM(out)
  double tm_te;  // TM(in) . TE(out)
};

BasisDotProducts basis_dot_products(const PlaneWaveMode& in, const PlaneWaveMode& out);

// cos(Theta) between the two modes; -(c/xi)^2 (k_i k_j cos(phi) - s_i s_j kappa_i kappa_j).
double cos_scattering_angle(const PlaneWaveMode& in, const PlaneWaveMode& out);

}  // namespace casimir
