#include "casimir/polarization.hpp"

#include <cmath>

#include "casimir/error.hpp"

namespace casimir {

double PlaneWaveMode::kappa() const { return std::hypot(xi / constants::c, k); }

PlaneWaveMode reversed(const PlaneWaveMode& mode) {
  return {mode.xi, mode.k, mode.phi + constants::pi, -mode.s};
}

namespace {

void check_mode(const PlaneWaveMode& m) {
  if (!(m.xi >= 0.0) || !(m.k >= 0.0) || (m.s != 1 && m.s != -1)) {
    throw_domain("plane wave mode: need xi >= 0, k >= 0, s = +-1");
  }
}

// X = k_i k_j cos(phi) - s_i s_j kappa_i kappa_j, together with the two
// factors of q^4 - X^2 = (q^2 - X)(q^2 + X), the small one computed without
// cancellation.
struct Invariants {
  double q2;
  double x;
  double minus;  // q^2 - X
  double plus;   // q^2 + X
};

Invariants invariants(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  const double q = in.xi / constants::c;
  const double q2 = q * q;
  const double ki = in.k, kj = out.k;
  const double kai = in.kappa(), kaj = out.kappa();
  const double dphi = out.phi - in.phi;
  const int sigma = in.s * out.s;
  const double x = ki * kj * std::cos(dphi) - sigma * kai * kaj;
  // kappa_i kappa_j - k_i k_j - q^2 = q^2 (k_i - k_j)^2 / (kappa_i kappa_j + k_i k_j + q^2)
  const double dk = ki - kj;
  const double gap = q2 * dk * dk / (kai * kaj + ki * kj + q2);
  Invariants inv{q2, x, 0.0, 0.0};
  if (sigma < 0) {
    const double c2 = std::cos(dphi / 2.0);
    inv.minus = -(gap + 2.0 * ki * kj * c2 * c2);  // q^2 - X <= 0
    inv.plus = q2 + x;
  } else {
    const double s2 = std::sin(dphi / 2.0);
    inv.plus = -(gap + 2.0 * ki * kj * s2 * s2);  // q^2 + X <= 0
    inv.minus = q2 - x;
  }
  return inv;
}

}  // namespace

double cos_scattering_angle(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  check_mode(in);
  check_mode(out);
  if (in.xi == 0.0) throw_domain("cos_scattering_angle: xi must be positive");
  const auto inv = invariants(in, out);
  return -inv.x / inv.q2;
}

BasisDotProducts basis_dot_products(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  check_mode(in);
  check_mode(out);
  if (in.xi == 0.0) throw_domain("basis_dot_products: xi must be positive");
  const double q = in.xi / constants::c;
  const double dphi = out.phi - in.phi;
  const double kai = in.kappa(), kaj = out.kappa();
  BasisDotProducts d{};
  d.te_te = std::cos(dphi);
  d.tm_tm = -(in.k * out.k - in.s * out.s * kai * kaj * std::cos(dphi)) / (q * q);
  d.te_tm = -out.s * kaj * std::sin(dphi) / q;
  d.tm_te = in.s * kai * std::sin(dphi) / q;
  return d;
}

PolarizationCoefficients abcd(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  check_mode(in);
  check_mode(out);
  if (in.xi != out.xi) throw_domain("abcd: modes must share the frequency");
  if (in.k == 0.0 && out.k == 0.0) {
    throw Error(Error::Kind::Singularity, "abcd: scattering plane undefined for k_i = k_j = 0");
  }
  if (in.xi == 0.0) return {-static_cast<double>(in.s * out.s), 0.0, 0.0, 0.0};

  const auto inv = invariants(in, out);
  const double q2 = inv.q2;
  const double den = inv.minus * inv.plus;  // q^4 - X^2
  const double scale = std::max(std::abs(inv.minus), std::abs(inv.plus));
  const int sigma = in.s * out.s;
  if (std::abs(den) <= 1e-20 * scale * scale) {
    // forward (identical modes) or exact backscattering
    return sigma > 0 ? PolarizationCoefficients{1.0, 0.0, 0.0, 0.0}
                     : PolarizationCoefficients{0.0, 1.0, 0.0, 0.0};
  }

  const double ki = in.k, kj = out.k;
  const double kai = in.kappa(), kaj = out.kappa();
  const double dphi = out.phi - in.phi;
  const double cp = std::cos(dphi), sp = std::sin(dphi);
  const double q = std::sqrt(q2);
  // e = k_j kappa_i - k_i kappa_j and wc = 1 - sigma cos(dphi), both free of
  // cancellation; they vanish together with den
  const double e = q2 * (kj - ki) * (kj + ki) / (kj * kai + ki * kaj);
  const double half = sigma > 0 ? std::sin(0.5 * dphi) : std::cos(0.5 * dphi);
  const double wc = 2.0 * half * half;

  PolarizationCoefficients r{};
  r.a = (-cp * e * e + sigma * ki * kj * kai * kaj * wc * wc) / den;
  r.b = -q2 * ki * kj * sp * sp / den;
  r.c = q * sp * ki * in.s * sigma * (e - kj * kai * wc) / den;
  r.d = -q * sp * kj * out.s * sigma * (e + ki * kaj * wc) / den;
  return r;
}

}  // namespace casimir
