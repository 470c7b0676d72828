#include "casimir/wkb.hpp"

#include <cmath>
#include <limits>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

double ReflectionElement::value(Polarization out, Polarization in) const {
  const double v = m[static_cast<int>(out)][static_cast<int>(in)];
  return v == 0.0 ? 0.0 : v * std::exp(exponent);
}

LogScaled wkb_amplitude(Polarization p, const ScatteringKinematics& kin, double x, double eps) {
  if (!(x >= 0.0)) throw_domain("wkb_amplitude: x must be >= 0");
  const auto r = fresnel_from_cosine(eps, kin.sin_half_theta);
  const double rp = p == Polarization::TE ? r.r_te : r.r_tm;
  if (rp == 0.0 || x == 0.0) return {};
  const auto v = LogScaled::from_double(0.5 * x * rp);
  return LogScaled::from_log(v.sign, v.log_magnitude + 2.0 * x * kin.sin_half_theta);
}

LogScaled wkb_amplitude(Polarization p, const ScatteringKinematics& kin, double xi, double radius,
                        const DielectricModel& model) {
  return wkb_amplitude(p, kin, xi * radius / constants::c, permittivity(model, xi));
}

double effective_kappa(const PlaneWaveMode& in, const PlaneWaveMode& out) {
  const double q = in.xi / constants::c;
  const double s = q * q + in.k * out.k * std::cos(out.phi - in.phi) + in.kappa() * out.kappa();
  return std::sqrt(std::max(s, 0.0) / 2.0);
}

WkbReflection wkb_reflection(const PlaneWaveMode& in, const PlaneWaveMode& out, double radius,
                             const DielectricModel& model) {
  if (in.xi != out.xi) throw_domain("wkb_reflection: modes must share the frequency");
  if (in.s != -out.s) throw_domain("wkb_reflection: reflection needs opposite propagation signs");
  if (!(radius > 0.0)) throw_domain("wkb_reflection: radius must be positive");

  const double kappa_eff = effective_kappa(in, out);
  FresnelPair r{};
  if (in.xi == 0.0) {
    r = fresnel_zero_freq(model, std::max(kappa_eff, std::numeric_limits<double>::min()));
  } else {
    const double cos_inc = constants::c * kappa_eff / in.xi;
    r = fresnel_from_cosine(permittivity(model, in.xi), std::max(cos_inc, 1.0));
  }
  const auto c = abcd(in, out);

  WkbReflection w{};
  const int te = static_cast<int>(Polarization::TE);
  const int tm = static_cast<int>(Polarization::TM);
  w.rho[tm][tm] = c.a * r.r_tm + c.b * r.r_te;
  w.rho[te][te] = c.a * r.r_te + c.b * r.r_tm;
  w.rho[tm][te] = -(c.c * r.r_te + c.d * r.r_tm);
  w.rho[te][tm] = c.c * r.r_tm + c.d * r.r_te;
  w.exponent = 2.0 * radius * kappa_eff;
  w.prefactor = constants::pi * radius / out.kappa();
  return w;
}

ReflectionElement to_element(const WkbReflection& w) {
  ReflectionElement e;
  e.exponent = w.exponent;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) e.m[i][j] = w.prefactor * w.rho[i][j];
  return e;
}

}  // namespace casimir
