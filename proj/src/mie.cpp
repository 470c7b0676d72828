#include "casimir/mie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

constexpr double kRescaleThreshold = 1e250;

double log_i0(double z) {
  if (z < 1e-3) {
    const double z2 = z * z;
    return std::log1p(z2 / 6.0 + z2 * z2 / 120.0);
  }
  if (z < 20.0) return std::log(std::sinh(z) / z);
  return z - std::log(2.0 * z) + std::log1p(-std::exp(-2.0 * z));
}

double log_k0(double z) { return std::log(constants::pi / 2.0) - z - std::log(z); }

}  // namespace

ScatteringKinematics scattering_angle(double k_i, double k_j, double delta_phi, double kappa_i,
                                      double kappa_j, double xi) {
  if (!(xi > 0.0)) throw_domain("scattering_angle: xi must be positive");
  const double q = xi / constants::c;
  auto consistent = [q](double k, double kappa) {
    const double expect = std::hypot(q, k);
    return k >= 0.0 && std::abs(kappa - expect) <= 1e-10 * expect;
  };
  if (!consistent(k_i, kappa_i) || !consistent(k_j, kappa_j)) {
    throw_domain("scattering_angle: kappa^2 != (xi/c)^2 + k^2");
  }
  const double cos_theta = -(k_i * k_j * std::cos(delta_phi) + kappa_i * kappa_j) / (q * q);
  // 1 - cos_theta = 2 (q^2 + kappa_i kappa_j + k_i k_j cos) / (2 q^2), evaluated
  // directly to keep sin(Theta/2) accurate when cos_theta is huge.
  const double s2 = (q * q + kappa_i * kappa_j + k_i * k_j * std::cos(delta_phi)) / (2.0 * q * q);
  return {std::min(cos_theta, -1.0), std::sqrt(std::max(s2, 1.0))};
}

ScatteringKinematics kinematics_from_cosine(double cos_theta) {
  return {cos_theta, std::sqrt(std::max((1.0 - cos_theta) / 2.0, 0.0))};
}

// ---------------------------------------------------------------------------
// angular functions

AngularRecurrence::AngularRecurrence(double z) : t_(std::abs(z)), parity_sign_(z < 0 ? -1 : 1) {}

AngularFunctions AngularRecurrence::current() const {
  const double l = ell_;
  const double tau = l * t_ * cur_ - (l + 1.0) * prev_;
  LogScaled pi = LogScaled::from_double(cur_);
  LogScaled ta = LogScaled::from_double(tau);
  pi.log_magnitude += log_scale_;
  ta.log_magnitude += log_scale_;
  if (parity_sign_ < 0) {
    // pi_l(-t) = (-1)^{l+1} pi_l(t), tau_l(-t) = (-1)^l tau_l(t)
    if (ell_ % 2 == 0) pi = -pi;
    else ta = -ta;
  }
  return {pi, ta};
}

void AngularRecurrence::advance() {
  const double l = ell_;
  const double next = ((2.0 * l + 1.0) * t_ * cur_ - (l + 1.0) * prev_) / l;
  prev_ = cur_;
  cur_ = next;
  ++ell_;
  if (std::abs(cur_) > kRescaleThreshold) {
    prev_ /= kRescaleThreshold;
    cur_ /= kRescaleThreshold;
    log_scale_ += std::log(kRescaleThreshold);
  }
}

AngularFunctions angular_functions(int ell, double z) {
  if (ell < 1) throw_domain("angular_functions: ell must be >= 1");
  AngularRecurrence rec(z);
  while (rec.ell() < ell) rec.advance();
  return rec.current();
}

// ---------------------------------------------------------------------------
// modified spherical Bessel functions

std::vector<double> modified_bessel_i_ratios(double z, int l_max) {
  if (!(z > 0.0)) throw_domain("modified_bessel_i_ratios: argument must be positive");
  const long top = l_max + static_cast<long>(std::ceil(std::min(z, 1e7))) + 60;
  const double nu = top + 0.5;
  double rho = z / (nu + std::sqrt(nu * nu + z * z));
  std::vector<double> out(static_cast<std::size_t>(l_max) + 1, 0.0);
  for (long l = top; l >= 1; --l) {
    rho = 1.0 / ((2.0 * l + 1.0) / z + rho);
    if (l <= l_max) out[l] = rho;
  }
  return out;
}

ModifiedBesselTable modified_bessel_table(double z, int l_max) {
  ModifiedBesselTable t;
  t.ratio_i = modified_bessel_i_ratios(z, l_max + 1);
  t.log_i.resize(l_max + 1);
  t.log_k.resize(l_max + 1);
  t.ratio_k.assign(l_max + 1, 0.0);
  t.log_i[0] = log_i0(z);
  t.log_k[0] = log_k0(z);
  double sigma = 1.0 + 1.0 / z;  // k_1 / k_0
  for (int l = 1; l <= l_max; ++l) {
    if (l > 1) sigma = (2.0 * l - 1.0) / z + 1.0 / sigma;
    t.ratio_k[l] = sigma;
    t.log_k[l] = t.log_k[l - 1] + std::log(sigma);
    t.log_i[l] = t.log_i[l - 1] + std::log(t.ratio_i[l]);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Mie coefficients
//
// On the imaginary axis, with P(z) = z i_l(z), Q(z) = z k_l(z) and m = sqrt(eps):
//   a_l = (-1)^l (pi/2) (i_l/k_l) [m D_P(x) - D_P(mx)] / [D_P(mx) - m D_Q(x)]
//   b_l = (-1)^{l+1} (pi/2) (i_l/k_l) [m rho(mx) - rho(x)] / [m D_P(mx) - D_Q(x)]
// where D_P(z) = (l+1)/z + rho_{l+1}(z), rho_l = i_l/i_{l-1}, D_Q = Q'/Q.

MieSphere::MieSphere(double x, double eps) : x_(x), eps_(eps) {
  if (!(x > 0.0)) throw_domain("MieSphere: size parameter must be positive");
  if (!(eps >= 1.0)) throw_domain("MieSphere: permittivity must be >= 1");
}

MieSphere::MieSphere(double xi, double radius, const DielectricModel& model)
    : MieSphere(xi * radius / constants::c, casimir::permittivity(model, xi)) {}

void MieSphere::ensure(int l_max) {
  if (l_max <= table_max_) return;
  if (l_max > kMaxPartialWaves) throw_nonconvergence("Mie series: partial-wave cap exceeded");
  const auto outer = modified_bessel_table(x_, l_max);
  const bool perfect = std::isinf(eps_);
  const double m = perfect ? 0.0 : std::sqrt(eps_);
  std::vector<double> inner;
  if (!perfect) inner = modified_bessel_i_ratios(m * x_, l_max + 1);

  a_.assign(l_max + 1, LogScaled{});
  b_.assign(l_max + 1, LogScaled{});
  const double log_half_pi = std::log(constants::pi / 2.0);
  for (int l = 1; l <= l_max; ++l) {
    const double lf = l;
    const double log_ratio = log_half_pi + outer.log_i[l] - outer.log_k[l];
    const double dp_x = (lf + 1.0) / x_ + outer.ratio_i[l + 1];
    const double dq_x = -1.0 / outer.ratio_k[l] - lf / x_;
    double fa = 0.0;
    double fb = 0.0;
    if (perfect) {
      fa = dp_x / (-dq_x);
      fb = 1.0;
    } else {
      const double mx = m * x_;
      const double rho_x = outer.ratio_i[l + 1];
      const double rho_mx = inner[l + 1];
      const double dp_mx = (lf + 1.0) / mx + rho_mx;
      fa = ((lf + 1.0) * (m - 1.0 / m) / x_ + m * rho_x - rho_mx) / (dp_mx - m * dq_x);
      fb = (m * rho_mx - rho_x) / (m * dp_mx - dq_x);
    }
    const int sign_a = (l % 2 == 0) ? 1 : -1;
    LogScaled a = LogScaled::from_double(fa);
    LogScaled b = LogScaled::from_double(fb);
    if (!a.is_zero()) a = LogScaled::from_log(sign_a * a.sign, a.log_magnitude + log_ratio);
    if (!b.is_zero()) b = LogScaled::from_log(-sign_a * b.sign, b.log_magnitude + log_ratio);
    a_[l] = a;
    b_[l] = b;
  }
  table_max_ = l_max;
}

MieCoefficients MieSphere::coefficients(int ell) {
  if (ell < 1) throw_domain("mie_coefficients: ell must be >= 1");
  if (ell > table_max_) ensure(std::max(ell, 2 * table_max_));
  return {a_[ell], b_[ell]};
}

MieAmplitudes MieSphere::amplitudes_truncated(double cos_theta, int l_max) {
  ensure(l_max);
  AngularRecurrence rec(cos_theta);
  LogSum s1;
  LogSum s2;
  for (int l = 1; l <= l_max; ++l, rec.advance()) {
    const auto ang = rec.current();
    const double w = (2.0 * l + 1.0) / (static_cast<double>(l) * (l + 1.0));
    s1.add(w * (a_[l] * ang.pi + b_[l] * ang.tau));
    s2.add(w * (a_[l] * ang.tau + b_[l] * ang.pi));
  }
  return {s1.value(), s2.value(), l_max};
}

MieAmplitudes MieSphere::amplitudes(const ScatteringKinematics& kin, double tol) {
  int n = static_cast<int>(std::ceil(x_ * kin.sin_half_theta + 10.0 * std::cbrt(x_) + 20.0));
  std::vector<LogScaled> t1;
  std::vector<LogScaled> t2;
  AngularRecurrence rec(kin.cos_theta);
  while (true) {
    ensure(n);
    for (int l = static_cast<int>(t1.size()) + 1; l <= n; ++l) {
      while (rec.ell() < l) rec.advance();
      const auto ang = rec.current();
      const double w = (2.0 * l + 1.0) / (static_cast<double>(l) * (l + 1.0));
      t1.push_back(w * (a_[l] * ang.pi + b_[l] * ang.tau));
      t2.push_back(w * (a_[l] * ang.tau + b_[l] * ang.pi));
    }
    // reduce in ascending l
    LogSum s1, s2, block1, block2;
    const int block_start = n - std::max(10, n / 8);
    for (int i = 0; i < n; ++i) {
      s1.add(t1[i]);
      s2.add(t2[i]);
      if (i >= block_start) {
        block1.add(t1[i]);
        block2.add(t2[i]);
      }
    }
    auto small = [tol](LogScaled block, LogScaled total) {
      if (block.is_zero()) return true;
      if (total.is_zero()) return false;
      return block.log_magnitude - total.log_magnitude < std::log(tol);
    };
    if (small(block1.value(), s1.value()) && small(block2.value(), s2.value())) {
      return {s1.value(), s2.value(), n};
    }
    if (n >= kMaxPartialWaves) throw_nonconvergence("Mie series did not converge");
    n = std::min(2 * n, kMaxPartialWaves);
  }
}

MieCoefficients mie_coefficients(int ell, double x, double eps) {
  MieSphere sphere(x, eps);
  return sphere.coefficients(ell);
}

// ---------------------------------------------------------------------------
// zero frequency

ZeroFrequencySphere::ZeroFrequencySphere(double radius, const DielectricModel& model)
    : radius_(radius), model_(model) {
  if (!(radius > 0.0)) throw_domain("ZeroFrequencySphere: radius must be positive");
}

void ZeroFrequencySphere::ensure_plasma(int l_max) {
  if (static_cast<int>(plasma_ratio_.size()) > l_max + 1) return;
  const double w = std::get<Plasma>(model_).plasma_frequency * radius_ / constants::c;
  plasma_ratio_ = modified_bessel_i_ratios(w, 2 * l_max + 2);
}

double ZeroFrequencySphere::te_factor(int ell) {
  if (std::holds_alternative<PerfectReflector>(model_)) return 1.0;
  if (const auto* p = std::get_if<Plasma>(&model_)) {
    ensure_plasma(ell + 1);
    const double w = p->plasma_frequency * radius_ / constants::c;
    const double wr = w * plasma_ratio_[ell + 1];
    return wr / (2.0 * ell + 1.0 + wr);
  }
  return 0.0;
}

double ZeroFrequencySphere::tm_factor(int ell) const {
  if (const auto* d = std::get_if<Dielectric>(&model_)) {
    return (d->eps0 - 1.0) / (d->eps0 + (ell + 1.0) / ell);
  }
  return 1.0;
}

MieAmplitudes ZeroFrequencySphere::series(double y) {
  if (!(y >= 0.0)) throw_domain("zero-frequency series: y must be >= 0");
  if (y == 0.0) return {};

  const bool perfect = std::holds_alternative<PerfectReflector>(model_);
  const bool te_zero = std::holds_alternative<Drude>(model_) || std::holds_alternative<Dielectric>(model_);
  const bool tm_unit = !std::holds_alternative<Dielectric>(model_);

  MieAmplitudes out;
  // closed forms: sum y^{2l}/(2l)! = cosh y - 1,
  // sum l/(l+1) y^{2l}/(2l)! = cosh y - 2 sinh(y)/y + 2 (cosh y - 1)/y^2
  if (tm_unit && y > 1e-4) {
    const double h = y / 2.0;
    const double log_sinh_h = h < 20.0 ? std::log(std::sinh(h)) : h - std::log(2.0) + std::log1p(-std::exp(-2.0 * h));
    out.s2 = LogScaled::from_log(1, std::log(2.0) + 2.0 * log_sinh_h);
  }
  if (perfect && y >= 2.0) {
    const double e1 = std::exp(-y);
    const double e2 = e1 * e1;
    const double scaled = 0.5 * (1.0 + e2) - (1.0 - e2) / y + (1.0 + e2 - 2.0 * e1) / (y * y);
    out.s1 = LogScaled::from_log(-1, y + std::log(scaled));
  }
  const bool need_te = !te_zero && out.s1.is_zero();
  const bool need_tm = out.s2.is_zero();
  if (!need_te && !need_tm) return out;

  // Generic series, summed outward from the peak at 2l ~ y.
  const double log_y = std::log(y);
  const int peak = std::max(1, static_cast<int>(y / 2.0));
  auto log_base = [&](int l) { return 2.0 * l * log_y - std::lgamma(2.0 * l + 1.0); };
  LogSum te;
  LogSum tm;
  auto add = [&](int l, double lb) {
    if (need_te) {
      const double g = (static_cast<double>(l) / (l + 1.0)) * te_factor(l);
      if (g != 0.0) te.add(LogScaled::from_log(-1, lb + std::log(g)));
    }
    if (need_tm) {
      const double g = tm_factor(l);
      if (g != 0.0) tm.add(LogScaled::from_log(1, lb + std::log(g)));
    }
  };
  const double cutoff = std::log(1e-18);
  const double peak_log = log_base(peak);
  double lb = peak_log;
  for (int l = peak;; ++l) {
    add(l, lb);
    if (lb - peak_log < cutoff + std::log(1.0 / (1.0 + l))) break;
    lb += 2.0 * log_y - std::log((2.0 * l + 1.0) * (2.0 * l + 2.0));
  }
  lb = peak_log;
  for (int l = peak - 1; l >= 1; --l) {
    lb -= 2.0 * log_y - std::log((2.0 * l + 1.0) * (2.0 * l + 2.0));
    add(l, lb);
    if (lb - peak_log < cutoff) break;
  }
  if (need_te) out.s1 = te.value();
  if (need_tm) out.s2 = tm.value();
  return out;
}

MieAmplitudes ZeroFrequencySphere::amplitudes_over_xi(double kappa_eff) {
  auto s = series(2.0 * radius_ * kappa_eff);
  const double scale = radius_ / constants::c;
  s.s1 = s.s1 * scale;
  s.s2 = s.s2 * scale;
  return s;
}

}  // namespace casimir
