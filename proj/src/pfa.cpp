#include "casimir/pfa.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "casimir/constants.hpp"
#include "casimir/dilog.hpp"
#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

constexpr std::array<Polarization, 2> kPolarizations = {Polarization::TE, Polarization::TM};

double select(const FresnelPair& r, Polarization p) { return p == Polarization::TE ? r.r_te : r.r_tm; }

// Fresnel coefficient of a plate at t = xi L / c and u = kappa L.
double plate_reflection(const DielectricModel& model, Polarization p, double t, double u, double gap) {
  // below t ~ 1e-60 the frequency is indistinguishable from zero
  if (t < 1e-60) {
    const double kappa = std::max(u, std::numeric_limits<double>::min()) / gap;
    return select(fresnel_zero_freq(model, kappa), p);
  }
  const double eps = permittivity(model, t * constants::c / gap);
  return select(fresnel_from_cosine(eps, std::max(u / t, 1.0)), p);
}

double reflection_product(const MaterialPair& m, Polarization p, double t, double u, double gap) {
  const double r1 = plate_reflection(m.first, p, t, u, gap);
  if (r1 == 0.0) return 0.0;
  return std::min(r1 * plate_reflection(m.second, p, t, u, gap), 1.0);
}

// log(1 - rr e^{-2u}) = log((1 - rr) - rr expm1(-2u)) for 0 <= rr <= 1
double log_one_minus(double rr, double u) {
  if (rr == 0.0) return 0.0;
  if (rr < 0.0 || rr * std::exp(-2.0 * u) < 0.5) return std::log1p(-rr * std::exp(-2.0 * u));
  return std::log((1.0 - rr) - rr * std::expm1(-2.0 * u));
}

QuadResult phi_quad(Polarization p, double t, double gap, const MaterialPair& m, double tol) {
  auto f = [&](double u) {
    const double rr = reflection_product(m, p, t, u, gap);
    if (rr == 0.0) return 0.0;
    return dilog(rr * std::exp(-2.0 * u));
  };
  return integrate_half_line(f, t, tol);
}

QuadResult g_quad(Polarization p, double t, double gap, const MaterialPair& m, double tol) {
  auto f = [&](double u) { return u * log_one_minus(reflection_product(m, p, t, u, gap), u); };
  return integrate_half_line(f, t, tol);
}

QuadResult both_polarizations(QuadResult (*q)(Polarization, double, double, const MaterialPair&, double),
                              double t, double gap, const MaterialPair& m, double tol) {
  QuadResult out{0.0, 0.0};
  for (auto p : kPolarizations) {
    const auto r = q(p, t, gap, m, tol);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

struct SumResult {
  double value;
  double error;
  int n_max;
};

// sum'_n f(t_n): n = 0 once, n >= 1 twice.
template <class F>
SumResult matsubara_sum(const ThermalSpec& th, double gap, const PfaOptions& opt, F&& f) {
  if (!(th.temperature > 0.0)) throw_domain("Matsubara sum needs T > 0");
  const double dt = th.matsubara(1) * gap / constants::c;
  CompensatedSum sum;
  double err = 0.0;
  constexpr int kMaxTerms = 10'000'000;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double t = n * dt;
    const QuadResult r = f(t);
    const double w = n == 0 ? 1.0 : 2.0;
    sum.add(w * r.value);
    err += w * r.error;
    const double term = std::abs(w * r.value);
    const double total = std::abs(sum.value());
    if (n >= 1 && t > opt.min_t_cutoff && term <= opt.matsubara_tol * total) {
      // geometric tail, terms decay at least like e^{-2 dt}
      const double q = std::exp(-2.0 * dt);
      err += term * q / (1.0 - q);
      return {sum.value(), err, n};
    }
  }
  throw_nonconvergence("Matsubara sum did not converge");
}

// Chebyshev interpolant of degree kChebDegree on [a, b].
constexpr int kChebNodes = 25;

struct ChebPanel {
  double a;
  double b;
  std::array<double, kChebNodes> c;

  double operator()(double t) const {
    const double x = (2.0 * t - a - b) / (b - a);
    double b1 = 0.0, b2 = 0.0;
    for (int j = kChebNodes - 1; j >= 1; --j) {
      const double tmp = 2.0 * x * b1 - b2 + c[j];
      b2 = b1;
      b1 = tmp;
    }
    return x * b1 - b2 + c[0];
  }
};

template <class F>
ChebPanel chebyshev_fit(double a, double b, F&& f) {
  std::array<double, kChebNodes> vals{};
  for (int k = 0; k < kChebNodes; ++k) {
    const double x = std::cos(constants::pi * (k + 0.5) / kChebNodes);
    vals[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
  }
  ChebPanel p{a, b, {}};
  for (int j = 0; j < kChebNodes; ++j) {
    double s = 0.0;
    for (int k = 0; k < kChebNodes; ++k) s += vals[k] * std::cos(constants::pi * j * (k + 0.5) / kChebNodes);
    p.c[j] = (j == 0 ? 1.0 : 2.0) * s / kChebNodes;
  }
  return p;
}

// int_0^inf cos(omega t) g(t) dt with g given panel-wise; each panel is split
// into pieces no longer than half a period and integrated by Gauss-Legendre.
double cosine_transform(const std::vector<ChebPanel>& panels, double omega) {
  const auto& rule = gauss_legendre(16);
  CompensatedSum sum;
  for (const auto& p : panels) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((p.b - p.a) * omega / constants::pi)));
    const double h = (p.b - p.a) / pieces;
    for (int s = 0; s < pieces; ++s) {
      const double lo = p.a + s * h;
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = lo + 0.5 * h * (rule.nodes[i] + 1.0);
        acc += rule.weights[i] * std::cos(omega * t) * p(t);
      }
      sum.add(0.5 * h * acc);
    }
  }
  return sum.value();
}

// Least-squares fit I_m ~ sum_k c_k m^{-k}, k = 3, 4, 5, over m in [lo, hi];
// returns the fitted sum over m > hi.
double fitted_tail(const std::vector<double>& values, int lo, int hi) {
  constexpr int kPowers[] = {3, 4, 5};
  const int rows = hi - lo + 1;
  Eigen::MatrixXd a(rows, 3);
  Eigen::VectorXd y(rows);
  for (int i = 0; i < rows; ++i) {
    const double m = lo + i;
    for (int k = 0; k < 3; ++k) a(i, k) = std::pow(m, -kPowers[k]);
    y(i) = values[lo + i - 1];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  double tail = 0.0;
  for (int k = 0; k < 3; ++k) {
    double partial = 0.0;
    for (int m = hi; m >= 1; --m) partial += std::pow(static_cast<double>(m), -kPowers[k]);
    tail += c(k) * (boost::math::zeta(static_cast<double>(kPowers[k])) - partial);
  }
  return tail;
}

void check_inputs(const Geometry& g, const MaterialPair& m) {
  validate(g);
  validate(m.first);
  validate(m.second);
}

}  // namespace

double pfa_phi(Polarization p, double t, double gap, const MaterialPair& mats, const PfaOptions& opt) {
  return phi_quad(p, t, gap, mats, opt.quad_tol).value;
}

double pfa_g(Polarization p, double t, double gap, const MaterialPair& mats, const PfaOptions& opt) {
  return g_quad(p, t, gap, mats, opt.quad_tol).value;
}

double tr_m_r_pfa(Polarization p, int r, double xi, double gap, double r_eff, const MaterialPair& mats,
                  const PfaOptions& opt) {
  if (r < 1) throw_domain("tr_m_r_pfa: r must be >= 1");
  if (!(gap > 0.0) || !(xi >= 0.0)) throw_domain("tr_m_r_pfa: need gap > 0 and xi >= 0");
  const double t = xi * gap / constants::c;
  auto f = [&](double u) {
    const double rr = reflection_product(mats, p, t, u, gap);
    if (rr == 0.0) return 0.0;
    return std::pow(rr, r) * std::exp(-2.0 * r * u);
  };
  const auto q = integrate_half_line(f, t, opt.quad_tol);
  return r_eff / (2.0 * r * gap) * q.value;
}

double tr_m_r_pfa(int r, double xi, double gap, double r_eff, const MaterialPair& mats, const PfaOptions& opt) {
  double s = 0.0;
  for (auto p : kPolarizations) s += tr_m_r_pfa(p, r, xi, gap, r_eff, mats, opt);
  return s;
}

PfaValue free_energy(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th, const PfaOptions& opt) {
  check_inputs(g, mats);
  const auto s = matsubara_sum(th, g.gap, opt, [&](double t) {
    return both_polarizations(phi_quad, t, g.gap, mats, opt.quad_tol);
  });
  const double pre = -constants::k_B * th.temperature * g.r_eff() / (4.0 * g.gap);
  return {pre * s.value, std::abs(pre) * s.error, s.n_max};
}

PfaValue free_energy_zero_T(const Geometry& g, const MaterialPair& mats, const PfaOptions& opt) {
  check_inputs(g, mats);
  double inner_err = 0.0;
  const auto q = integrate_half_line(
      [&](double t) {
        const auto r = both_polarizations(phi_quad, t, g.gap, mats, opt.quad_tol);
        inner_err = std::max(inner_err, r.error);
        return r.value;
      },
      0.0, 10.0 * opt.quad_tol);
  const double pre = -g.r_eff() * constants::hbar * constants::c / (4.0 * constants::pi * g.gap * g.gap);
  return {pre * q.value, std::abs(pre) * (q.error + inner_err), 0};
}

PfaValue free_energy_mercator(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                              const PfaOptions& opt) {
  check_inputs(g, mats);
  const auto s = matsubara_sum(th, g.gap, opt, [&](double t) -> QuadResult {
    const double xi = t * constants::c / g.gap;
    CompensatedSum sum;
    double last = 0.0;
    constexpr int kMaxRoundTrips = 5000;
    for (int r = 1; r <= kMaxRoundTrips; ++r) {
      last = tr_m_r_pfa(r, xi, g.gap, g.r_eff(), mats, opt) / r;
      sum.add(last);
      if (std::abs(last) <= 1e-16 * std::abs(sum.value())) return {sum.value(), std::abs(last)};
      if (last == 0.0) return {sum.value(), 0.0};
    }
    // algebraic tail C r^{-3} (|r_p| -> 1 as kappa -> 0 at xi = 0), summed by
    // Euler-Maclaurin: sum_{r > N} r^{-3} = 1/(2N^2) - 1/(2N^3) + 1/(4N^4) + ...
    const double n = kMaxRoundTrips;
    const double tail = last * n * n * n * (0.5 / (n * n) - 0.5 / (n * n * n) + 0.25 / (n * n * n * n));
    sum.add(tail);
    return {sum.value(), std::abs(tail) / n};
  });
  const double pre = -0.5 * constants::k_B * th.temperature;
  return {pre * s.value, std::abs(pre) * s.error, s.n_max};
}

PfaValue plate_free_energy(double gap, const MaterialPair& mats, const ThermalSpec& th, const PfaOptions& opt) {
  if (!(gap > 0.0)) throw_domain("plate_free_energy: gap must be positive");
  if (th.temperature == 0.0) {
    double inner_err = 0.0;
    const auto q = integrate_half_line(
        [&](double t) {
          const auto r = both_polarizations(g_quad, t, gap, mats, opt.quad_tol);
          inner_err = std::max(inner_err, r.error);
          return r.value;
        },
        0.0, 10.0 * opt.quad_tol);
    const double pre = constants::hbar * constants::c / (4.0 * constants::pi * constants::pi * gap * gap * gap);
    return {pre * q.value, std::abs(pre) * (q.error + inner_err), 0};
  }
  if (!(th.temperature > 0.0)) throw_domain("temperature must be >= 0");
  const auto s = matsubara_sum(th, gap, opt, [&](double t) {
    return both_polarizations(g_quad, t, gap, mats, opt.quad_tol);
  });
  const double pre = constants::k_B * th.temperature / (4.0 * constants::pi * gap * gap);
  return {pre * s.value, std::abs(pre) * s.error, s.n_max};
}

PfaValue force(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th, const PfaOptions& opt) {
  check_inputs(g, mats);
  auto pp = plate_free_energy(g.gap, mats, th, opt);
  const double pre = 2.0 * constants::pi * g.r_eff();
  return {pre * pp.value, pre * pp.est_error, pp.n_max_used};
}

PfaValue force_from_energy(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th, double rel_step,
                           const PfaOptions& opt) {
  check_inputs(g, mats);
  const double h = rel_step * g.gap;
  auto energy = [&](double gap) {
    Geometry gg = g;
    gg.gap = gap;
    return th.temperature == 0.0 ? free_energy_zero_T(gg, mats, opt) : free_energy(gg, mats, th, opt);
  };
  const auto p2 = energy(g.gap + 2.0 * h), p1 = energy(g.gap + h);
  const auto m1 = energy(g.gap - h), m2 = energy(g.gap - 2.0 * h);
  const double d = (-p2.value + 8.0 * p1.value - 8.0 * m1.value + m2.value) / (12.0 * h);
  // the second-order stencil gives a truncation estimate
  const double d2 = (p1.value - m1.value) / (2.0 * h);
  const double err = std::abs(d - d2) / 4.0 +
                     (p2.est_error + 8.0 * p1.est_error + 8.0 * m1.est_error + m2.est_error) / (12.0 * h);
  return {-d, err, std::max({p2.n_max_used, p1.n_max_used, m1.n_max_used, m2.n_max_used})};
}

PfaValue thermal_correction(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                            const PfaOptions& opt) {
  check_inputs(g, mats);
  if (!(th.temperature > 0.0)) throw_domain("thermal_correction: T must be positive");
  const double lambda = th.thermal_wavelength() / g.gap;

  // G(t) = sum_p G_p(t) on graded panels
  std::vector<double> edges = {0.0};
  for (double a = 1e-6; a < 1.0; a *= 2.0) edges.push_back(a);
  for (double a = 1.0; a <= 24.0; a += 1.0) edges.push_back(a);
  double quad_err = 0.0;
  auto g_total = [&](double t) {
    const auto r = both_polarizations(g_quad, t, g.gap, mats, opt.quad_tol);
    if (r.value != 0.0) quad_err = std::max(quad_err, std::abs(r.error / r.value));
    return r.value;
  };
  std::vector<ChebPanel> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) panels.push_back(chebyshev_fit(edges[i], edges[i + 1], g_total));

  const int m_max = std::clamp(static_cast<int>(std::ceil(3200.0 / lambda)), 64, 4096);
  std::vector<double> im(m_max);
  for (int m = 1; m <= m_max; ++m) im[m - 1] = cosine_transform(panels, m * lambda);

  auto partial = [&](int upto) {
    CompensatedSum s;
    for (int m = 1; m <= upto; ++m) s.add(im[m - 1]);
    return s.value();
  };
  // Smooth G gives I_m ~ m^{-3}, fitted below. A kink in G near t = 0 (Drude
  // TE switching on at t ~ gamma c / (omega_p^2 L)) gives a slower power that
  // drifts upwards with m. The dyadic estimate, frozen at the local power
  // from S(M/2, M] ~ 2^{1-p} S(M/4, M/2], then bounds the tail from the other
  // side, and the bracket enters the error.
  const double fitted = fitted_tail(im, m_max / 2, m_max);
  const double upper = partial(m_max) - partial(m_max / 2);
  const double lower = partial(m_max / 2) - partial(m_max / 4);
  double dyadic = std::numeric_limits<double>::infinity();
  if (upper != 0.0 && lower != 0.0 && (upper > 0.0) == (lower > 0.0) && std::abs(upper) < std::abs(lower)) {
    const double power = 1.0 + std::log2(lower / upper);
    dyadic = upper / (std::pow(2.0, power - 1.0) - 1.0);
  }
  const double total = partial(m_max) + fitted;
  const double coarse = partial(m_max / 2) + fitted_tail(im, m_max / 4, m_max / 2);

  const double pre = constants::hbar * constants::c * g.r_eff() / (constants::pi * std::pow(g.gap, 3));
  // G carries a relative quadrature error of about quad_err; I_m inherits it
  const double err = std::abs(total - coarse) + std::abs(dyadic - fitted) + quad_err * std::abs(total);
  return {pre * total, std::abs(pre) * err, 0};
}

PfaValue thermal_correction_direct(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th,
                                   const PfaOptions& opt) {
  const auto ft = force(g, mats, th, opt);
  const auto f0 = force(g, mats, ThermalSpec{0.0}, opt);
  return {ft.value - f0.value, ft.est_error + f0.est_error, ft.n_max_used};
}

double thermal_kappa_support(const Geometry& g, const MaterialPair& mats, const ThermalSpec& th, double fraction) {
  check_inputs(g, mats);
  if (!(th.temperature > 0.0)) throw_domain("thermal_kappa_support: T must be positive");
  if (!(fraction > 0.0 && fraction < 1.0)) throw_domain("thermal_kappa_support: fraction in (0, 1)");
  // m = 1 term with the orders of integration swapped:
  //   I_1 = int_0^inf du w(u),  w(u) = int_0^u dt cos(Lambda t) h(t, u),
  //   h = sum_p u log(1 - r r e^{-2u}).
  // The u-integral converges through the oscillation of w, so its support is
  // measured with an Abel cutoff: D(K) = int du w(u) e^{-u/K}.
  const double omega = th.thermal_wavelength() / g.gap;
  const auto& rule = gauss_legendre(8);
  auto h = [&](double t, double u) {
    double s = 0.0;
    for (auto p : kPolarizations) s += u * log_one_minus(reflection_product(mats, p, t, u, g.gap), u);
    return s;
  };
  auto w = [&](double u) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(u * omega / constants::pi)));
    const double step = u / pieces;
    double acc = 0.0;
    for (int s = 0; s < pieces; ++s) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = step * (s + 0.5 * (rule.nodes[i] + 1.0));
        acc += 0.5 * step * rule.weights[i] * std::cos(omega * t) * h(t, u);
      }
    }
    return acc;
  };

  std::vector<double> edges = {0.0};
  const double fine = std::min(0.1, constants::pi / omega);
  for (double a = 1e-3 * fine; a < fine; a *= 1.5) edges.push_back(a);
  for (double a = fine; a <= 8.0; a += fine) edges.push_back(a);
  std::vector<double> nodes, weights, values;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k], hi = edges[k + 1];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = lo + 0.5 * (hi - lo) * (rule.nodes[i] + 1.0);
      nodes.push_back(u);
      weights.push_back(0.5 * (hi - lo) * rule.weights[i]);
      values.push_back(w(u));
    }
  }
  auto damped = [&](double k_cut) {
    CompensatedSum s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s.add(weights[i] * values[i] * (std::isinf(k_cut) ? 1.0 : std::exp(-nodes[i] / k_cut)));
    }
    return s.value();
  };
  const double total = damped(std::numeric_limits<double>::infinity());
  // scan the cutoff downwards on a geometric grid
  double k_cut = 1e3 / omega;
  double settled = k_cut;
  while (k_cut > 1e-4 / omega) {
    if (std::abs(damped(k_cut) - total) > (1.0 - fraction) * std::abs(total)) break;
    settled = k_cut;
    k_cut /= 1.05;
  }
  return settled / g.gap;
}

EffectiveAreaEstimate effective_area(const Geometry& g, const ThermalSpec& th) {
  validate(g);
  const double r1 = std::min(g.r1, g.r2);
  const double lt = th.thermal_wavelength();
  EffectiveAreaEstimate e{};
  e.delta_k = 1.0 / std::sqrt(g.gap * r1);
  e.theta_cap = std::sqrt(g.gap / r1);
  e.cap_diameter = std::sqrt(r1 * g.gap);
  e.area = r1 * g.gap;
  e.cap_diameter_thermal = std::sqrt(r1 * lt);
  e.area_thermal = r1 * lt;
  return e;
}

}  // namespace casimir
