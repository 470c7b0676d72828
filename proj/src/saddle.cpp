#include "casimir/saddle.hpp"

#include <algorithm>
#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

SaddleMatrix build_m_r(int r, double mu) {
  if (r < 1) throw_domain("build_m_r: r must be >= 1");
  if (!(mu >= 0.0 && mu <= 0.5)) throw_domain("build_m_r: mu must lie in [0, 1/2]");
  SaddleMatrix m;
  m.r = r;
  m.mu = mu;
  const int n = 2 * r;
  m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return m.entries[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i) {
    at(i, i) = 1.0;
    const int j = (i + 1) % n;
    const double c = (i % 2 == 0) ? -(1.0 - mu) : -mu;
    at(i, j) += c;
    at(j, i) += c;
  }
  return m;
}

std::vector<double> eigenvalues(int r, double mu) {
  if (r < 1) throw_domain("eigenvalues: r must be >= 1");
  std::vector<double> out;
  out.reserve(2 * r);
  for (int j = 0; j < r; ++j) {
    const double s = std::sin(constants::pi * j / r);
    const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * mu * (1.0 - mu) * s * s));
    out.push_back(1.0 + root);
    // 1 - root without cancellation
    out.push_back(4.0 * mu * (1.0 - mu) * s * s / (1.0 + root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double sine_product(int r) {
  if (r < 1) throw_domain("sine_product: r must be >= 1");
  return std::ldexp(static_cast<double>(r), 1 - r);
}

double sine_product_direct(int r) {
  if (r < 1) throw_domain("sine_product: r must be >= 1");
  double p = 1.0;
  for (int j = 1; j < r; ++j) p *= std::sin(constants::pi * j / r);
  return p;
}

double hessian_nonzero_product(int r, double mu, double r1, double r2, double k_star,
                               double kappa_star) {
  if (r < 1) throw_domain("hessian_nonzero_product: r must be >= 1");
  if (!(k_star > 0.0)) throw_domain("hessian_nonzero_product: k_star must be positive");
  if (!(mu > 0.0 && mu <= 0.5)) throw_domain("hessian_nonzero_product: mu must lie in (0, 1/2]");
  const double r_eff = r1 * r2 / (r1 + r2);
  const double base = 4.0 * kappa_star * kappa_star / (k_star * k_star * r1 * r2);
  return r_eff / (4.0 * r * r) * (k_star / kappa_star) * std::pow(base, r);
}

double hessian_nonzero_product_numeric(int r, double mu, double r1, double r2, double k_star,
                                       double kappa_star) {
  const auto m = build_m_r(r, mu);
  const double scale_k = (r1 + r2) / (2.0 * kappa_star);
  const double scale_phi = scale_k * k_star * k_star;
  auto ev = symmetric_eigenvalues(m.entries, m.size());
  // one zero mode per block; the rest are positive
  double log_prod = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    log_prod += std::log(scale_k * ev[i]) + std::log(scale_phi * ev[i]);
  }
  return std::exp(-0.5 * log_prod);
}

}  // namespace casimir
