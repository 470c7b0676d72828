#include "casimir/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw_domain("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_gauss_legendre(n));
  return *slot;
}

QuadResult integrate_half_line(const std::function<double(double)>& f, double a, double tol) {
  static boost::math::quadrature::exp_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  // integrands here decay at infinity; the rule may probe points that overflow
  auto g = [&](double u) {
    const double x = a + u;
    return std::isfinite(x) ? f(x) : 0.0;
  };
  try {
    const double value = rule.integrate(g, tol, &error, &l1);
    return {value, error};
  } catch (const std::exception& e) {
    throw_nonconvergence(std::string("half-line quadrature: ") + e.what());
  }
}

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return {0.0, 0.0};
  static boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  try {
    const double value = rule.integrate(f, a, b, tol, &error, &l1);
    return {value, error};
  } catch (const std::exception& e) {
    throw_nonconvergence(std::string("interval quadrature: ") + e.what());
  }
}

}  // namespace casimir
