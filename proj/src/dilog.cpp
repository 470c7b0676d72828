#include "casimir/dilog.hpp"

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

// sum x^k / k^2, |x| <= 1/2
double dilog_series(double x) {
  double term = x;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double add = term / (static_cast<double>(k) * k);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
    term *= x;
  }
  return sum;
}

}  // namespace

double dilog(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw_domain("dilog: argument must lie in [-1, 1]");
  const double pi2_6 = constants::pi * constants::pi / 6.0;
  if (x == 1.0) return pi2_6;
  if (std::abs(x) <= 0.5) return dilog_series(x);
  if (x > 0.5) {
    // Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x)
    return pi2_6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
  }
  // Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2
  const double l = std::log1p(-x);
  return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
}

}  // namespace casimir
