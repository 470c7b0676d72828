#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace casimir {

// Kahan-Babuska compensated accumulator; order of `add` calls fixes the result.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule (Newton iteration on the Legendre recurrence).
// Rules are cached; the returned reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

struct QuadResult {
  double value;
  double error;  // estimate reported by the rule
};

// Double-exponential rules. `f` must be finite on the open interval.
QuadResult integrate_half_line(const std::function<double(double)>& f, double a, double tol);
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace casimir
