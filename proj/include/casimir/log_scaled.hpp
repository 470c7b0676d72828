#pragma once

#include <cmath>
#include <limits>

namespace casimir {

// sign * exp(log_magnitude). Zero is sign == 0.
struct LogScaled {
  int sign = 0;
  double log_magnitude = -std::numeric_limits<double>::infinity();

  static LogScaled zero() { return {}; }

  static LogScaled from_double(double v) {
    if (v == 0.0) return {};
    return {v > 0 ? 1 : -1, std::log(std::abs(v))};
  }

  static LogScaled from_log(int sign, double log_magnitude) {
    if (sign == 0) return {};
    return {sign, log_magnitude};
  }

  bool is_zero() const { return sign == 0; }

  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }

  // Value times exp(-shift); the caller picks the shift that keeps it finite.
  double scaled(double shift) const {
    return sign == 0 ? 0.0 : sign * std::exp(log_magnitude - shift);
  }

  LogScaled operator-() const { return {-sign, log_magnitude}; }
};

inline LogScaled operator*(LogScaled a, LogScaled b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.log_magnitude + b.log_magnitude};
}

inline LogScaled operator*(LogScaled a, double b) { return a * LogScaled::from_double(b); }
inline LogScaled operator*(double a, LogScaled b) { return LogScaled::from_double(a) * b; }

inline LogScaled operator/(LogScaled a, LogScaled b) {
  if (a.sign == 0) return {};
  return {a.sign * b.sign, a.log_magnitude - b.log_magnitude};
}

inline LogScaled operator+(LogScaled a, LogScaled b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_magnitude < b.log_magnitude) std::swap(a, b);
  const double rest = std::exp(b.log_magnitude - a.log_magnitude);
  const double m = (a.sign == b.sign) ? 1.0 + rest : 1.0 - rest;
  if (m == 0.0) return {};
  return {m > 0 ? a.sign : -a.sign, a.log_magnitude + std::log(std::abs(m))};
}

inline LogScaled operator-(LogScaled a, LogScaled b) { return a + (-b); }

// Accumulates many terms relative to the running maximum exponent, in the
// order they are added.
class LogSum {
 public:
  void add(LogScaled t) {
    if (t.sign == 0) return;
    if (!started_) {
      ref_ = t.log_magnitude;
      started_ = true;
    } else if (t.log_magnitude > ref_) {
      const double f = std::exp(ref_ - t.log_magnitude);
      sum_ *= f;
      comp_ *= f;
      ref_ = t.log_magnitude;
    }
    // Kahan-compensated in the scaled frame.
    const double y = t.sign * std::exp(t.log_magnitude - ref_) - comp_;
    const double s = sum_ + y;
    comp_ = (s - sum_) - y;
    sum_ = s;
  }

  LogScaled value() const {
    if (!started_ || sum_ == 0.0) return {};
    return {sum_ > 0 ? 1 : -1, ref_ + std::log(std::abs(sum_))};
  }

 private:
  bool started_ = false;
  double ref_ = 0.0;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace casimir
