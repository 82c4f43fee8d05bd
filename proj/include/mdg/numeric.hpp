#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace mdg {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum_i exp(args[i])), stable against overflow. Empty input gives -inf.
inline double log_sum_exp(const std::vector<double>& args) {
  double max_arg = kNegInf;
  for (double a : args) max_arg = std::max(max_arg, a);
  if (max_arg == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - max_arg);
  return max_arg + std::log(sum);
}

/// exp(x) with explicit flush to exact 0 below the double underflow threshold.
inline double exp_or_zero(double x) { return x < -745.0 ? 0.0 : std::exp(x); }

/// r^a as exp(a * ln r) for r in [0, 1], flushing underflow to exact 0.
inline double pow_ratio(double r, double a) {
  if (r <= 0.0) return a > 0.0 ? 0.0 : 1.0;
  if (r >= 1.0 || a == 0.0) return 1.0;
  return exp_or_zero(a * std::log(r));
}

/// A real number carried as (sign, log|value|); keeps double-exponential
/// magnitudes representable after the linear value underflows.
struct LogSigned {
  int sign = 0;        // -1, 0, +1
  double log_abs = kNegInf;

  static LogSigned from_log(double log_value, int s = 1) {
    if (log_value == kNegInf) return {};
    return {s, log_value};
  }
  static LogSigned from_value(double v) {
    if (v == 0.0) return {};
    return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
  }
  double value() const { return sign == 0 ? 0.0 : sign * exp_or_zero(log_abs); }
};

inline LogSigned operator+(const LogSigned& a, const LogSigned& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const LogSigned& hi = a.log_abs >= b.log_abs ? a : b;
  const LogSigned& lo = a.log_abs >= b.log_abs ? b : a;
  const double ratio = std::exp(lo.log_abs - hi.log_abs);  // in [0, 1]
  if (hi.sign == lo.sign) return {hi.sign, hi.log_abs + std::log1p(ratio)};
  if (ratio >= 1.0) return {};  // exact cancellation
  return {hi.sign, hi.log_abs + std::log1p(-ratio)};
}

inline LogSigned operator-(const LogSigned& a, const LogSigned& b) {
  return a + LogSigned{-b.sign, b.log_abs};
}

inline LogSigned operator*(const LogSigned& a, const LogSigned& b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.log_abs + b.log_abs};
}

inline LogSigned operator/(const LogSigned& a, const LogSigned& b) {
  if (a.sign == 0) return {};
  return {a.sign * b.sign, a.log_abs - b.log_abs};
}

}  // namespace mdg
