#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>

namespace hardgrid {

/*!
 * A non-negative quantity stored as its natural logarithm.
 *
 * Exact zero is represented by a logarithm of -inf. Addition is log-sum-exp
 * with max shift; multiplication and division add and subtract logarithms.
 */
class LogWeight {
 public:
  constexpr LogWeight() noexcept = default;

  static constexpr LogWeight zero() noexcept { return LogWeight(-std::numeric_limits<double>::infinity()); }
  static constexpr LogWeight one() noexcept { return LogWeight(0.0); }
  static constexpr LogWeight from_log(double log_value) noexcept { return LogWeight(log_value); }
  static LogWeight from_linear(double value) noexcept {
    return value == 0.0 ? zero() : LogWeight(std::log(value));
  }

  constexpr double log() const noexcept { return log_; }
  double linear() const noexcept { return std::exp(log_); }
  constexpr bool is_zero() const noexcept { return log_ == -std::numeric_limits<double>::infinity(); }

  friend LogWeight operator+(LogWeight a, LogWeight b) noexcept {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = a.log_ > b.log_ ? a.log_ : b.log_;
    const double lo = a.log_ > b.log_ ? b.log_ : a.log_;
    return LogWeight(hi + std::log1p(std::exp(lo - hi)));
  }
  friend LogWeight operator*(LogWeight a, LogWeight b) noexcept {
    if (a.is_zero() || b.is_zero()) return zero();
    return LogWeight(a.log_ + b.log_);
  }
  friend LogWeight operator/(LogWeight a, LogWeight b) noexcept {
    if (a.is_zero()) return zero();
    return LogWeight(a.log_ - b.log_);
  }
  LogWeight& operator+=(LogWeight other) noexcept { return *this = *this + other; }
  LogWeight& operator*=(LogWeight other) noexcept { return *this = *this * other; }

  friend constexpr auto operator<=>(LogWeight a, LogWeight b) noexcept { return a.log_ <=> b.log_; }
  friend constexpr bool operator==(LogWeight a, LogWeight b) noexcept { return a.log_ == b.log_; }

 private:
  constexpr explicit LogWeight(double log_value) noexcept : log_(log_value) {}

  double log_ = -std::numeric_limits<double>::infinity();
};

/// ln(sum_i exp(values[i])); -inf for an empty span.
inline double log_sum_exp(std::span<const double> values) noexcept {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = v > hi ? v : hi;
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

}  // namespace hardgrid
