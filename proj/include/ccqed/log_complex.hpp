#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace ccqed {

using Complex = std::complex<double>;

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phase) {
  constexpr double pi = std::numbers::pi;
  if (phase > -pi && phase <= pi) return phase;
  double wrapped = std::remainder(phase, 2.0 * pi);
  if (wrapped <= -pi) wrapped += 2.0 * pi;
  return wrapped;
}

/// A complex number z = exp(log_magnitude) * exp(i*phase).
///
/// Zero is represented by log_magnitude = -inf. Products and quotients are
/// formed by adding fields, so factors like (2p)^n/n! or Gamma(Theta+k) never
/// overflow before they are combined.
struct LogComplex {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  static LogComplex zero() { return {}; }
  static LogComplex one() { return {0.0, 0.0}; }

  static LogComplex from_log_polar(double log_magnitude, double phase) {
    return {log_magnitude, wrap_phase(phase)};
  }

  static LogComplex from_complex(Complex z) {
    if (z == Complex{}) return zero();
    return {std::log(std::abs(z)), wrap_phase(std::arg(z))};
  }

  /// exp(w) for complex w.
  static LogComplex exp(Complex w) { return from_log_polar(w.real(), w.imag()); }

  bool is_zero() const { return log_magnitude == -std::numeric_limits<double>::infinity(); }

  Complex to_complex() const {
    if (is_zero()) return {};
    return std::polar(std::exp(log_magnitude), phase);
  }

  /// The complex logarithm (principal value).
  Complex log() const { return {log_magnitude, phase}; }

  LogComplex conj() const { return is_zero() ? zero() : LogComplex{log_magnitude, wrap_phase(-phase)}; }

  LogComplex& operator*=(const LogComplex& rhs) {
    if (is_zero() || rhs.is_zero()) return *this = zero();
    log_magnitude += rhs.log_magnitude;
    phase = wrap_phase(phase + rhs.phase);
    return *this;
  }

  LogComplex& operator/=(const LogComplex& rhs) {
    if (is_zero()) return *this;
    log_magnitude -= rhs.log_magnitude;
    phase = wrap_phase(phase - rhs.phase);
    return *this;
  }

  friend LogComplex operator*(LogComplex lhs, const LogComplex& rhs) { return lhs *= rhs; }
  friend LogComplex operator/(LogComplex lhs, const LogComplex& rhs) { return lhs /= rhs; }

  /// Integer power, exact in the log representation.
  LogComplex pow(int k) const {
    if (k == 0) return one();
    if (is_zero()) return zero();
    return from_log_polar(k * log_magnitude, k * phase);
  }

  /// z^s with the principal branch of log z.
  LogComplex pow(Complex s) const {
    if (is_zero()) return zero();
    return exp(s * log());
  }
};

/// Sum of two log-represented numbers, pivoted on the larger magnitude.
inline LogComplex operator+(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double pivot = std::max(a.log_magnitude, b.log_magnitude);
  const Complex s = std::polar(std::exp(a.log_magnitude - pivot), a.phase) +
                    std::polar(std::exp(b.log_magnitude - pivot), b.phase);
  if (s == Complex{}) return LogComplex::zero();
  return {pivot + std::log(std::abs(s)), wrap_phase(std::arg(s))};
}

inline LogComplex operator-(const LogComplex& a) {
  if (a.is_zero()) return a;
  return LogComplex::from_log_polar(a.log_magnitude, a.phase + std::numbers::pi);
}

inline LogComplex operator-(const LogComplex& a, const LogComplex& b) { return a + (-b); }

/// Running sum of log-represented terms. The partial sum is held as a
/// complex mantissa relative to the largest magnitude seen so far.
class LogAccumulator {
 public:
  void add(const LogComplex& term) {
    if (term.is_zero()) return;
    if (term.log_magnitude > scale_) {
      if (scale_ != -std::numeric_limits<double>::infinity())
        mantissa_ *= std::exp(scale_ - term.log_magnitude);
      scale_ = term.log_magnitude;
    }
    mantissa_ += std::polar(std::exp(term.log_magnitude - scale_), term.phase);
  }

  /// Log-magnitude of the largest term added so far.
  double running_max() const { return scale_; }

  LogComplex value() const {
    if (mantissa_ == Complex{}) return LogComplex::zero();
    return {scale_ + std::log(std::abs(mantissa_)), wrap_phase(std::arg(mantissa_))};
  }

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  Complex mantissa_{};
};

}  // namespace ccqed
