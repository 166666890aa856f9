#include "ccqed/specfun.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "ccqed/errors.hpp"

namespace ccqed {
namespace {

using LongComplex = std::complex<long double>;

// Lanczos approximation, g = 7, nine terms (Godfrey's coefficients).
constexpr long double kLanczosG = 7.0L;
constexpr std::array<long double, 9> kLanczosCoefficients = {
    0.99999999999980993227684700473478L,  676.520368121885098567009190444019L,
    -1259.13921672240287047156078755283L, 771.3234287776530788486528258894L,
    -176.61502916214059906584551354L,     12.507343278686904814458936853L,
    -0.13857109526572011689554707L,       9.984369578019570859563e-6L,
    1.50563273514931155834e-7L};
constexpr long double kHalfLog2Pi = 0.918938533204672741780329736405617639861L;
constexpr long double kLogPi = 1.14472988584940017414342735135305871164729L;
constexpr long double kPi = 3.14159265358979323846264338327950288419717L;

LongComplex lanczos_log_gamma(LongComplex z) {
  z -= 1.0L;
  LongComplex series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i)
    series += kLanczosCoefficients[i] / (z + static_cast<long double>(i));
  const LongComplex t = z + kLanczosG + 0.5L;
  return kHalfLog2Pi + (z + 0.5L) * std::log(t) - t + std::log(series);
}

// log sin(pi z) continued analytically off the real axis, so that the
// reflection formula lands on the same branch as the direct evaluation.
LongComplex log_sin_pi(LongComplex z) {
  const LongComplex i{0.0L, 1.0L};
  const long double log2 = 0.693147180559945309417232121458176568L;
  if (z.imag() > 0.0L) {
    return -log2 + i * (kPi / 2.0L) - i * kPi * z + std::log(1.0L - std::exp(2.0L * i * kPi * z));
  }
  return -log2 - i * (kPi / 2.0L) + i * kPi * z + std::log(1.0L - std::exp(-2.0L * i * kPi * z));
}

LogComplex to_log_complex(Complex log_value) {
  return LogComplex::from_log_polar(log_value.real(), log_value.imag());
}

std::string describe(Complex z) {
  std::ostringstream out;
  out.precision(17);
  out << "(" << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i)";
  return out.str();
}

int as_nonpositive_int(Complex z) { return static_cast<int>(-std::lround(z.real())); }

// U(-n, b, z) = sum_k C(n,k) (b+k)_{n-k} (-1)^{n-k} z^k, summed from k = n
// downwards relative to z^n so that zero factors (b + k = 0) simply cut the
// lower terms. Long double absorbs the cancellation between terms.
LogComplex tricomi_polynomial(int n, double b, Complex z) {
  const LongComplex zl{z.real(), z.imag()};
  LongComplex term{1.0L, 0.0L};
  LongComplex sum = term;
  long double log_scale = 0.0L;
  for (int k = n - 1; k >= 0; --k) {
    term *= -(static_cast<long double>(k + 1) / (n - k)) * (static_cast<long double>(b) + k) / zl;
    sum += term;
    if (std::abs(term) > 1e1000L || std::abs(sum) > 1e1000L) {
      term *= 1e-1000L;
      sum *= 1e-1000L;
      log_scale += 1000.0L * std::log(10.0L);
    }
  }
  LogComplex result = LogComplex::from_complex(Complex{static_cast<double>(sum.real()), static_cast<double>(sum.imag())});
  if (result.is_zero()) return result;
  result.log_magnitude += static_cast<double>(log_scale);
  return result * LogComplex::from_complex(z).pow(n);
}

}  // namespace

bool is_nonpositive_integer(Complex z) {
  if (z.imag() != 0.0 || z.real() > 0.0) return false;
  const double nearest = std::round(z.real());
  return std::abs(z.real() - nearest) <= 1e-14 * std::max(1.0, std::abs(nearest));
}

Complex log_gamma(Complex z) {
  if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole of Gamma at z = " + describe(z));

  const LongComplex zl{z.real(), z.imag()};
  LongComplex result;
  if (z.real() >= 0.5) {
    result = lanczos_log_gamma(zl);
  } else if (z.imag() == 0.0) {
    const long double x = z.real();
    const long double magnitude =
        kLogPi - std::log(std::abs(std::sin(kPi * x))) - lanczos_log_gamma(LongComplex{1.0L - x, 0.0L}).real();
    result = {magnitude, -kPi * std::ceil(-x)};
  } else {
    result = kLogPi - log_sin_pi(zl) - lanczos_log_gamma(1.0L - zl);
  }
  return {static_cast<double>(result.real()), static_cast<double>(result.imag())};
}

LogComplex kummer_1f1(Complex a, Complex b, double z, const SeriesControl& control) {
  return kummer_1f1(a, b, Complex{z, 0.0}, control);
}

LogComplex kummer_1f1(Complex a, Complex b, Complex z, const SeriesControl& control) {
  const bool terminates = is_nonpositive_integer(a);
  const int degree = terminates ? as_nonpositive_int(a) : -1;

  if (is_nonpositive_integer(b)) {
    const int pole = as_nonpositive_int(b);
    if (!(terminates && degree < pole)) {
      throw DomainError("kummer_1f1: b = " + describe(b) +
                        " is a pole of the series that is not cut off by a terminating a = " + describe(a));
    }
  }
  if (z == Complex{}) return LogComplex::one();
  if (a == b) return LogComplex::exp(z);

  // Kummer's transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z) turns an
  // alternating series into one with slowly rotating terms.
  if (z.real() < 0.0 && !terminates) return LogComplex::exp(z) * kummer_1f1(b - a, b, -z, control);

  // term and sum share the scale exp(log_scale).
  constexpr long double kRescaleAbove = 1e300L;
  const double log_rescale = std::log(1e300);
  const LongComplex al{a.real(), a.imag()}, bl{b.real(), b.imag()}, zl{z.real(), z.imag()};
  LongComplex term{1.0L, 0.0L};
  LongComplex sum{1.0L, 0.0L};
  double log_scale = 0.0;

  auto step = [&](int k) {
    term *= (al + static_cast<long double>(k)) / (bl + static_cast<long double>(k)) * zl / static_cast<long double>(k + 1);
    sum += term;
    if (std::abs(term) > kRescaleAbove || std::abs(sum) > kRescaleAbove) {
      term /= kRescaleAbove;
      sum /= kRescaleAbove;
      log_scale += log_rescale;
    }
  };
  auto finish = [&]() {
    LogComplex result = LogComplex::from_complex(Complex{static_cast<double>(sum.real()), static_cast<double>(sum.imag())});
    if (!result.is_zero()) result.log_magnitude += log_scale;
    return result;
  };

  if (terminates) {
    for (int k = 0; k < degree; ++k) step(k);
    return finish();
  }

  int small_run = 0;
  double ratio = 1.0;
  for (int k = 0; k < control.max_terms; ++k) {
    step(k);
    ratio = static_cast<double>(std::abs(term) / std::abs(sum));
    if (ratio < control.relative_tolerance) {
      if (++small_run >= control.consecutive_small_terms) return finish();
    } else {
      small_run = 0;
    }
  }
  const LogComplex partial = finish();
  std::ostringstream msg;
  msg << "kummer_1f1: no convergence after " << control.max_terms << " terms for a = " << describe(a)
      << ", b = " << describe(b) << ", z = " << describe(z) << " (last |term/sum| = " << ratio << ")";
  throw ConvergenceError(msg.str(), partial.log_magnitude, partial.phase, ratio);
}

LogComplex tricomi_u(Complex a, double b, Complex z) {
  if (z == Complex{}) throw DomainError("tricomi_u: z = 0 is a branch point");

  if (is_nonpositive_integer(a)) return tricomi_polynomial(as_nonpositive_int(a), b, z);

  const Complex shifted = a - b + 1.0;
  const LogComplex log_z = LogComplex::from_complex(z);
  if (is_nonpositive_integer(shifted)) {
    // U(a, b, z) = z^{1-b} U(a-b+1, 2-b, z)
    return log_z.pow(Complex{1.0 - b, 0.0}) * tricomi_polynomial(as_nonpositive_int(shifted), 2.0 - b, z);
  }

  if (b == std::round(b)) {
    std::ostringstream msg;
    msg << "tricomi_u: connection formula is singular for integer b = " << b
        << " with non-terminating a = " << describe(a)
        << "; use the terminating branch (a or a-b+1 a non-positive integer) or a limit evaluation";
    throw DomainError(msg.str());
  }

  const LogComplex first =
      to_log_complex(log_gamma(Complex{1.0 - b, 0.0}) - log_gamma(shifted)) * kummer_1f1(a, Complex{b, 0.0}, z);
  const LogComplex second = to_log_complex(log_gamma(Complex{b - 1.0, 0.0}) - log_gamma(a)) *
                            log_z.pow(Complex{1.0 - b, 0.0}) * kummer_1f1(shifted, Complex{2.0 - b, 0.0}, z);
  return first + second;
}

LogComplex complex_binomial(Complex theta, int k) {
  if (k < 0) throw DomainError("complex_binomial: k must be non-negative");
  if (k == 0) return LogComplex::one();

  const bool integer_theta = theta.imag() == 0.0 && theta.real() == std::round(theta.real());
  if (integer_theta) {
    const long double t = theta.real();
    if (t >= 0.0L && t < k) return LogComplex::zero();  // Gamma(theta-k+1) at a pole
    // C(t, j+1) = C(t, j) (t - j)/(j + 1) stays integral at every step.
    long double value = 1.0L;
    double log_scale = 0.0;
    for (int j = 0; j < k; ++j) {
      value = value * (t - j) / (j + 1);
      if (std::abs(value) > 1e300L) {
        log_scale += std::log(1e300);
        value /= 1e300L;
      }
    }
    LogComplex result = LogComplex::from_complex(Complex{static_cast<double>(value), 0.0});
    result.log_magnitude += log_scale;
    return result;
  }

  const Complex log_value = log_gamma(theta + 1.0) - log_gamma(Complex{k + 1.0, 0.0}) -
                            log_gamma(theta - static_cast<double>(k) + 1.0);
  return to_log_complex(log_value);
}

}  // namespace ccqed
