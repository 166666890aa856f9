#pragma once

#include "ccqed/log_complex.hpp"

namespace ccqed {

/// Stopping rule shared by the confluent hypergeometric series.
struct SeriesControl {
  double relative_tolerance = 1e-14;
  int consecutive_small_terms = 3;
  int max_terms = 100000;
};

/// log Gamma(z) on the branch that is continuous in the cut plane
/// C \ (-inf, 0] (the usual "loggamma" branch). exp() of the result is
/// Gamma(z). Throws DomainError at the poles z = 0, -1, -2, ...
Complex log_gamma(Complex z);

/// Kummer's confluent hypergeometric function 1F1(a; b; z), summed from its
/// power series with term ratio (a+k)/(b+k) * z/(k+1). The series is cut when
/// |term|/|partial sum| stays below the tolerance for the configured number of
/// consecutive terms. Terminates exactly when a is a non-positive integer.
///
/// Throws DomainError when b is a pole not cancelled by an earlier
/// termination, and ConvergenceError when the term cap is reached.
LogComplex kummer_1f1(Complex a, Complex b, double z, const SeriesControl& control = {});
LogComplex kummer_1f1(Complex a, Complex b, Complex z, const SeriesControl& control = {});

/// Tricomi's confluent hypergeometric function U(a, b, z) for real b.
///
/// Non-positive integer a (or a - b + 1) is evaluated as the terminating
/// polynomial; anything else goes through the two-1F1 connection formula,
/// which is singular for integer b and throws DomainError there.
LogComplex tricomi_u(Complex a, double b, Complex z);

/// Gamma(theta+1) / (Gamma(k+1) Gamma(theta-k+1)). Exact for integer theta;
/// returns zero when theta-k+1 sits on a pole of Gamma while theta+1 does not.
LogComplex complex_binomial(Complex theta, int k);

/// True if z is (to rounding) one of 0, -1, -2, ...
bool is_nonpositive_integer(Complex z);

}  // namespace ccqed
