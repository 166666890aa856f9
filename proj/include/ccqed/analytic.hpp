#pragma once

#include "ccqed/model.hpp"
#include "ccqed/observables.hpp"
#include "ccqed/specfun.hpp"

namespace ccqed {

/// I_n = binom(Theta, 2N-n) 1F1(1+Theta, 1+Theta+n-2N; p) for 0 <= n <= 2N,
/// zero above 2N. Needs model.series (bar_delta != 0). When Theta is a
/// non-negative integer (Gamma = 0) the 1F1 has a pole for n < 2N - Theta;
/// that surfaces as a DomainError naming n.
LogComplex series_in(const EffectiveModel& model, int n);

/// Taylor coefficients a_0..a_{2N} of (tilde_Omega + bar_delta x)^Theta
/// e^{tilde_Omega^* x / bar_delta}, normalized to a_0 = 1, from the
/// three-term recurrence
///   (m+1) a_{m+1} = [((2N-1-m) bar_delta + i Gamma/2 - bar_Delta)/tilde_Omega] a_m
///                   + (tilde_Omega^*/tilde_Omega) a_{m-1}.
/// a_{2N-n} is proportional to (bar_delta/tilde_Omega)^{2N-n} I_n, and the
/// recurrence stays finite at bar_delta = 0.
std::vector<LogComplex> steady_coefficients(const EffectiveModel& model);

/// Main-series steady state (Gamma_0 = 0). Sums over n = 0..2N in ascending
/// order, stopping once terms fall below 1e-16 of the running maximum for
/// five consecutive n. Evaluated from steady_coefficients, which equals the
/// I_n sums term by term but survives p ~ 1e11.
Observables steady_observables(const EffectiveModel& model);

/// The same sums built literally from series_in. Meant for moderate p; used
/// to cross-check steady_observables.
Observables steady_observables_from_series(const EffectiveModel& model);

/// tilde_I_n = (-f)^{-n/2} U[(n+1-2N)/2, 3/2; -tilde_Gamma^2/(4f)] / (2N-n)!.
LogComplex appendix_a_series_in(const EffectiveModel& model, int n);

/// bar_delta -> 0 solution. <b^dag b> and <b^dag2 b^2> from the tilde_I_n
/// weights, <b> from branch-consistent coefficients
///   E_m = (-tilde_Gamma)^m w^{(1-m)/2} U((1-m)/2, 3/2, w) / m!,  w = -tilde_Gamma^2/(4f).
/// An undriven model (tilde_Omega = 0) returns the vacuum.
Observables appendix_a_observables(const EffectiveModel& model);

/// Linear response with the nonlinear terms dropped:
/// <b^dag b> = N|G|^2 / ((Gamma/2)^2 + N|G|^2), <b^dag2 b^2> = <b^dag b>^2,
/// g2 = 1 (also without drive). <b> takes the phase of
/// -i bar_Omega/(Gamma/2 + i bar_Delta) and modulus sqrt(<b^dag b>), i.e. a
/// coherent state with the same mean.
Observables linear_limit_observables(const EffectiveModel& model);

/// MainSeries or AppendixA according to model.branch.
Observables analytic_auto(const EffectiveModel& model);

}  // namespace ccqed
