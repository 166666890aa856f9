#include "ccqed/analytic.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ccqed/errors.hpp"

namespace ccqed {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kNegligibleTerm = 1e-16;
constexpr int kNegligibleRun = 5;

struct MomentSums {
  LogComplex norm;    // sum w_n
  LogComplex first;   // sum n w_n
  LogComplex second;  // sum n(n-1) w_n
  LogComplex cross;   // sum base^n/n! c(n+1) c(n)^*
  int terms = 0;
  double residual = 0.0;
};

// w_n = base^n/n! |c(n)|^2 for n = 0..2N, with c(n) = 0 beyond 2N.
MomentSums accumulate(int two_n, double log_base, const std::function<LogComplex(int)>& c) {
  LogAccumulator norm, first, second, cross;
  std::vector<LogComplex> coef(static_cast<std::size_t>(two_n) + 2);
  for (int n = 0; n <= two_n; ++n) coef[n] = c(n);
  coef[two_n + 1] = LogComplex::zero();

  MomentSums out;
  int small_run = 0;
  double last_log_weight = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= two_n; ++n) {
    const double log_prefactor = n * log_base - std::lgamma(n + 1.0);
    const LogComplex& cn = coef[n];
    LogComplex weight = LogComplex::zero();
    if (!cn.is_zero()) weight = LogComplex{log_prefactor + 2.0 * cn.log_magnitude, 0.0};
    norm.add(weight);
    if (n >= 1) first.add(LogComplex{weight.log_magnitude + std::log(static_cast<double>(n)), 0.0});
    if (n >= 2) second.add(LogComplex{weight.log_magnitude + std::log(static_cast<double>(n) * (n - 1)), 0.0});
    LogComplex x = coef[n + 1] * cn.conj();
    if (!x.is_zero()) x.log_magnitude += log_prefactor;
    cross.add(x);
    out.terms = n + 1;
    last_log_weight = weight.log_magnitude;

    if (weight.log_magnitude < norm.running_max() + std::log(kNegligibleTerm)) {
      if (++small_run >= kNegligibleRun) break;
    } else {
      small_run = 0;
    }
  }
  out.norm = norm.value();
  out.first = first.value();
  out.second = second.value();
  out.cross = cross.value();
  if (out.terms <= two_n && !out.norm.is_zero()) out.residual = std::exp(last_log_weight - out.norm.log_magnitude);
  return out;
}

Observables moments_to_observables(const MomentSums& s, const LogComplex& amplitude_prefactor, Branch branch,
                                   int n_emitters) {
  if (s.norm.is_zero() || !std::isfinite(s.norm.log_magnitude)) {
    std::ostringstream msg;
    msg << "normalization Z left the representable range (log Z = " << s.norm.log_magnitude << " after "
        << s.terms << " terms)";
    throw NumericalRangeError(msg.str());
  }
  Observables obs;
  obs.branch = branch;
  obs.terms_used = s.terms;
  obs.truncation_residual = s.residual;
  obs.log_normalization = s.norm.log_magnitude;
  obs.mean_excitation = 0.5 * (s.first / s.norm).to_complex().real();
  obs.second_moment = 0.25 * (s.second / s.norm).to_complex().real();
  obs.amplitude = (amplitude_prefactor * s.cross / s.norm).to_complex();
  finalize_observables(obs, n_emitters);
  return obs;
}

Observables vacuum(Branch branch, int n_emitters) {
  Observables obs;
  obs.branch = branch;
  obs.terms_used = 1;
  finalize_observables(obs, n_emitters);
  return obs;
}

void require_series(const EffectiveModel& model, const char* who) {
  if (!model.series) throw DomainError(std::string(who) + ": bar_delta = 0, the main series is undefined");
}

}  // namespace

void finalize_observables(Observables& obs, int n_emitters, double g2_floor) {
  if (obs.mean_excitation > g2_floor)
    obs.g2 = obs.second_moment / (obs.mean_excitation * obs.mean_excitation);
  else
    obs.g2.reset();
  if (obs.mean_excitation / n_emitters > kWeakExcitationLimit) {
    std::ostringstream msg;
    msg << "<b^dag b>/N = " << obs.mean_excitation / n_emitters << " exceeds " << kWeakExcitationLimit
        << "; weak-excitation expansion is doubtful";
    obs.warnings.push_back(msg.str());
  }
}

LogComplex series_in(const EffectiveModel& model, int n) {
  require_series(model, "series_in");
  const int two_n = 2 * model.n;
  if (n < 0) throw DomainError("series_in: n must be non-negative");
  if (n > two_n) return LogComplex::zero();
  const Complex theta = model.series->theta;
  try {
    return complex_binomial(theta, two_n - n) *
           kummer_1f1(1.0 + theta, 1.0 + theta + static_cast<double>(n - two_n), model.series->p);
  } catch (const DomainError& e) {
    std::ostringstream msg;
    msg << "series_in: I_n at n = " << n << " (2N = " << two_n << "): " << e.what();
    throw DomainError(msg.str());
  } catch (const ConvergenceError& e) {
    std::ostringstream msg;
    msg << "series_in: I_n at n = " << n << ": " << e.what();
    throw ConvergenceError(msg.str(), e.partial_log_magnitude(), e.partial_phase(), e.last_ratio());
  }
}

namespace {

// Coefficients divided by e^{log_offset}, where log_offset is the recurrence's final rescale. Folding the
// full scale into every log magnitude would round the dominant (top) coefficients at ~1e-12 when the
// magnitudes reach 1e3 or more.
std::vector<LogComplex> scaled_steady_coefficients(const EffectiveModel& model, double& log_offset) {
  const int two_n = 2 * model.n;
  const Complex om = model.tilde_omega;
  if (om == Complex{}) throw DomainError("steady_coefficients: tilde_Omega = 0");
  const Complex rotation = std::conj(om) / om;
  const Complex diagonal = (kI * 0.5 * model.big_gamma - model.bar_delta_n) / om;
  const Complex slope = model.bar_delta / om;

  std::vector<LogComplex> a(static_cast<std::size_t>(two_n) + 1);
  std::vector<double> scale(static_cast<std::size_t>(two_n) + 1, 0.0);
  a[0] = LogComplex::one();
  Complex prev{}, curr{1.0, 0.0};
  double log_scale = 0.0;
  for (int m = 0; m < two_n; ++m) {
    const Complex next = ((static_cast<double>(two_n - 1 - m) * slope + diagonal) * curr + rotation * prev) /
                         static_cast<double>(m + 1);
    prev = curr;
    curr = next;
    const double size = std::max(std::abs(prev), std::abs(curr));
    if (size > 1e100 || (size < 1e-100 && size > 0.0)) {
      prev /= size;
      curr /= size;
      log_scale += std::log(size);
    }
    a[m + 1] = LogComplex::from_complex(curr);
    scale[m + 1] = log_scale;
  }
  log_offset = log_scale;
  for (int m = 0; m <= two_n; ++m)
    if (!a[m].is_zero()) a[m].log_magnitude += scale[m] - log_offset;
  return a;
}

}  // namespace

std::vector<LogComplex> steady_coefficients(const EffectiveModel& model) {
  double log_offset = 0.0;
  std::vector<LogComplex> a = scaled_steady_coefficients(model, log_offset);
  for (LogComplex& am : a)
    if (!am.is_zero()) am.log_magnitude += log_offset;
  return a;
}

Observables steady_observables(const EffectiveModel& model) {
  if (model.tilde_omega == Complex{}) return vacuum(Branch::MainSeries, model.n);
  const int two_n = 2 * model.n;
  double log_offset = 0.0;
  const std::vector<LogComplex> a = scaled_steady_coefficients(model, log_offset);
  const MomentSums s = accumulate(two_n, std::log(2.0), [&](int n) { return a[two_n - n]; });
  Observables obs = moments_to_observables(s, LogComplex::one(), Branch::MainSeries, model.n);
  obs.log_normalization += 2.0 * log_offset;
  return obs;
}

Observables steady_observables_from_series(const EffectiveModel& model) {
  require_series(model, "steady_observables_from_series");
  if (model.tilde_omega == Complex{}) return vacuum(Branch::MainSeries, model.n);
  const double p = model.series->p;
  const LogComplex prefactor = LogComplex::from_complex(model.tilde_omega / model.bar_delta);
  const MomentSums s = accumulate(2 * model.n, std::log(2.0 * p), [&](int n) { return series_in(model, n); });
  return moments_to_observables(s, prefactor, Branch::MainSeries, model.n);
}

namespace {

struct AppendixAParams {
  Complex tilde_gamma;  // (bar_Delta - i Gamma/2)/tilde_Omega
  Complex f;            // tilde_Omega^*/(2 tilde_Omega)
  Complex w;            // -tilde_Gamma^2/(4f)
};

AppendixAParams appendix_a_params(const EffectiveModel& model) {
  const Complex om = model.tilde_omega;
  if (om == Complex{}) throw DomainError("appendix A: tilde_Omega = 0");
  AppendixAParams q;
  q.tilde_gamma = (model.bar_delta_n - kI * 0.5 * model.big_gamma) / om;
  q.f = std::conj(om) / (2.0 * om);
  q.w = -q.tilde_gamma * q.tilde_gamma / (4.0 * q.f);
  return q;
}

LogComplex appendix_a_coefficient(const AppendixAParams& q, int m) {
  const LogComplex log_w = LogComplex::from_complex(q.w);
  LogComplex e = LogComplex::from_complex(-q.tilde_gamma).pow(m);
  e *= log_w.pow(Complex{0.5 * (1 - m), 0.0});
  e *= tricomi_u(0.5 * (1 - m), 1.5, q.w);
  e.log_magnitude -= std::lgamma(m + 1.0);
  return e;
}

}  // namespace

LogComplex appendix_a_series_in(const EffectiveModel& model, int n) {
  const int two_n = 2 * model.n;
  if (n < 0) throw DomainError("appendix_a_series_in: n must be non-negative");
  if (n > two_n) return LogComplex::zero();
  const AppendixAParams q = appendix_a_params(model);
  LogComplex value = LogComplex::from_complex(-q.f).pow(Complex{-0.5 * n, 0.0});
  value *= tricomi_u(0.5 * (n + 1 - two_n), 1.5, q.w);
  value.log_magnitude -= std::lgamma(two_n - n + 1.0);
  return value;
}

Observables appendix_a_observables(const EffectiveModel& model) {
  if (model.tilde_omega == Complex{}) return vacuum(Branch::AppendixA, model.n);
  const int two_n = 2 * model.n;
  const AppendixAParams q = appendix_a_params(model);

  std::vector<LogComplex> tilde_i(static_cast<std::size_t>(two_n) + 1);
  for (int n = 0; n <= two_n; ++n) tilde_i[n] = appendix_a_series_in(model, n);
  const MomentSums sums = accumulate(two_n, std::log(0.5), [&](int n) { return tilde_i[n]; });

  std::vector<LogComplex> e(static_cast<std::size_t>(two_n) + 1);
  for (int m = 0; m <= two_n; ++m) e[m] = appendix_a_coefficient(q, m);
  const MomentSums coherent = accumulate(two_n, std::log(2.0), [&](int n) { return e[two_n - n]; });

  Observables obs = moments_to_observables(sums, LogComplex::one(), Branch::AppendixA, model.n);
  obs.amplitude = (coherent.cross / coherent.norm).to_complex();
  return obs;
}

Observables linear_limit_observables(const EffectiveModel& model) {
  Observables obs;
  obs.branch = Branch::LinearLimit;
  const double drive = model.n * model.g_eff_sq;
  const double half_gamma = 0.5 * model.big_gamma;
  const double den = half_gamma * half_gamma + drive;
  obs.mean_excitation = den > 0.0 ? drive / den : 0.0;
  obs.second_moment = den > 0.0 ? drive * drive / (den * den) : 0.0;
  const Complex response = -kI * model.bar_omega / Complex{half_gamma, model.bar_delta_n};
  if (std::abs(response) > 0.0) obs.amplitude = std::sqrt(obs.mean_excitation) * response / std::abs(response);
  obs.terms_used = 0;
  finalize_observables(obs, model.n);
  obs.g2 = 1.0;
  return obs;
}

Observables analytic_auto(const EffectiveModel& model) {
  return model.branch == Branch::AppendixA ? appendix_a_observables(model) : steady_observables(model);
}

}  // namespace ccqed
