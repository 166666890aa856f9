#include "ccqed/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccqed/errors.hpp"

namespace ccqed {
namespace {

constexpr Complex kI{0.0, 1.0};

double lorentz_denominator(const PhysicalParams& p) {
  return 0.25 * p.kappa * p.kappa + p.delta_c * p.delta_c;
}

void fill_series(EffectiveModel& m) {
  if (m.bar_delta != 0.0) {
    SeriesParams s;
    s.p = std::norm(m.tilde_omega) / (m.bar_delta * m.bar_delta);
    s.bar_gamma = (0.5 * m.big_gamma + kI * (m.bar_delta_n + 2.0 * m.bar_delta)) / m.bar_delta;
    s.theta = 1.0 + 2.0 * m.n - s.p + kI * s.bar_gamma;
    m.series = s;
  }
  m.branch = std::abs(m.bar_delta) < m.appendix_a_threshold() || !m.series ? Branch::AppendixA : Branch::MainSeries;
}

}  // namespace

void PhysicalParams::validate() const {
  const double fields[] = {gamma, kappa, g_c, omega_n_minus_omega_c, delta_c, omega_rabi, epsilon_drive, phi1, phi2, eta};
  for (double f : fields)
    if (!std::isfinite(f)) throw ParameterError("parameters must be finite");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(kappa > 0.0)) throw ParameterError("kappa must be positive");
  if (n_emitters < 1) throw ParameterError("n_emitters must be at least 1");
  if (eta < 0.0 || eta > 1.0) throw ParameterError("eta must lie in [0, 1]");
}

double PhysicalParams::sqrt_n() const { return std::sqrt(static_cast<double>(n_emitters)); }

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::MainSeries: return "MainSeries";
    case Branch::AppendixA: return "AppendixA";
    case Branch::LinearLimit: return "LinearLimit";
    case Branch::Numeric: return "Numeric";
  }
  return "Unknown";
}

bool bad_cavity_admissible(const PhysicalParams& p) {
  return p.kappa > std::max(p.sqrt_n() * p.g_c, p.n_emitters * p.gamma);
}

Complex displacement_alpha(const PhysicalParams& p) {
  return p.epsilon_drive / Complex{p.delta_c, -0.5 * p.kappa};
}

double dipole_shift(const PhysicalParams& p) {
  const double root = std::sqrt(p.kappa * p.gamma);
  return (p.delta_c * (p.g_c * p.g_c - 0.25 * p.kappa * p.gamma * p.eta * p.eta) +
          0.5 * p.eta * p.g_c * p.kappa * root) /
         lorentz_denominator(p);
}

double collective_decay_rate(const PhysicalParams& p) {
  const double root = std::sqrt(p.kappa * p.gamma);
  return (p.kappa * (p.g_c * p.g_c - 0.25 * p.kappa * p.gamma * p.eta * p.eta) -
          2.0 * p.eta * p.g_c * p.delta_c * root) /
         lorentz_denominator(p);
}

double single_emitter_rate(const PhysicalParams& p) {
  if (p.eta == 0.0) return p.gamma + p.kappa * p.g_c * p.g_c / lorentz_denominator(p);
  if (p.eta == 1.0) {
    const double root = p.g_c * std::sqrt(p.kappa) - p.delta_c * std::sqrt(p.gamma);
    return root * root / lorentz_denominator(p);
  }
  return p.gamma + collective_decay_rate(p);
}

Complex effective_drive(const PhysicalParams& p) {
  const Complex phase = std::polar(1.0, p.delta_phi());
  const Complex coupling = phase * Complex{p.g_c, -0.5 * p.eta * std::sqrt(p.gamma * p.kappa)};
  const Complex epsilon_bar = p.epsilon_drive * coupling / Complex{p.delta_c, -0.5 * p.kappa};
  return p.omega_rabi - epsilon_bar;
}

double effective_drive_sq_expanded(const PhysicalParams& p) {
  const double root = std::sqrt(p.gamma * p.kappa);
  const double dphi = p.delta_phi();
  const double eps = p.epsilon_drive;
  const double om = p.omega_rabi;
  const double cavity = eps * eps * (p.g_c * p.g_c + 0.25 * p.eta * p.eta * p.gamma * p.kappa) / lorentz_denominator(p);
  const double cross = 2.0 * eps * om / (p.kappa * p.kappa + 4.0 * p.delta_c * p.delta_c) *
                       (2.0 * (p.kappa * p.g_c - p.eta * p.delta_c * root) * std::sin(dphi) -
                        (p.kappa * p.eta * root + 4.0 * p.g_c * p.delta_c) * std::cos(dphi));
  return om * om + cavity + cross;
}

double EffectiveModel::appendix_a_threshold() const {
  return kAppendixAThresholdFactor * std::max({big_gamma, std::abs(bar_delta_n), std::abs(bar_omega)});
}

EffectiveModel build_effective_model(const PhysicalParams& params) {
  params.validate();
  const double sqrt_n = params.sqrt_n();
  if (params.eta * sqrt_n > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "eta = " << params.eta << " exceeds 1/sqrt(N) = " << 1.0 / sqrt_n
        << "; the collective decay rate Gamma would be negative";
    throw ParameterError(msg.str());
  }

  EffectiveModel m;
  m.params = params;
  m.n = params.n_emitters;
  m.delta_n = params.omega_n_minus_omega_c + params.delta_c;
  m.alpha = displacement_alpha(params);
  m.delta_c_shift = dipole_shift(params);
  m.gamma_c = collective_decay_rate(params);
  m.gamma_s = single_emitter_rate(params);
  m.g_eff = effective_drive(params);
  m.g_eff_sq = std::norm(m.g_eff);
  m.bar_delta = -m.delta_c_shift;
  m.big_gamma = params.gamma + m.n * m.gamma_c;
  m.gamma0 = m.big_gamma / m.n;
  m.bar_delta_n = m.delta_n - m.n * m.delta_c_shift;
  m.bar_omega = sqrt_n * m.g_eff;
  m.tilde_omega = m.g_eff / (2.0 * sqrt_n);

  fill_series(m);

  if (!bad_cavity_admissible(params)) {
    std::ostringstream msg;
    msg << "kappa = " << params.kappa << " is not above max(sqrt(N) g_c, N gamma) = "
        << std::max(sqrt_n * params.g_c, m.n * params.gamma) << "; cavity elimination is questionable";
    m.warnings.push_back(msg.str());
  }
  return m;
}

EffectiveModel make_hp_model(int n_emitters, double bar_delta_n, Complex tilde_omega, double bar_delta,
                             double big_gamma) {
  if (n_emitters < 1) throw ParameterError("n_emitters must be at least 1");
  EffectiveModel m;
  m.params.n_emitters = n_emitters;
  m.n = n_emitters;
  const double sqrt_n = std::sqrt(static_cast<double>(n_emitters));
  m.bar_delta = bar_delta;
  m.delta_c_shift = -bar_delta;
  m.big_gamma = big_gamma;
  m.gamma0 = big_gamma / n_emitters;
  m.bar_delta_n = bar_delta_n;
  m.delta_n = bar_delta_n + n_emitters * m.delta_c_shift;
  m.tilde_omega = tilde_omega;
  m.g_eff = 2.0 * sqrt_n * tilde_omega;
  m.g_eff_sq = std::norm(m.g_eff);
  m.bar_omega = sqrt_n * m.g_eff;
  fill_series(m);
  return m;
}

}  // namespace ccqed
