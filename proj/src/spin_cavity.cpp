#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "ccqed/errors.hpp"
#include "ccqed/lindblad.hpp"
#include "superop.hpp"

namespace ccqed {
namespace {

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

void check_layout(const SpinCavityLayout& layout) {
  if (layout.n_spins < 1 || layout.n_spins > 2) throw ParameterError("n_spins must be 1 or 2");
  if (layout.cavity_dim < 4) throw ParameterError("cavity_dim must be at least 4");
}

double excited_population(const Matrix& rho, const Matrix& sigma_minus) {
  return std::real((sigma_minus.adjoint() * sigma_minus * rho).trace());
}

}  // namespace

SpinCavityOperators spin_cavity_operators(const SpinCavityLayout& layout) {
  check_layout(layout);
  const int spin_dim = 1 << layout.n_spins;
  const Matrix id_cavity = detail::identity(layout.cavity_dim);
  Matrix sm(2, 2);
  sm << 0.0, 1.0, 0.0, 0.0;  // |g> = 0, |e> = 1

  SpinCavityOperators ops;
  ops.a = kron(detail::identity(spin_dim), annihilation(layout.cavity_dim).entries);
  ops.s_minus = Matrix::Zero(layout.dim(), layout.dim());
  ops.s_z = Matrix::Zero(layout.dim(), layout.dim());
  for (int j = 0; j < layout.n_spins; ++j) {
    const Matrix left = detail::identity(1 << j);
    const Matrix right = detail::identity(1 << (layout.n_spins - j - 1));
    const Matrix sigma = kron(kron(kron(left, sm), right), id_cavity);
    ops.s_minus += sigma;
    ops.s_z += 0.5 * (sigma.adjoint() * sigma - sigma * sigma.adjoint());
    ops.sigma_minus.push_back(sigma);
  }
  return ops;
}

Liouvillian build_full_liouvillian(const PhysicalParams& params, int n_spins, int cavity_dim) {
  params.validate();
  const SpinCavityLayout layout{n_spins, cavity_dim};
  const SpinCavityOperators ops = spin_cavity_operators(layout);
  const Matrix ad = ops.a.adjoint();
  const Matrix sp = ops.s_minus.adjoint();
  const double delta_n = params.omega_n_minus_omega_c + params.delta_c;
  const Complex e1 = std::polar(1.0, -params.phi1);
  const Complex e2 = std::polar(1.0, -params.phi2);

  const Matrix h = params.delta_c * (ad * ops.a) + delta_n * ops.s_z +
                   params.omega_rabi * (e1 * sp + std::conj(e1) * ops.s_minus) +
                   params.epsilon_drive * (e2 * ad + std::conj(e2) * ops.a) +
                   params.g_c * (sp * ops.a + ad * ops.s_minus);

  Liouvillian l;
  l.dim = layout.dim();
  l.matrix = Matrix::Zero(static_cast<Eigen::Index>(l.dim) * l.dim, static_cast<Eigen::Index>(l.dim) * l.dim);
  detail::add_hamiltonian(l.matrix, h);
  for (const Matrix& sigma : ops.sigma_minus) detail::add_damping(l.matrix, sigma.adjoint(), sigma, params.gamma);
  detail::add_damping(l.matrix, ad, ops.a, params.kappa);
  const double cross = params.eta * std::sqrt(params.kappa * params.gamma);
  if (cross != 0.0) {
    detail::add_damping(l.matrix, sp, ops.a, cross);
    detail::add_damping(l.matrix, ad, ops.s_minus, cross);
  }
  const double root_d = std::sqrt(static_cast<double>(cavity_dim));
  const double root_s = std::sqrt(static_cast<double>(n_spins));
  l.fastest_rate = std::max({params.kappa, params.gamma, std::abs(params.delta_c), std::abs(delta_n),
                             params.g_c * root_d * root_s, std::abs(params.omega_rabi) * root_s,
                             std::abs(params.epsilon_drive) * root_d, cross});
  return l;
}

PhysicalityReport SpinCavityState::physicality() const {
  double top = 0.0;
  for (int s = 0; s < (1 << layout.n_spins); ++s) {
    const int idx = s * layout.cavity_dim + layout.cavity_dim - 1;
    top += std::real(entries(idx, idx));
  }
  return check_physicality(entries, top);
}

SpinCavityState full_steady_state(const PhysicalParams& params, int n_spins, int cavity_dim) {
  SpinCavityState state;
  state.layout = SpinCavityLayout{n_spins, cavity_dim};
  state.entries = steady_state_matrix(build_full_liouvillian(params, n_spins, cavity_dim));
  if (params.eta * std::sqrt(static_cast<double>(n_spins)) > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "eta = " << params.eta << " exceeds 1/sqrt(" << n_spins
        << "); the cross-correlated dissipator is not completely positive";
    state.warnings.push_back(msg.str());
  }
  const PhysicalityReport report = state.physicality();
  if (!report.ok()) state.warnings.push_back("non-physical steady state: " + report.describe());
  return state;
}

DecayFit fit_spin_decay_rate(PhysicalParams params, int cavity_dim, double max_time) {
  params.omega_rabi = 0.0;
  params.epsilon_drive = 0.0;
  params.n_emitters = 1;
  params.omega_n_minus_omega_c = -params.delta_c;
  const double expected = single_emitter_rate(params);

  DecayFit fit;
  fit.window_start = 2.0 / params.kappa;
  fit.window_end = expected > 0.0 ? std::min(0.5 / expected, max_time) : max_time;
  if (!(fit.window_end > fit.window_start))
    throw ParameterError("decay fit window is empty; kappa must exceed the decay rate");

  const SpinCavityLayout layout{1, cavity_dim};
  const Liouvillian l = build_full_liouvillian(params, 1, cavity_dim);
  const Matrix sigma = spin_cavity_operators(layout).sigma_minus.front();
  const double dt = 0.1 / l.fastest_rate;

  Matrix rho = Matrix::Zero(layout.dim(), layout.dim());
  rho(cavity_dim, cavity_dim) = 1.0;  // |e> tensor |0>
  rho = evolve(l, rho, fit.window_start, dt);

  constexpr int kSamples = 200;
  const double spacing = (fit.window_end - fit.window_start) / (kSamples - 1);
  std::vector<double> ts, ys;
  for (int k = 0; k < kSamples; ++k) {
    if (k > 0) rho = evolve(l, rho, spacing, dt);
    const double pop = excited_population(rho, sigma);
    if (pop > 0.0) {
      ts.push_back(fit.window_start + k * spacing);
      ys.push_back(std::log(pop));
    }
  }
  fit.samples = static_cast<int>(ts.size());
  if (fit.samples < 2) throw SolverError("excited population vanished inside the fit window", 0.0);

  const double n = fit.samples;
  double st = 0.0, sy = 0.0;
  for (int k = 0; k < fit.samples; ++k) {
    st += ts[k];
    sy += ys[k];
  }
  const double mt = st / n, my = sy / n;
  double stt = 0.0, sty = 0.0;
  for (int k = 0; k < fit.samples; ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    sty += (ts[k] - mt) * (ys[k] - my);
  }
  const double slope = sty / stt;
  fit.rate = -slope;
  for (int k = 0; k < fit.samples; ++k)
    fit.max_log_residual = std::max(fit.max_log_residual, std::abs(ys[k] - (my + slope * (ts[k] - mt))));
  return fit;
}

std::vector<FullModelCheck> run_full_model_checks() {
  std::vector<FullModelCheck> checks;

  {
    PhysicalParams p;
    p.n_emitters = 1;
    p.kappa = 1e4;
    p.g_c = 10.0;
    p.delta_c = 0.0;
    p.eta = 0.0;
    const DecayFit fit = fit_spin_decay_rate(p);
    PhysicalParams q = p;
    q.omega_n_minus_omega_c = -q.delta_c;
    FullModelCheck c{"purcell_decay", fit.rate, single_emitter_rate(q), 0.05, false, {}};
    c.passed = std::abs(c.value - c.expected) <= c.tolerance * c.expected;
    std::ostringstream d;
    d << "fit over [" << fit.window_start << ", " << fit.window_end << "], " << fit.samples
      << " samples, relative tolerance";
    c.detail = d.str();
    checks.push_back(c);
  }

  {
    PhysicalParams p;
    p.n_emitters = 1;
    p.kappa = 1e4;
    p.g_c = 10.0;
    p.eta = 1.0;
    p.delta_c = p.g_c * std::sqrt(p.kappa / p.gamma);
    const DecayFit fit = fit_spin_decay_rate(p, 4, 2.0);
    FullModelCheck c{"suppressed_decay", fit.rate, 0.0, kSuppressedDecayFloor, false, {}};
    c.passed = std::abs(c.value) <= c.tolerance;
    std::ostringstream d;
    d << "eta = 1, Delta_c = g_c sqrt(kappa/gamma) = " << p.delta_c << ", fit over [" << fit.window_start << ", "
      << fit.window_end << "], absolute tolerance";
    c.detail = d.str();
    checks.push_back(c);
  }

  {
    PhysicalParams p;
    p.n_emitters = 1;
    p.g_c = 0.0;
    p.eta = 0.0;
    p.kappa = 10.0;
    p.delta_c = 2.0;
    p.omega_rabi = 0.0;
    p.epsilon_drive = 3.0;
    p.phi2 = 0.3;
    const int cavity_dim = 16;
    const SpinCavityState state = full_steady_state(p, 1, cavity_dim);
    const Matrix a = spin_cavity_operators(state.layout).a;
    const Complex mean_a = (a * state.entries).trace();
    const Complex expected = -displacement_alpha(p) * std::polar(1.0, -p.phi2);
    FullModelCheck c{"cavity_displacement", std::abs(mean_a - expected), 0.0, 1e-8, false, {}};
    c.passed = c.value <= c.tolerance * std::abs(expected) && state.warnings.empty();
    std::ostringstream d;
    d << "<a> = " << mean_a.real() << (mean_a.imag() < 0 ? "" : "+") << mean_a.imag() << "i vs -alpha e^{-i phi2} = "
      << expected.real() << (expected.imag() < 0 ? "" : "+") << expected.imag() << "i, relative tolerance";
    c.detail = d.str();
    checks.push_back(c);
  }

  return checks;
}

}  // namespace ccqed
