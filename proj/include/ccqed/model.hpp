#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccqed/log_complex.hpp"

namespace ccqed {

/// Raw inputs. Every rate is in units of gamma; the defaults are the
/// per-emitter values behind the preset sweeps at N = 100.
struct PhysicalParams {
  double gamma = 1.0;
  double kappa = 1.62e6;
  double g_c = 502.0;
  int n_emitters = 100;
  double omega_n_minus_omega_c = 50.0;
  double delta_c = 0.0;  // omega_c - omega_x2, the usual sweep variable
  double omega_rabi = 5.0;
  double epsilon_drive = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double eta = 0.0;

  /// Throws ParameterError for gamma, kappa <= 0, N < 1, eta outside [0, 1]
  /// or non-finite fields.
  void validate() const;

  double delta_phi() const { return phi1 - phi2; }
  double sqrt_n() const;
};

enum class Branch { MainSeries, AppendixA, LinearLimit, Numeric };

std::string_view to_string(Branch branch);

/// kappa > max(sqrt(N) g_c, N gamma): the cavity can be eliminated.
bool bad_cavity_admissible(const PhysicalParams& params);

/// Cavity displacement alpha = epsilon / (Delta_c - i kappa/2).
Complex displacement_alpha(const PhysicalParams& params);

/// Cavity-mediated dipole-dipole shift delta_c.
double dipole_shift(const PhysicalParams& params);

/// Cavity contribution gamma_c to the collective decay rate.
double collective_decay_rate(const PhysicalParams& params);

/// Single-emitter rate gamma_s = gamma + gamma_c. At eta = 0 and eta = 1 the
/// Purcell form and the perfect-square form are used verbatim so that their
/// limits (e.g. exact zero at Delta_c = g_c sqrt(kappa/gamma)) hold to
/// rounding.
double single_emitter_rate(const PhysicalParams& params);

/// G = Omega - epsilon_bar with epsilon_bar = epsilon e^{i dphi} (g_c - i eta
/// sqrt(gamma kappa)/2) / (Delta_c - i kappa/2).
Complex effective_drive(const PhysicalParams& params);

/// |G|^2 from its expanded closed form (sin/cos of the phase difference).
double effective_drive_sq_expanded(const PhysicalParams& params);

/// Quantities that exist only while bar_delta != 0.
struct SeriesParams {
  double p = 0.0;           // |tilde_omega|^2 / bar_delta^2
  Complex theta;            // 1 + 2N - p + i bar_gamma
  Complex bar_gamma;        // (Gamma/2 + i(bar_delta_n + 2 bar_delta)) / bar_delta
};

struct EffectiveModel {
  PhysicalParams params;
  int n = 0;
  double delta_n = 0.0;
  Complex alpha;
  double delta_c_shift = 0.0;
  double gamma_c = 0.0;
  double gamma_s = 0.0;
  Complex g_eff;
  double g_eff_sq = 0.0;
  double bar_delta = 0.0;
  double big_gamma = 0.0;
  double gamma0 = 0.0;
  double bar_delta_n = 0.0;
  Complex bar_omega;
  Complex tilde_omega;
  std::optional<SeriesParams> series;  // empty when bar_delta == 0
  Branch branch = Branch::MainSeries;  // MainSeries or AppendixA
  std::vector<std::string> warnings;

  /// |bar_delta| below which the main series is abandoned for the
  /// Appendix-A solution.
  double appendix_a_threshold() const;
};

/// Relative factor in the Appendix-A switch |bar_delta| < factor * max(Gamma, |bar_Delta|, |bar_Omega|).
inline constexpr double kAppendixAThresholdFactor = 1e-9;

/// Throws ParameterError if params are invalid or eta > 1/sqrt(N)
/// (negative collective decay).
EffectiveModel build_effective_model(const PhysicalParams& params);

/// An EffectiveModel specified directly by the bosonic coefficients
/// (bar_Delta, tilde_Omega, bar_delta, Gamma) for N emitters. alpha, gamma_c
/// and gamma_s stay zero and params only carries N. Series fields and branch
/// follow the same rules as build_effective_model.
EffectiveModel make_hp_model(int n_emitters, double bar_delta_n, Complex tilde_omega, double bar_delta,
                             double big_gamma);

}  // namespace ccqed
