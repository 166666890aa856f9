#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccqed/model.hpp"
#include "ccqed/observables.hpp"

namespace ccqed {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Column-stacked vec(rho); vec(A rho B) = (B^T kron A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, int dim);

struct FockOperator {
  int dim = 0;
  Matrix entries;
};

/// b with b[m, m+1] = sqrt(m+1).
FockOperator annihilation(int dim);

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-8;
inline constexpr double kBoundaryTolerance = 1e-8;

struct PhysicalityReport {
  double trace_error = 0.0;          // |tr rho - 1|
  double hermiticity_error = 0.0;    // max |rho - rho^dag| entry
  double min_eigenvalue = 0.0;       // of the Hermitian part
  double boundary_population = 0.0;  // population of the highest Fock level

  bool trace_ok() const { return trace_error <= kTraceTolerance; }
  bool hermitian_ok() const { return hermiticity_error <= kHermiticityTolerance; }
  bool positive_ok() const { return min_eigenvalue >= -kPositivityTolerance; }
  bool truncation_ok() const { return boundary_population < kBoundaryTolerance; }
  bool ok() const { return trace_ok() && hermitian_ok() && positive_ok() && truncation_ok(); }
  std::string describe() const;
};

PhysicalityReport check_physicality(const Matrix& rho, double boundary_population);

struct DensityMatrix {
  int dim = 0;
  Matrix entries;

  /// Boundary population is rho[D-1, D-1].
  PhysicalityReport physicality() const;
};

/// Row-major "re,im" pairs, one matrix row per line.
void write_density_matrix(std::ostream& out, const Matrix& rho);

/// Dense generator acting on vec(rho). fastest_rate bounds the step size
/// accepted by evolve().
struct Liouvillian {
  int dim = 0;  // Hilbert-space dimension
  Matrix matrix;
  double fastest_rate = 0.0;
};

/// The bosonic master equation on D Fock levels:
///   -i[bar_Delta b^dag b + bar_Omega b^dag + bar_Omega^* b - tilde_Omega b^dag2 b
///      - tilde_Omega^* b^dag b^2 - bar_delta b^dag2 b^2, rho]
///   - (Gamma/2)([b^dag, b rho] + [rho b^dag, b])
///   + (Gamma_0/2)([b^dag2 b, b rho] + [rho b^dag, b^dag b^2])   (if include_gamma0)
/// The Gamma_0 part is taken verbatim; it is not of Lindblad form and the
/// steady state is checked for positivity afterwards instead.
Liouvillian build_hp_liouvillian(const EffectiveModel& model, int dim, bool include_gamma0);

/// Null vector of L normalized to unit trace: the row of rho[0,0] is replaced
/// by the trace functional and the system solved by dense LU; inverse
/// iteration is the fallback when the residual check fails. Throws
/// DegenerateSteadyStateError when L has more than one near-null direction.
Matrix steady_state_matrix(const Liouvillian& liouvillian);
DensityMatrix steady_state(const Liouvillian& liouvillian);

/// Fixed-step RK4. dt must satisfy dt <= 0.1 / fastest_rate (StepSizeError
/// otherwise); the step is shrunk so that an integer number of steps ends
/// at t_final. Throws StepSizeError if the trace drifts by more than 1e-8.
Matrix evolve(const Liouvillian& liouvillian, const Matrix& rho0, double t_final, double dt);
DensityMatrix evolve(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t_final, double dt);

/// tr(b^dag b rho), tr(b rho), tr(b^dag2 b^2 rho); g2 undefined below 1e-14.
Observables observables_from_rho(const DensityMatrix& rho, int n_emitters = 1);

struct NumericControl {
  int start_dim = 16;
  int max_dim = 64;
  double relative_change = 1e-3;  // accepted change in <b^dag b> and g2 on doubling
};

struct NumericSolution {
  DensityMatrix rho;
  Observables observables;
  PhysicalityReport physicality;
  int dim = 0;
  double doubling_change = 0.0;
};

/// Steady state with D = start, 2 start, ... until doubling changes <b^dag b>
/// and g2 by less than relative_change and the top level is below 1e-8.
/// Returns the larger-D solution. Non-physical states are returned with
/// warnings, not thrown. TruncationError if max_dim is exhausted.
NumericSolution solve_numeric(const EffectiveModel& model, bool include_gamma0, const NumericControl& control = {});

// Spin + cavity model with equal drive frequencies.

/// Hilbert space spins (2^n_spins, |g>=0, |e>=1 each) tensor cavity Fock space.
struct SpinCavityLayout {
  int n_spins = 1;
  int cavity_dim = 4;
  int dim() const { return (1 << n_spins) * cavity_dim; }
};

struct SpinCavityOperators {
  Matrix a;
  Matrix s_minus;               // collective
  std::vector<Matrix> sigma_minus;  // per spin
  Matrix s_z;
};

SpinCavityOperators spin_cavity_operators(const SpinCavityLayout& layout);

/// H = Delta_c a^dag a + Delta_n S_z + Omega(S+ e^{-i phi1} + h.c.) + epsilon(a^dag e^{-i phi2} + h.c.)
///     + g_c(S+ a + a^dag S-)
/// with dissipators -(gamma/2) sum_j [S_j+, S_j- rho] - (kappa/2)[a^dag, a rho]
/// - (eta sqrt(kappa gamma)/2)([S+, a rho] + [a^dag, S- rho]) + H.c.
Liouvillian build_full_liouvillian(const PhysicalParams& params, int n_spins, int cavity_dim);

struct SpinCavityState {
  SpinCavityLayout layout;
  Matrix entries;
  std::vector<std::string> warnings;  // non-CP generator, failed physicality

  /// Boundary population is the total weight on the top cavity level.
  PhysicalityReport physicality() const;
};

/// The generator is completely positive iff eta sqrt(n_spins) <= 1; beyond
/// that the state is still computed and a warning recorded.
SpinCavityState full_steady_state(const PhysicalParams& params, int n_spins, int cavity_dim);

struct DecayFit {
  double rate = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
  double max_log_residual = 0.0;
};

/// Drives off, one spin excited, cavity empty; fits log<S+S->(t) linearly
/// over [2/kappa, 0.5/gamma_s] (window end capped at max_time). The nuclear
/// frequency is put at the drive frame (Delta_n = 0) so that the cavity
/// detuning seen by the spin is Delta_c.
DecayFit fit_spin_decay_rate(PhysicalParams params, int cavity_dim = 4, double max_time = 5.0);

struct FullModelCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// Absolute bound (units of gamma) on the fitted rate in the suppressed-decay check.
inline constexpr double kSuppressedDecayFloor = 0.02;

/// Adiabatic-elimination checks against the closed-form rates: Purcell decay
/// at eta = 0, suppressed decay at eta = 1, and the displaced cavity state.
std::vector<FullModelCheck> run_full_model_checks();

}  // namespace ccqed
