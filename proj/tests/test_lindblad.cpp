#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ccqed/analytic.hpp"
#include "ccqed/errors.hpp"
#include "ccqed/lindblad.hpp"

using namespace ccqed;

namespace {

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex{nd(rng), nd(rng)};
  return 0.5 * (m + m.adjoint());
}

Matrix projector(int dim, int level) {
  Matrix rho = Matrix::Zero(dim, dim);
  rho(level, level) = 1.0;
  return rho;
}

Matrix coherent_state(int dim, Complex beta) {
  Vector psi(dim);
  Complex c = std::exp(-0.5 * std::norm(beta));
  for (int m = 0; m < dim; ++m) {
    psi(m) = c;
    c *= beta / std::sqrt(static_cast<double>(m + 1));
  }
  return psi * psi.adjoint();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

// Same configuration as the fig4 sweep.
EffectiveModel fig4_point(double delta_c) {
  PhysicalParams p;
  p.epsilon_drive = 3e3;
  p.eta = 0.1;
  p.delta_c = delta_c;
  return build_effective_model(p);
}

// Brute-force Fock-space steady states of the Gamma_0 = 0 equation (numpy,
// tests/oracles/generate_oracles.py).
struct FockOracle {
  int n;
  double bar_delta_n;
  Complex tilde_omega;
  double bar_delta;
  double big_gamma;
  double mean;
  Complex amplitude;
  double second;
};

const FockOracle kOracles[] = {
    {5, 0.3, {0.2, 0.1}, 0.15, 1.0, 2.531017001950607, {1.498254042142332, -0.07768860625414371}, 5.455939234616052},
    {3, -0.7, {0.05, -0.3}, -0.4, 2.0, 1.380805600461432, {-0.9843219843009112, 0.1959248881051975}, 1.396859161141807},
    {4, 0.0, {0.3, 0.0}, 0.0, 1.5, 2.786058372080357, {0.0, -1.300446200454998}, 6.600832540239209},
};

void check_preserves_trace_and_hermiticity(const Liouvillian& l, std::mt19937_64& rng, double tol) {
  for (int k = 0; k < 100; ++k) {
    const Matrix rho = random_hermitian(l.dim, rng);
    const Matrix drho = unvectorize(l.matrix * vectorize(rho), l.dim);
    CHECK(std::abs(drho.trace()) <= tol);
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() <= tol);
  }
}

}  // namespace

TEST_CASE("annihilation operator entries and truncated commutator") {
  const int dim = 9;
  const Matrix b = annihilation(dim).entries;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      CHECK(b(i, j) == (j == i + 1 ? Complex{std::sqrt(static_cast<double>(j)), 0.0} : Complex{}));
  const Matrix comm = b * b.adjoint() - b.adjoint() * b;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (i != j) {
        CHECK(comm(i, j) == Complex{});
        continue;
      }
      // sqrt(m)^2 is m only up to rounding.
      const double expected = i + 1 < dim ? 1.0 : -(dim - 1.0);
      CHECK(comm(i, j).imag() == 0.0);
      CHECK(std::abs(comm(i, j).real() - expected) <= 4.0 * dim * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("vectorize is column stacking and round-trips") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const Vector v = vectorize(m);
  CHECK(v(1) == Complex{3.0, 0.0});
  CHECK(v(2) == Complex{2.0, 0.0});
  CHECK(unvectorize(v, 2) == m);
  CHECK_THROWS_AS(unvectorize(v, 3), ParameterError);
}

TEST_CASE("HP generators preserve trace and Hermiticity") {
  std::mt19937_64 rng(11);
  const EffectiveModel m = make_hp_model(4, 0.7, {0.3, -0.2}, 0.25, 1.3);
  for (bool g0 : {false, true}) check_preserves_trace_and_hermiticity(build_hp_liouvillian(m, 8, g0), rng, 1e-12);
  // Rates of order 1e2 here; entries of L rho reach ~1e4.
  for (bool g0 : {false, true}) check_preserves_trace_and_hermiticity(build_hp_liouvillian(fig4_point(-50.0), 8, g0), rng, 1e-12 * 1e4);
}

TEST_CASE("full spin-cavity generators preserve trace and Hermiticity") {
  std::mt19937_64 rng(12);
  PhysicalParams p;
  p.kappa = 20.0;
  p.g_c = 1.5;
  p.omega_rabi = 0.8;
  p.epsilon_drive = 1.1;
  p.phi1 = 0.4;
  p.phi2 = -1.0;
  p.delta_c = 0.6;
  p.omega_n_minus_omega_c = 1.2;
  p.eta = 0.5;
  check_preserves_trace_and_hermiticity(build_full_liouvillian(p, 1, 4), rng, 1e-12);
  check_preserves_trace_and_hermiticity(build_full_liouvillian(p, 2, 4), rng, 1e-12);
}

TEST_CASE("generator rejects too small a Fock space") {
  CHECK_THROWS_AS(build_hp_liouvillian(make_hp_model(2, 0.0, {}, 0.0, 1.0), 3, false), ParameterError);
  PhysicalParams p;
  CHECK_THROWS_AS(build_full_liouvillian(p, 3, 4), ParameterError);
  CHECK_THROWS_AS(build_full_liouvillian(p, 1, 3), ParameterError);
}

TEST_CASE("pure decay relaxes to the vacuum") {
  const EffectiveModel m = make_hp_model(10, 0.4, {}, 0.0, 2.0);
  const Liouvillian l = build_hp_liouvillian(m, 12, false);
  const DensityMatrix rho = steady_state(l);
  CHECK(trace_distance(rho.entries, projector(12, 0)) < 1e-12);
  CHECK((l.matrix * vectorize(rho.entries)).norm() <= 1e-10 * l.matrix.norm());
  const Observables obs = observables_from_rho(rho);
  CHECK(obs.mean_excitation == doctest::Approx(0.0));
  CHECK(std::abs(obs.amplitude) < 1e-14);
  CHECK_FALSE(obs.g2.has_value());
  CHECK(obs.branch == Branch::Numeric);
}

TEST_CASE("linear drive gives the coherent state") {
  EffectiveModel m = make_hp_model(10, 0.8, {}, 0.0, 1.5);
  m.bar_omega = {0.9, -0.4};
  const Complex beta = Complex{0.0, -1.0} * m.bar_omega / Complex{0.5 * m.big_gamma, m.bar_delta_n};
  const int dim = 24;
  const DensityMatrix rho = steady_state(build_hp_liouvillian(m, dim, false));
  const Matrix target = coherent_state(dim, beta);
  const double fidelity = std::real((target * rho.entries).trace());
  CHECK(fidelity > 1.0 - 1e-8);
  const Observables obs = observables_from_rho(rho);
  CHECK(std::abs(obs.amplitude - beta) < 1e-10);
  CHECK(*obs.g2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("observables of reference states") {
  const int dim = 40;
  const Complex beta{1.2, -0.5};
  const Observables coh = observables_from_rho(DensityMatrix{dim, coherent_state(dim, beta)});
  CHECK(coh.mean_excitation == doctest::Approx(std::norm(beta)).epsilon(1e-12));
  CHECK(std::abs(coh.amplitude - beta) < 1e-12);
  CHECK(*coh.g2 == doctest::Approx(1.0).epsilon(1e-10));

  const Observables fock = observables_from_rho(DensityMatrix{dim, projector(dim, 1)});
  CHECK(fock.mean_excitation == 1.0);
  CHECK(*fock.g2 == 0.0);

  const Observables vac = observables_from_rho(DensityMatrix{dim, projector(dim, 0)});
  CHECK(vac.mean_excitation == 0.0);
  CHECK(vac.second_moment == 0.0);
  CHECK_FALSE(vac.g2.has_value());
}

TEST_CASE("physicality report flags each invariant") {
  DensityMatrix good{6, projector(6, 0)};
  CHECK(good.physicality().ok());

  Matrix bad = projector(6, 0);
  bad(1, 1) = -1e-6;
  bad(0, 0) = 1.0 + 1e-6;
  const PhysicalityReport r = DensityMatrix{6, bad}.physicality();
  CHECK(r.trace_ok());
  CHECK_FALSE(r.positive_ok());
  CHECK(r.describe().find("min eigenvalue") != std::string::npos);

  const PhysicalityReport top = DensityMatrix{6, projector(6, 5)}.physicality();
  CHECK_FALSE(top.truncation_ok());

  Matrix skew = projector(6, 0);
  skew(0, 1) = 1e-6;
  CHECK_FALSE(DensityMatrix{6, skew}.physicality().hermitian_ok());
}

TEST_CASE("steady states reproduce brute-force Fock oracles") {
  for (const FockOracle& o : kOracles) {
    const EffectiveModel m = make_hp_model(o.n, o.bar_delta_n, o.tilde_omega, o.bar_delta, o.big_gamma);
    const Observables obs = observables_from_rho(steady_state(build_hp_liouvillian(m, 2 * o.n + 1, false)), o.n);
    CHECK(obs.mean_excitation == doctest::Approx(o.mean).epsilon(1e-9));
    CHECK(obs.second_moment == doctest::Approx(o.second).epsilon(1e-9));
    CHECK(std::abs(obs.amplitude - o.amplitude) <= 1e-9 * std::abs(o.amplitude));
  }
}

TEST_CASE("numeric solver agrees with the analytic series at fig4 points") {
  for (double dc : {-120.0, -50.0, 0.0, 80.0}) {
    const EffectiveModel m = fig4_point(dc);
    const NumericSolution s = solve_numeric(m, false);
    const Observables a = analytic_auto(m);
    CHECK(s.observables.mean_excitation == doctest::Approx(a.mean_excitation).epsilon(1e-6));
    CHECK(*s.observables.g2 == doctest::Approx(*a.g2).epsilon(1e-6));
    CHECK(std::abs(s.observables.amplitude - a.amplitude) <= 1e-6 * std::abs(a.amplitude));
    CHECK(s.doubling_change <= 1e-3);
    CHECK(s.physicality.ok());
  }
}

TEST_CASE("Gamma_0 terms barely move the mean but change g2") {
  const EffectiveModel m = fig4_point(-50.0);
  const NumericSolution off = solve_numeric(m, false);
  const NumericSolution on = solve_numeric(m, true);
  CHECK(on.observables.mean_excitation == doctest::Approx(off.observables.mean_excitation).epsilon(0.1));
  CHECK(std::abs(*on.observables.g2 - *off.observables.g2) > 1e-3);
}

TEST_CASE("escalation stops at max_dim with a TruncationError") {
  const EffectiveModel m = make_hp_model(100, 0.0, {0.0, 0.0}, 0.0, 1.0);
  EffectiveModel strong = m;
  strong.bar_omega = {6.0, 0.0};  // coherent state with mean 144
  try {
    solve_numeric(strong, false, NumericControl{16, 32, 1e-3});
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.dim() == 32);
    CHECK(e.boundary_population() > 1e-8);
    CHECK(std::string(e.what()).find("max_dim") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_numeric(m, false, NumericControl{2, 8, 1e-3}), ParameterError);
}

TEST_CASE("degenerate generator is reported with its singular values") {
  const EffectiveModel m = make_hp_model(5, 0.3, {}, 0.0, 0.0);
  try {
    steady_state(build_hp_liouvillian(m, 6, false));
    FAIL("expected DegenerateSteadyStateError");
  } catch (const DegenerateSteadyStateError& e) {
    CHECK(e.smallest_singular_value() < 1e-12);
    CHECK(e.next_singular_value() < 1e-12);
  }
}

TEST_CASE("undriven Gamma_0 generator past level N+1 is degenerate") {
  // The effective decay out of level m is Gamma m (1 - (m-1)/N), zero at m = N+1.
  const EffectiveModel m = make_hp_model(10, 0.4, {}, 0.0, 2.0);
  CHECK_NOTHROW(steady_state(build_hp_liouvillian(m, 11, true)));
  CHECK_THROWS_AS(steady_state(build_hp_liouvillian(m, 12, true)), DegenerateSteadyStateError);
}

TEST_CASE("evolve with a zero generator leaves rho unchanged") {
  Liouvillian l{5, Matrix::Zero(25, 25), 0.0};
  std::mt19937_64 rng(3);
  const Matrix rho = random_hermitian(5, rng);
  CHECK(evolve(l, rho, 3.0, 0.1) == rho);
}

TEST_CASE("evolve follows exact exponential decay") {
  const EffectiveModel m = make_hp_model(10, 0.0, {}, 0.0, 1.7);
  const Liouvillian l = build_hp_liouvillian(m, 6, false);
  DensityMatrix rho{6, projector(6, 1)};
  double t = 0.0;
  for (int k = 0; k < 5; ++k) {
    rho = evolve(l, rho, 0.4, 0.01);
    t += 0.4;
    CHECK(observables_from_rho(rho).mean_excitation == doctest::Approx(std::exp(-m.big_gamma * t)).epsilon(1e-9));
  }
}

TEST_CASE("evolve enforces the step-size rule") {
  const EffectiveModel m = make_hp_model(10, 0.0, {}, 0.0, 2.0);
  const Liouvillian l = build_hp_liouvillian(m, 6, false);
  CHECK_THROWS_AS(evolve(l, projector(6, 1), 1.0, 0.06), StepSizeError);
  CHECK_THROWS_AS(evolve(l, projector(6, 1), 1.0, 0.0), StepSizeError);
  CHECK_THROWS_AS(evolve(l, projector(6, 1), -1.0, 0.01), StepSizeError);
  CHECK_NOTHROW(evolve(l, projector(6, 1), 1.0, 0.05));
}

TEST_CASE("long-time evolution reaches the fig4 steady state") {
  const EffectiveModel m = fig4_point(-50.0);
  const Liouvillian l = build_hp_liouvillian(m, 16, true);
  const Matrix rho = evolve(l, projector(16, 0), 1.0, 0.1 / l.fastest_rate);
  CHECK(trace_distance(rho, steady_state_matrix(l)) < 1e-6);
}

TEST_CASE("density matrix dump is row-major re,im pairs") {
  Matrix rho(2, 2);
  rho << Complex{0.75, 0.0}, Complex{0.25, -0.5}, Complex{0.25, 0.5}, Complex{0.25, 0.0};
  std::ostringstream out;
  write_density_matrix(out, rho);
  CHECK(out.str() == "0.75,0 0.25,-0.5\n0.25,0.5 0.25,0\n");
}

TEST_CASE("spin-cavity operators") {
  const SpinCavityOperators one = spin_cavity_operators({1, 4});
  const Matrix comm = one.s_minus.adjoint() * one.s_minus - one.s_minus * one.s_minus.adjoint();
  CHECK((comm - 2.0 * one.s_z).cwiseAbs().maxCoeff() == 0.0);
  CHECK(((one.a * one.s_minus) - (one.s_minus * one.a)).cwiseAbs().maxCoeff() == 0.0);

  const SpinCavityOperators two = spin_cavity_operators({2, 4});
  REQUIRE(two.sigma_minus.size() == 2);
  CHECK((two.s_minus - two.sigma_minus[0] - two.sigma_minus[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((two.sigma_minus[0] * two.sigma_minus[1] - two.sigma_minus[1] * two.sigma_minus[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(two.s_z.rows() == 16);
}

TEST_CASE("full-model steady state of a driven cavity is the displaced vacuum") {
  PhysicalParams p;
  p.n_emitters = 1;
  p.g_c = 0.0;
  p.kappa = 6.0;
  p.delta_c = -1.0;
  p.omega_rabi = 0.0;
  p.epsilon_drive = 1.5;
  p.phi2 = 1.1;
  const int dim = 14;
  const SpinCavityState s = full_steady_state(p, 1, dim);
  CHECK(s.warnings.empty());
  const Complex beta = -displacement_alpha(p) * std::polar(1.0, -p.phi2);
  // Cavity marginal: trace out the spin (ground state, block 0).
  const Matrix cavity = s.entries.block(0, 0, dim, dim);
  CHECK(std::real((coherent_state(dim, beta) * cavity).trace()) > 1.0 - 1e-10);
}

TEST_CASE("cross-correlated dissipator beyond eta = 1/sqrt(n_spins) is flagged") {
  PhysicalParams p;
  p.kappa = 50.0;
  p.g_c = 2.0;
  p.omega_rabi = 1.0;
  p.eta = 0.9;
  const SpinCavityState s = full_steady_state(p, 2, 4);
  REQUIRE_FALSE(s.warnings.empty());
  CHECK(s.warnings.front().find("completely positive") != std::string::npos);
  p.eta = 0.7;
  const SpinCavityState ok = full_steady_state(p, 2, 4);
  for (const std::string& w : ok.warnings) CHECK(w.find("completely positive") == std::string::npos);
}

TEST_CASE("full-model oracle checks") {
  for (const FullModelCheck& c : run_full_model_checks()) {
    INFO(c.name << ": " << c.value << " vs " << c.expected << " (" << c.detail << ")");
    CHECK(c.passed);
  }
}
