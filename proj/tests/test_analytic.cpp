#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccqed/analytic.hpp"
#include "ccqed/errors.hpp"

using namespace ccqed;

namespace {

// Brute-force Fock-space steady states of the Gamma_0 = 0 bosonic master
// equation (numpy, tests/oracles/generate_oracles.py).
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

EffectiveModel oracle_model(const FockOracle& o) {
  return make_hp_model(o.n, o.bar_delta_n, o.tilde_omega, o.bar_delta, o.big_gamma);
}

void check_against(const Observables& got, const FockOracle& o, double tol) {
  CHECK(got.mean_excitation == doctest::Approx(o.mean).epsilon(tol));
  CHECK(got.second_moment == doctest::Approx(o.second).epsilon(tol));
  CHECK(std::abs(got.amplitude - o.amplitude) <= tol * std::abs(o.amplitude));
}

PhysicalParams preset_like(double sqrt_n_eta, double delta_c) {
  PhysicalParams p;
  p.eta = sqrt_n_eta / p.sqrt_n();
  p.delta_c = delta_c;
  return p;
}

}  // namespace

TEST_CASE("series_in trivial cases") {
  // p = 0 (no drive): I_n = binom(Theta, 2N - n)
  const EffectiveModel undriven = make_hp_model(3, 0.4, 0.0, 0.2, 1.0);
  for (int n = 0; n <= 6; ++n) {
    const Complex got = series_in(undriven, n).to_complex();
    const Complex want = complex_binomial(undriven.series->theta, 6 - n).to_complex();
    CHECK(std::abs(got - want) <= 1e-13 * std::abs(want));
  }
  CHECK(series_in(undriven, 7).is_zero());

  const EffectiveModel m = oracle_model(kOracles[0]);
  const LogComplex top = series_in(m, 10);
  CHECK(top.log_magnitude == doctest::Approx(m.series->p).epsilon(1e-14));
  CHECK(std::abs(top.phase) < 1e-14);
}

TEST_CASE("series_in at integer Theta against a direct series") {
  // N = 1, Gamma = 0, bar_delta = 1, |tilde_Omega|^2 = 0.5, bar_Delta = -3.5: Theta = 4, p = 0.5.
  EffectiveModel m = make_hp_model(1, -3.5, std::sqrt(0.5), 1.0, 0.0);
  m.series->p = 0.5;
  m.series->theta = 4.0;
  CHECK(series_in(m, 0).to_complex().real() == doctest::Approx(13.395860324438541193).epsilon(1e-14));
}

TEST_CASE("series_in pole in the second 1F1 parameter names n") {
  // N = 3, Gamma = 0, bar_delta = tilde_Omega = 1, bar_Delta = 2 gives Theta = 2;
  // b = 1 + Theta + n - 2N = n - 3 is a pole for n <= 3.
  const EffectiveModel m = make_hp_model(3, 2.0, 1.0, 1.0, 0.0);
  REQUIRE(m.series);
  CHECK(m.series->theta.real() == doctest::Approx(2.0));
  CHECK(m.series->theta.imag() == 0.0);
  for (int n = 0; n <= 3; ++n) {
    try {
      series_in(m, n);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("n = " + std::to_string(n)) != std::string::npos);
    }
  }
  CHECK_NOTHROW(series_in(m, 4));
  const Observables obs = steady_observables(m);
  CHECK(std::isfinite(obs.mean_excitation));
}

TEST_CASE("steady_observables reproduces brute-force Fock steady states") {
  for (int i = 0; i < 2; ++i) {
    CAPTURE(i);
    const Observables obs = steady_observables(oracle_model(kOracles[i]));
    CHECK(obs.branch == Branch::MainSeries);
    check_against(obs, kOracles[i], 1e-10);
    REQUIRE(obs.g2);
    CHECK(*obs.g2 == doctest::Approx(obs.second_moment / (obs.mean_excitation * obs.mean_excitation)));
  }
}

TEST_CASE("literal I_n sums agree with the coefficient recurrence") {
  for (int i = 0; i < 2; ++i) {
    const EffectiveModel m = oracle_model(kOracles[i]);
    check_against(steady_observables_from_series(m), kOracles[i], 1e-9);
  }
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(8 * (u(rng) + 1.0));
    const EffectiveModel m =
        make_hp_model(n, 3.0 * u(rng), Complex{u(rng), u(rng)}, 0.05 + std::abs(u(rng)), 0.2 + 2.0 * std::abs(u(rng)));
    const Observables a = steady_observables(m);
    const Observables b = steady_observables_from_series(m);
    CAPTURE(trial);
    CHECK(b.mean_excitation == doctest::Approx(a.mean_excitation).epsilon(1e-8));
    CHECK(b.second_moment == doctest::Approx(a.second_moment).epsilon(1e-8));
    CHECK(std::abs(b.amplitude - a.amplitude) <= 1e-8 * std::max(1.0, std::abs(a.amplitude)));
  }
}

TEST_CASE("appendix_a_observables reproduces a brute-force steady state at bar_delta = 0") {
  const EffectiveModel m = oracle_model(kOracles[2]);
  CHECK(m.branch == Branch::AppendixA);
  const Observables obs = appendix_a_observables(m);
  CHECK(obs.branch == Branch::AppendixA);
  check_against(obs, kOracles[2], 1e-10);
  check_against(steady_observables(m), kOracles[2], 1e-10);
}

TEST_CASE("Appendix-A branch agrees with the coefficient recurrence for complex drive") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const EffectiveModel m = make_hp_model(10 + trial, 2.0 * u(rng), Complex{u(rng), u(rng)}, 0.0, 0.5 + std::abs(u(rng)));
    const Observables a = appendix_a_observables(m);
    const Observables b = steady_observables(m);
    CAPTURE(trial);
    CHECK(a.mean_excitation == doctest::Approx(b.mean_excitation).epsilon(1e-9));
    CHECK(a.second_moment == doctest::Approx(b.second_moment).epsilon(1e-9));
    CHECK(std::abs(a.amplitude - b.amplitude) <= 1e-9 * std::abs(b.amplitude));
  }
}

TEST_CASE("main series and Appendix A agree at |bar_delta| = 1e-6 Gamma") {
  for (double bar_delta_n : {-20.0, 0.0, 3.0, 40.0}) {
    for (double sign : {1.0, -1.0}) {
      const double gamma = 63.0;
      const EffectiveModel near = make_hp_model(100, bar_delta_n, Complex{0.25, 0.05}, sign * 1e-6 * gamma, gamma);
      REQUIRE(near.branch == Branch::MainSeries);
      const double main = steady_observables(near).mean_excitation;
      const double appendix = appendix_a_observables(near).mean_excitation;
      CAPTURE(bar_delta_n);
      CHECK(std::abs(main - appendix) <= 1e-3 * appendix);
    }
  }
}

TEST_CASE("no drive gives the vacuum on every branch") {
  const EffectiveModel main = make_hp_model(10, 1.0, 0.0, 0.3, 2.0);
  const EffectiveModel flat = make_hp_model(10, 1.0, 0.0, 0.0, 2.0);
  for (const Observables& obs : {steady_observables(main), appendix_a_observables(flat), linear_limit_observables(main)}) {
    CHECK(obs.mean_excitation == 0.0);
    CHECK(obs.second_moment == 0.0);
    CHECK(obs.amplitude == Complex{});
  }
  CHECK_FALSE(steady_observables(main).g2.has_value());
}

TEST_CASE("linear limit closed forms") {
  // N|G|^2 = (Gamma/2)^2 with N = 4, Gamma = 2: |G| = 1/2, tilde_Omega = G/(2 sqrt N) = 1/8
  const EffectiveModel half = make_hp_model(4, 0.7, 0.125, 0.1, 2.0);
  const Observables obs = linear_limit_observables(half);
  CHECK(obs.mean_excitation == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(obs.second_moment == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(obs.amplitude) == doctest::Approx(std::sqrt(0.5)));
  CHECK(obs.branch == Branch::LinearLimit);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const EffectiveModel m = make_hp_model(1 + i, 10.0 * u(rng), Complex{u(rng), u(rng)}, u(rng), 5.0 * std::abs(u(rng)));
    const Observables lin = linear_limit_observables(m);
    REQUIRE(lin.g2);
    CHECK(*lin.g2 == 1.0);
  }
}

TEST_CASE("weak drive at resonance approaches the linear limit") {
  // sqrt(N) eta = 1 curve with |G| reduced by 1e3; pick Delta_c with bar_Delta = 0.
  PhysicalParams p = preset_like(1.0, -50.0);
  p.omega_rabi = 5e-3;
  for (int it = 0; it < 50; ++it) {
    const EffectiveModel m = build_effective_model(p);
    p.delta_c -= m.bar_delta_n;
  }
  const EffectiveModel m = build_effective_model(p);
  REQUIRE(std::abs(m.bar_delta_n) < 1e-9);
  const double series = steady_observables(m).mean_excitation;
  const double linear = linear_limit_observables(m).mean_excitation;
  CHECK(std::abs(series - linear) <= 0.01 * linear);
}

TEST_CASE("invariants over random drives") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    PhysicalParams p = preset_like(u(rng) < 0.5 ? 0.0 : u(rng), -300.0 + 600.0 * u(rng));
    p.omega_rabi = 10.0 * u(rng);
    p.epsilon_drive = 6e3 * u(rng);
    p.phi1 = 6.283185307179586 * u(rng);
    const EffectiveModel m = build_effective_model(p);
    const Observables obs = analytic_auto(m);
    CAPTURE(i);
    CHECK(std::isfinite(obs.log_normalization));
    CHECK(obs.mean_excitation >= 0.0);
    CHECK(obs.second_moment >= 0.0);
    CHECK(std::norm(obs.amplitude) <= obs.mean_excitation * (1.0 + 1e-12));
    CHECK(obs.terms_used >= 1);
  }
}

TEST_CASE("far-detuned weak response stays coherent to rounding") {
  // Coefficient magnitudes reach e^1000 and beyond out here.
  for (const double delta_c : {-2.88e6, -8.55e5, 7.35e5, 2.82e6})
    for (const double sqrt_n_eta : {0.0, 1.0}) {
      const EffectiveModel m = build_effective_model(preset_like(sqrt_n_eta, delta_c));
      const Observables obs = steady_observables(m);
      CAPTURE(delta_c);
      CHECK(std::norm(obs.amplitude) <= obs.mean_excitation * (1.0 + 1e-14));
      CHECK(std::norm(obs.amplitude) >= obs.mean_excitation * (1.0 - 1e-9));
    }
}

TEST_CASE("nonlinear deviation of g2 with both drives (sqrt(N) eta = 1 and eta = 0)") {
  for (double sqrt_n_eta : {0.0, 1.0}) {
    double worst = 0.0;
    for (int i = 0; i < 401; ++i) {
      PhysicalParams p = preset_like(sqrt_n_eta, -300.0 + 1.5 * i);
      p.epsilon_drive = 3e3;
      const Observables obs = analytic_auto(build_effective_model(p));
      REQUIRE(obs.g2);
      worst = std::max(worst, std::abs(*obs.g2 - 1.0));
    }
    CAPTURE(sqrt_n_eta);
    CHECK(worst > 1e-3);
  }
}

TEST_CASE("weak-excitation warning") {
  const EffectiveModel strong = make_hp_model(2, 0.0, 3.0, 0.01, 0.5);
  const Observables obs = steady_observables(strong);
  CHECK(obs.mean_excitation / 2 > kWeakExcitationLimit);
  CHECK_FALSE(obs.warnings.empty());
  const Observables faint = steady_observables(make_hp_model(100, 0.0, 0.01, 0.01, 2.0));
  CHECK(faint.warnings.empty());
}

TEST_CASE("early termination leaves a negligible residual") {
  const EffectiveModel m = make_hp_model(100, 0.0, 0.05, 0.01, 2.0);
  const Observables obs = steady_observables(m);
  CHECK(obs.terms_used < 201);
  CHECK(obs.truncation_residual < 1e-15);
}
