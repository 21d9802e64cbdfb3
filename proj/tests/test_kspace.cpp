#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "rydfid/analytic.hpp"
#include "rydfid/kspace.hpp"
#include "rydfid/pulses.hpp"
#include "rydfid/units.hpp"

using namespace rydfid;

namespace {

PhysicalSetup two_beam_setup(double temperature_K, double trap_hz) {
  PhysicalSetup s;
  s.temperature_K = temperature_K;
  s.trap_freq_parallel_Hz = trap_hz;
  s.trap_freq_perp_Hz = trap_hz;
  s.beams = {{459.0, +1, 2.0}, {1038.0, -1, 2.0}};
  return s;
}

constexpr double kKickEff = 7.635691842568413;  // rad/um, counter-propagating pair

}  // namespace

TEST_CASE("default momentum grid covers the thermal span and snaps the kick") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  const double kick = effective_wavevector(setup);
  CHECK(kick == doctest::Approx(kKickEff).epsilon(1e-12));
  const auto grid = KGrid::make_default(setup, kick, 512);
  CHECK(grid.nk == 512);
  CHECK(grid.covers(setup, kick));
  // symmetric grid, kick = integer number of steps
  CHECK(grid.k(0) == doctest::Approx(-grid.k(511)).epsilon(1e-12));
  const double steps = kick / grid.dk;
  CHECK(std::abs(steps - std::lround(steps)) < 1e-9);
  CHECK_FALSE(KGrid{-10.0, 0.05, 16}.covers(setup, kick));
  CHECK_THROWS_AS(KGrid::make_default(setup, kick, 4), std::invalid_argument);
  // too coarse to both cover the span and keep the kick on integer steps
  CHECK_THROWS_AS(KGrid::make_default(setup, kick, 16), std::invalid_argument);
}

TEST_CASE("resonant flat-top 2pi rotation without recoil returns minus one") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  const auto grid = KGrid::make_default(setup, 0.0, 64);
  const double omega = 10.0;
  const double width = 2.0 * pi / omega;  // full 2pi rotation
  const auto env = make_flat_top(omega, width, 0.0);
  const auto kern = propagate_two_level(grid, env, 0.0, 0.0, setup, 0.0, width);
  for (int i = 0; i < grid.nk; ++i) {
    CHECK(std::abs(kern.k11[i] + 1.0) < 1e-12);
    CHECK(kern.rydberg_residual[i] < 1e-24);
  }
}

TEST_CASE("adaptive path reproduces the exact flat-top propagator") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  const KGrid grid{-7.5, 1.0, 16};  // small probe grid, no thermal contraction
  const auto env = make_flat_top(8.0, 0.37, 0.1);
  const double delta = 0.3;
  const auto exact =
      propagate_two_level(grid, env, delta, kKickEff, setup, 0.0, 0.6);
  const auto ode = propagate_two_level(
      grid, env, [delta](double) { return delta; }, kKickEff, setup, 0.0, 0.6);
  for (int i = 0; i < grid.nk; ++i) {
    CHECK(std::abs(exact.k11[i] - ode.k11[i]) < 1e-8);
    CHECK(std::abs(exact.rydberg_residual[i] - ode.rydberg_residual[i]) < 1e-8);
  }
}

TEST_CASE("propagation is unitary per momentum sample") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  const KGrid grid{-7.5, 1.0, 16};  // small probe grid, no thermal contraction
  const auto env = make_gaussian_pair(30.0, 0.1, 0.5);
  const auto kern = propagate_two_level(
      grid, env, [](double t) { return -3.0 + 2.0 * t; }, kKickEff, setup,
      env.window_start(), env.window_stop());
  for (int i = 0; i < grid.nk; ++i)
    CHECK(std::norm(kern.k11[i]) + kern.rydberg_residual[i] ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sudden pi-pulse pair kernel reproduces the closed-form overlap") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  const auto grid = KGrid::make_default(setup, kKickEff, 1024);
  const double tau1 = 1.0044;
  const auto kern = delta_pi_pair_kernel(grid, kKickEff, setup, tau1);
  const auto res = chi_thermal(kern, setup, setup.omega_parallel());
  CHECK(res.epsilon == doctest::Approx(9.1845004265e-3).epsilon(1e-9));
  CHECK(res.phase == doctest::Approx(3.1276018423).epsilon(1e-9));
  const auto analytic = chi_two_pi(setup, tau1);
  CHECK(std::abs(res.chi - analytic.chi) < 1e-10);
  // a kick that is not an integer number of grid steps is rejected
  CHECK_THROWS_AS(delta_pi_pair_kernel(grid, kKickEff * 1.0003, setup, tau1),
                  std::invalid_argument);
}

TEST_CASE("zero-temperature sudden kernel matches the oscillator ground state") {
  // At T = 0 the thermal weights reduce to the ground-state momentum density;
  // for omega*tau << 1 the trap-off propagation agrees with the exact
  // in-trap ground-state overlap.
  auto setup = two_beam_setup(0.0, 10e3);
  const double tau = 0.05;
  const auto grid = KGrid::make_default(setup, kKickEff, 1024);
  const auto kern = delta_pi_pair_kernel(grid, kKickEff, setup, tau);
  const auto res = chi_thermal(kern, setup, setup.omega_parallel());
  const auto ho = chi_ho_ground_exact(setup, tau);
  CHECK(std::abs(std::abs(res.chi) - std::abs(ho.chi)) < 1e-9);
}

TEST_CASE("thermal contraction rejects grids that miss thermal weight") {
  const auto setup = two_beam_setup(5e-6, 20e3);
  KKernel kern;
  kern.grid = {0.0, 0.5, 16};  // one-sided sliver of the distribution
  kern.k11.assign(16, {1.0, 0.0});
  kern.rydberg_residual.assign(16, 0.0);
  CHECK_THROWS_AS(chi_thermal(kern, setup, setup.omega_parallel()),
                  std::runtime_error);
}

TEST_CASE("integrated Rydberg population of the detuned-Gaussian gates") {
  const double frozen_tdse[3] = {0.0961787, 0.0563214, 0.3567873};
  const double frozen_est[3] = {0.0952808, 0.0561033, 0.3557031};
  for (int row = 1; row <= 3; ++row) {
    const auto g = table_adiabatic_gate(row).adiabatic;
    const auto env = make_gaussian(g.omega0, g.delta_t);
    const double delta = g.delta_over_omega0 * g.omega0;
    const double t = tau_a(env, delta);
    const double est = tau_a_adiabatic_estimate(env, delta);
    CHECK(t == doctest::Approx(frozen_tdse[row - 1]).epsilon(1e-4));
    CHECK(est == doctest::Approx(frozen_est[row - 1]).epsilon(1e-6));
    // adiabatic estimate tracks the time-dependent result to about a percent
    CHECK(std::abs(est - t) / t < 1e-2);
  }
  // a resonant pulse leaves the Rydberg state populated and is rejected
  CHECK_THROWS_AS(tau_a(make_flat_top(10.0, 0.1), 0.0), std::runtime_error);
}

TEST_CASE("branch-phase sensitivity equals the integrated population") {
  const auto g = table_adiabatic_gate(1).adiabatic;
  const auto env = make_gaussian(g.omega0, g.delta_t);
  const double delta = g.delta_over_omega0 * g.omega0;
  const double a1 = adiabatic_phase_check(env, delta, 0.01);
  const double a2 = adiabatic_phase_check(env, delta, 0.02);
  CHECK(a1 == doctest::Approx(9.52724872e-4).epsilon(1e-6));
  // d(phase)/d(deltaE) ~ tau_a
  CHECK(std::abs(a1 / 0.01 - tau_a(env, delta)) / tau_a(env, delta) < 1e-2);
  // linear response regime
  CHECK(std::abs(a2 - 2.0 * a1) / (2.0 * a1) < 5e-3);
}

TEST_CASE("matched-recoil ladder passage leaves the thermal overlap intact") {
  // Dark-state passage |1> -> |R> -> |1> with equal photon recoils on both
  // legs: the net recoil phase cancels for every momentum class, so the
  // thermal overlap survives to integrator accuracy.  A constant upper-leg
  // coupling keeps the adiabatic gap open at all times, which suppresses the
  // intermediate-state leakage far below the recoil scales probed here.
  const auto setup = two_beam_setup(2e-6, 20e3);
  const auto grid = KGrid::make_default(setup, 0.0, 64);
  const auto omega1 = make_gaussian(600.0, 0.3);
  const auto omegaR = make_flat_top(600.0, 2.4, -1.2);
  OdeOptions tight;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-12;
  const auto kern = propagate_stirap(grid, omega1, omegaR, 0.0, 0.0, kKickEff,
                                     kKickEff, setup, -1.2, 1.2, tight);
  double amin = 2.0, amax = 0.0, rmax = 0.0;
  for (int i = 0; i < grid.nk; ++i) {
    amin = std::min(amin, std::abs(kern.k11[i]));
    amax = std::max(amax, std::abs(kern.k11[i]));
    rmax = std::max(rmax, kern.rydberg_residual[i]);
  }
  CHECK(rmax < 1e-12);          // exponentially small leakage
  CHECK(amax <= 1.0 + 1e-12);   // unitarity
  CHECK(1.0 - amin < 1e-11);    // |K11| = 1 per momentum sample
  CHECK(amax - amin < 1e-12);   // and uniform across the ensemble
  const auto res = chi_thermal(kern, setup, setup.omega_parallel());
  CHECK(res.epsilon < 1e-10);   // null result: no recoil decoherence
}

TEST_CASE("mismatched-recoil ladder passage dephases like the analytic model") {
  const auto setup = two_beam_setup(2e-6, 20e3);
  const auto grid = KGrid::make_default(setup, 0.0, 64);
  const auto omega1 = make_gaussian(600.0, 0.3);
  const auto omegaR = make_flat_top(600.0, 2.4, -1.2);
  const auto run = [&](double kR) {
    const auto kern = propagate_stirap(grid, omega1, omegaR, 0.0, 0.0, kKickEff,
                                       kR, setup, -1.2, 1.2);
    return chi_thermal(kern, setup, setup.omega_parallel()).epsilon;
  };
  const double e3 = run(kKickEff - 3.0);
  const double e6 = run(kKickEff - 6.0);
  CHECK(e3 == doctest::Approx(2.970039e-5).epsilon(3e-3));
  CHECK(e6 == doctest::Approx(1.187659e-4).epsilon(3e-3));
  // quadratic in the recoil mismatch
  CHECK(e6 / e3 == doctest::Approx(4.0).epsilon(1e-2));
  // the effective exposure time is the Rydberg residence time of the passage,
  // and the closed-form model evaluated there reproduces the simulation
  const double tau_eff = 0.2274578;  // = int P_R dt for this pulse pair
  const auto model = eps_stirap(setup, kKickEff, kKickEff - 6.0, tau_eff);
  CHECK(model.epsilon == doctest::Approx(e6).epsilon(5e-3));
}
