#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rydfid/gates.hpp"
#include "rydfid/lindblad.hpp"
#include "rydfid/pulses.hpp"

// Cross-validation of the pure-state ensemble engine against a dense
// two-atom master-equation integration.  The density-matrix reference keeps
// the shelved decay products in an explicit dark label, so the two methods
// must agree on every Gram-matrix entry, not just on the fidelity.  The
// instances here use short pulses and a small Fock basis so each reference
// run stays around a second.

using namespace rydfid;

namespace {

PhysicalSetup cs_setup(double temperature_K, double trap_hz) {
  PhysicalSetup s;
  s.beams = {{459.0, +1, 2.0}, {1038.0, -1, 2.0}};
  s.temperature_K = temperature_K;
  s.trap_freq_parallel_Hz = trap_hz;
  return s;
}

GateSpec quick_adiabatic() {
  GateSpec g;
  g.kind = GateKind::adiabatic;
  g.adiabatic.omega0 = 2.0 * pi * 17.0;
  g.adiabatic.delta_over_omega0 = -0.6;
  g.adiabatic.delta_t = 0.06;
  g.adiabatic.blockade_rad_s = 2.0 * pi * 25.0e6;
  g.validate();
  return g;
}

GateSpec quick_pi_2pi_pi(double tau1, double dt1, double dt2) {
  GateSpec g;
  g.kind = GateKind::pi_2pi_pi;
  g.pi_2pi_pi.tau1 = tau1;
  g.pi_2pi_pi.delta_t1 = dt1;
  g.pi_2pi_pi.delta_t2 = dt2;
  g.pi_2pi_pi.omega1_max =
      calibrate_pulse_area(make_super_gaussian_single(1.0, dt1), pi);
  g.pi_2pi_pi.omega2_max =
      calibrate_pulse_area(make_super_gaussian_single(1.0, dt2), 2.0 * pi);
  g.validate();
  return g;
}

// Reference runs use tighter tolerances than the engine default because the
// density matrix carries ~1e4 coupled components.
constexpr OdeOptions kRefOde{1e-12, 1e-9, 1e-3};

double gram_diff(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

EnsembleResult engine(const GateHamiltonian& h) {
  GateHamiltonian he = h;
  he.ode = OdeOptions{};
  return run_gate_ensemble(he);
}

}  // namespace

TEST_CASE("density-matrix reference matches the engine without decay") {
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.gate = quick_adiabatic();
  h.n_max = 1;
  h.ode = kRefOde;

  LindbladResult lr = lindblad_reference(h, 0, 0);
  CHECK(lr.fock_levels == 2);
  CHECK(lr.hilbert_dim == 64);
  CHECK(lr.index(0, 0, 0, 0) == 0);
  CHECK(lr.index(3, 1, 3, 1) == 63);
  CHECK(lr.trace_defect < 1e-10);
  CHECK(lr.hermiticity_defect < 1e-12);
  CHECK(lr.dark_population < 1e-15);

  EnsembleResult ens = engine(h);
  CHECK(gram_diff(ens.gram, lr.ensemble.gram) < 1e-9);
  FidelityReport fe = bell_fidelity(ens);
  FidelityReport fl = bell_fidelity(lr.ensemble);
  CHECK(std::abs(fe.bell_fidelity - fl.bell_fidelity) < 1e-9);
  CHECK(fl.bell_fidelity == doctest::Approx(0.970552598913).epsilon(1e-6));
}

TEST_CASE("with decay every fidelity component still agrees") {
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.setup.rydberg_lifetime_us = 1.0;  // strong decay to stress the dark label
  h.gate = quick_adiabatic();
  h.n_max = 1;
  h.ode = kRefOde;

  LindbladResult lr = lindblad_reference(h, 0, 0);
  CHECK(lr.trace_defect < 1e-10);
  CHECK(lr.hermiticity_defect < 1e-12);
  // roughly 4% of the population decays during this instance
  CHECK(lr.dark_population ==
        doctest::Approx(3.779773e-2).epsilon(1e-3));

  EnsembleResult ens = engine(h);
  CHECK(gram_diff(ens.gram, lr.ensemble.gram) < 1e-8);
  FidelityReport fe = bell_fidelity(ens);
  FidelityReport fl = bell_fidelity(lr.ensemble);
  CHECK(std::abs(fe.bell_fidelity - fl.bell_fidelity) < 1e-8);
  CHECK(std::abs(fe.rho0000 - fl.rho0000) < 1e-8);
  CHECK(std::abs(fe.rho1111 - fl.rho1111) < 1e-8);
  CHECK(std::abs(std::abs(fe.rho0011) - std::abs(fl.rho0011)) < 1e-8);
  CHECK(fl.bell_fidelity == doctest::Approx(0.937687449145).epsilon(1e-6));
}

TEST_CASE("joint |11> channel of the pi-2pi-pi gate tracks the reference") {
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.setup.rydberg_lifetime_us = 2.0;
  h.setup.blockade_B_rad_s = 2.0 * pi * 20.0e6;
  h.n_max = 1;
  h.blocked = BlockedTreatment::exact;
  h.ode = kRefOde;

  SUBCASE("pulses cleanly separated in time") {
    h.gate = quick_pi_2pi_pi(0.4, 0.04, 0.06);
    LindbladResult lr = lindblad_reference(h, 0, 0);
    CHECK(lr.trace_defect < 1e-10);
    CHECK(lr.dark_population ==
          doctest::Approx(9.893309e-2).epsilon(1e-3));
    CHECK(gram_diff(engine(h).gram, lr.ensemble.gram) < 1e-8);
  }
  SUBCASE("middle pulse overlapping the outer lobes") {
    // The joint solve handles simultaneous drive on both atoms, so overlap
    // costs nothing in accuracy.
    h.gate = quick_pi_2pi_pi(0.3, 0.05, 0.08);
    LindbladResult lr = lindblad_reference(h, 0, 0);
    CHECK(gram_diff(engine(h).gram, lr.ensemble.gram) < 1e-8);
  }
}

TEST_CASE("light-shift shortcut is only valid for strong blockade") {
  // At |B| / max(Omega_2) ~ 20, far below the automatic-switch threshold,
  // replacing the blocked target by an analytic phase is visibly wrong while
  // the joint solve stays at integration accuracy.
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.setup.rydberg_lifetime_us = 2.0;
  h.setup.blockade_B_rad_s = 2.0 * pi * 20.0e6;
  h.gate = quick_pi_2pi_pi(0.4, 0.04, 0.06);
  h.n_max = 1;
  h.ode = kRefOde;

  LindbladResult lr = lindblad_reference(h, 0, 0);
  GateHamiltonian hs = h;
  hs.blocked = BlockedTreatment::stark;
  CHECK(gram_diff(engine(hs).gram, lr.ensemble.gram) > 1e-2);
  hs.blocked = BlockedTreatment::exact;
  CHECK(gram_diff(engine(hs).gram, lr.ensemble.gram) < 1e-8);
}

TEST_CASE("thermal ensemble equals the weighted sum of reference runs") {
  GateHamiltonian h;
  h.setup = cs_setup(1.0e-6, 50e3);
  h.setup.rydberg_lifetime_us = 1.0;
  h.gate = quick_adiabatic();
  h.n_max = 1;
  h.weight_cutoff = 0.05;
  h.ode = kRefOde;

  const auto members =
      thermal_ensemble(h.setup, h.setup.omega_parallel(), h.weight_cutoff);
  CHECK(members.size() == 3);
  Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
  for (const auto& m : members) {
    acc += m.weight * lindblad_reference(h, m.n1, m.n2).ensemble.gram;
  }
  CHECK(gram_diff(engine(h).gram, acc) < 1e-8);
}

TEST_CASE("zero drive leaves the Bell preparation untouched") {
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.gate = quick_adiabatic();
  h.gate.adiabatic.omega0 = 1e-9;
  h.n_max = 2;
  h.ode = kRefOde;

  // start from unequal vibrational levels to exercise the index map
  LindbladResult lr = lindblad_reference(h, 1, 2);
  CHECK(gram_diff(lr.ensemble.gram, Eigen::Matrix4cd::Ones()) < 1e-10);
  CHECK(lr.trace_defect < 1e-10);
}

TEST_CASE("reference validation guards") {
  GateHamiltonian h;
  h.setup = cs_setup(0.0, 50e3);
  h.gate = quick_adiabatic();
  h.ode = kRefOde;

  h.n_max = 0;
  CHECK_THROWS_AS(lindblad_reference(h, 0, 0), std::invalid_argument);
  h.n_max = 4;  // dense density matrix capped to keep runs tractable
  CHECK_THROWS_AS(lindblad_reference(h, 0, 0), std::invalid_argument);
  h.n_max = 1;
  CHECK_THROWS_AS(lindblad_reference(h, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(lindblad_reference(h, 0, -1), std::invalid_argument);
}
