#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rydfid/fock.hpp"
#include "rydfid/ode.hpp"
#include "rydfid/pulses.hpp"
#include "rydfid/units.hpp"

// Two-atom gate dynamics with motion.  Both gate families factorize into (or
// reduce to) small solves:
//  - blockade pi-2pi-pi: channels evolve as products of one-atom solves
//    (driven pi-pi, driven 2pi, blocked 2pi, idle); with t^6 envelopes the
//    control atom is fully transferred wherever the 2pi pulse has any
//    amplitude, so the product form is exact to well below 1e-10 in fidelity.
//  - adiabatic C_Z: one-atom solves for single-occupied channels plus a joint
//    two-atom solve for |11>.
// Channel states carry distinct internal labels, so the Bell-state reduced
// density matrix needs only the Gram matrix of qubit-projected motional
// states, accumulated over the thermal ensemble.

namespace rydfid {

enum class BlockedTreatment {
  exact,      // solve the blockade-shifted two-level problem
  stark,      // pure light-shift phase exp(-i sign int Omega^2/(4B) dt)
  automatic,  // stark when B / Omega_max >= 50, else exact
};

// Aggregate describing one gate run: physical setup, pulse parameters, basis
// and ensemble controls.
struct GateHamiltonian {
  PhysicalSetup setup;
  GateSpec gate;
  int n_max = 10;                 // vibrational levels 0..n_max per atom
  bool kicks_on = true;           // photon-recoil factors e^{iKx}
  double weight_cutoff = 1e-6;    // thermal ensemble truncation
  OdeOptions ode{};
  double window_sigmas = 4.0;     // Gaussian envelope truncation, +-n*dt
  int joint_fock_pad = 10;        // extra levels above max(n1,n2) in |11> solves
  BlockedTreatment blocked = BlockedTreatment::automatic;

  double blockade_rad_us() const;     // magnitude, rad/us (gate override or setup)
  double signed_blockade() const;     // with setup.blockade_sign applied
  double gate_window_start() const;
  double gate_window_stop() const;
};

// Gram matrix of the four computational channels {00, 01, 10, 11}:
// gram(a, b) = sum_members w <psi_b|psi_a> over qubit-projected motional
// states.  Theta-independent; all Bell readout quantities derive from it.
struct EnsembleResult {
  Eigen::Matrix4cd gram = Eigen::Matrix4cd::Zero();
  int members = 0;
  int n_max = 0;
  double norm_defect = 0.0;           // max | |psi|^2 + loss - 1 | seen
  double top_level_population = 0.0;  // max population in the top two levels
};

EnsembleResult run_gate_ensemble(const GateHamiltonian& h);

struct FidelityReport {
  double bell_fidelity = 0.0;
  double theta1 = 0.0, theta2 = 0.0;  // optimizing |1> phases
  double rho0000 = 0.0, rho1111 = 0.0;
  std::complex<double> rho0011{0.0, 0.0};
  bool phase_converged = false;
  int members = 0;
  int n_max = 0;
  double norm_defect = 0.0;
  double top_level_population = 0.0;
};

// Applies phases theta_j to |1>_j and a Hadamard to qubit 2, reduces over
// motion, and maximizes F = (rho_0000 + rho_1111)/2 + |rho_0011| over the
// phases (64-point grid, then golden-section refinement per axis).
FidelityReport bell_fidelity(const EnsembleResult& ensemble,
                             bool one_phase = false);

// Convenience: ensemble + readout in one call.
FidelityReport gate_fidelity(const GateHamiltonian& h, bool one_phase = false);

// Internal-states-only runs (no motion, no decay):
// tau_1 = one-atom int P_R dt;
// tau_R = (1/2) int [P_R1 + P_1R + 2 P_RR] dt and tau_RR = int P_RR dt
// from the |11> channel.
struct RydbergTimes {
  double tau_1 = 0.0;
  double tau_R = 0.0;
  double tau_RR = 0.0;
};
RydbergTimes rydberg_time_integrals(const GateHamiltonian& h);

// Transverse Rydberg-Rydberg impulse for the adiabatic gate: the blockade
// level is B[1 - 6(y2-y1)/r12] to linear order; in the relative coordinate
// y_rel = (y2-y1)/sqrt(2) the |11> channel is a three-level ladder
// {|11>, |W>, |RR>} with couplings sqrt(2) Omega/2 and a gradient force
// g (a + a^dag) on |RR>.  The centre of mass is a spectator.
// Throws when rms(y)/r12 > 0.1 (linearization invalid).
FidelityReport rr_kick_run(const GateHamiltonian& h, bool gradient_on,
                           bool one_phase = false);

}  // namespace rydfid
