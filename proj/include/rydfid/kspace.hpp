#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "rydfid/analytic.hpp"
#include "rydfid/ode.hpp"
#include "rydfid/pulses.hpp"
#include "rydfid/units.hpp"

// One-atom momentum-space propagation with the trap off.  Each momentum
// sample k_i evolves under its own few-level Hamiltonian; the kick K enters
// through the kinetic energy of the excited components.  The phase-corrected
// return amplitude kernel is contracted with the thermal momentum
// distribution to produce the overlap chi.

namespace rydfid {

struct KGrid {
  double k0 = 0.0;  // first sample, rad/um
  double dk = 0.0;  // spacing, rad/um
  int nk = 0;

  double k(int i) const { return k0 + i * dk; }
  double span() const { return (nk - 1) * dk; }

  // Thermal momentum scale sqrt(2 M kB T_eff) at the axial trap frequency.
  static double thermal_k(const PhysicalSetup& setup);

  // Centred grid covering +-(8 k_thermal + 2K), with dk adjusted to divide K
  // exactly so that momentum kicks map onto integer grid shifts.
  static KGrid make_default(const PhysicalSetup& setup, double kick,
                            int nk = 512);

  // True when the grid covers at least +-(8 k_thermal + |kick|).
  bool covers(const PhysicalSetup& setup, double kick) const;
};

struct KKernel {
  KGrid grid;
  std::vector<std::complex<double>> k11;  // phase-corrected return amplitudes
  std::vector<double> rydberg_residual;   // leftover excited population per k
};

using TimeFunction = std::function<double(double)>;

// Two-level (|1>, |R>) propagation: for each k,
//   i d/dt phi_1 = E(k) phi_1 + (Omega/2) phi_R
//   i d/dt phi_R = [E(k+K) - Delta(t)] phi_R + (Omega/2) phi_1
// from (1, 0); K11(i) = exp(+i E(k_i)(tf-t0)) * phi_1(tf).
// Flat-top envelopes with constant detuning use exact piecewise propagators.
KKernel propagate_two_level(const KGrid& grid, const PulseEnvelope& envelope,
                            const TimeFunction& detuning, double kick,
                            const PhysicalSetup& setup, double t0, double tf,
                            const OdeOptions& opt = {});
KKernel propagate_two_level(const KGrid& grid, const PulseEnvelope& envelope,
                            double detuning, double kick,
                            const PhysicalSetup& setup, double t0, double tf,
                            const OdeOptions& opt = {});

// Three-level ladder (|1>, |p>, |R>) with independent photon recoils:
//   diagonals E(k)+Delta1, E(k+K1), E(k+K1-KR)-DeltaR;
//   couplings Omega1/2 on 1<->p and OmegaR/2 on p<->R.
KKernel propagate_stirap(const KGrid& grid, const PulseEnvelope& omega1,
                         const PulseEnvelope& omegaR, double delta1,
                         double deltaR, double k1, double kR,
                         const PhysicalSetup& setup, double t0, double tf,
                         const OdeOptions& opt = {});

// Exact kernel for two delta-like pi kicks separated by tau1, evaluated via
// integer grid shifts: K11 = -exp(-i [E(k+K)-E(k)] tau1).
KKernel delta_pi_pair_kernel(const KGrid& grid, double kick,
                             const PhysicalSetup& setup, double tau1);

// chi = sum_i dk rho(k_i,k_i) K11(i) with the discrete thermal distribution
// renormalized to 1; throws when the grid carries less than 0.999 of the
// distribution.  omega selects the trap frequency for T_eff.
OverlapResult chi_thermal(const KKernel& kernel, const PhysicalSetup& setup,
                          double omega);

// Time-integrated Rydberg population of the resonant-pair (deltaE = 0)
// two-level problem; throws when the pulse fails to return the population
// (final P_R > 1e-4).
double tau_a(const PulseEnvelope& envelope, double delta,
             const OdeOptions& opt = {});

// Adiabatic-following estimate (1/2) int [1 - |Delta|/sqrt(Delta^2+Omega^2)] dt.
double tau_a_adiabatic_estimate(const PulseEnvelope& envelope, double delta);

// Accumulated phase difference alpha(deltaE) between the adiabatic branches
// of the deltaE-shifted and unshifted two-level problems; alpha ~ deltaE*tau_a
// for small deltaE.
double adiabatic_phase_check(const PulseEnvelope& envelope, double delta,
                             double deltaE);

}  // namespace rydfid
