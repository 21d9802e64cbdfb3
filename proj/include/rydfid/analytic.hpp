#pragma once

#include <complex>
#include <vector>

#include "rydfid/units.hpp"

// Closed-form decoherence and infidelity estimates for recoil kicks, trapped
// motion, focusing inhomogeneity, radiative decay and interaction-force kicks.
// All functions are pure; energies/frequencies in internal units (rad/us).

namespace rydfid {

// Rydberg-time bookkeeping for the various gate styles.
struct KickTiming {
  double tau1 = 0.0;    // gap between the two pi pulses, us
  double tau2 = 0.0;    // effective 2pi-pulse duration (= delta_t/2), us
  double tau_a = 0.0;   // one-atom adiabatic Rydberg time, us
  double tau_R = 0.0;   // two-atom (symmetric) Rydberg time, us
  double tau_RR = 0.0;  // double-Rydberg time, us
};

// Motional overlap result.  epsilon == 1 - |chi| always; `leading_order_valid`
// is false when epsilon > 0.1, i.e. outside the regime where the O(K^2)
// expansions behind these formulas can be trusted.  Values are never clamped.
struct OverlapResult {
  std::complex<double> chi{1.0, 0.0};
  double epsilon = 0.0;
  double phase = 0.0;  // arg(chi), rad
  bool leading_order_valid = true;
};

// Overlap after a 2pi Rydberg pulse of effective duration tau2 (sudden
// regime, trap ignored during the pulse):
//   chi = -exp(-i E_rec tau2) * exp(-(dx/2 Dx)^2),
// dx = K tau2/M the recoil walk-off, Dx the thermal coherence length.
// Leading order: eps = K^2 tau2^2 kB T_eff / 2M.
OverlapResult chi_single_2pi(const PhysicalSetup& setup, double tau2);

// Overlap for a pi ... pi pair separated by tau1; same closed form with tau1.
OverlapResult chi_two_pi(const PhysicalSetup& setup, double tau1);

// Delta-kick pair separated by tau with the trap on during the gap:
//   eps = (K^2 kB T_eff / M w^2)(1 - cos w tau), leading order in K^2.
// The O(K^2) phase -(K^2/2Mw) sin(w tau) is reported in `phase` but excluded
// from |chi| (the corresponding |chi| correction is O(K^4)).
OverlapResult eps_ho_trap_on(const PhysicalSetup& setup, double tau);

// Exact ground-state (T=0) overlap for the same protocol:
//   |chi| = exp[-(K^2/2Mw)(1 - cos w tau)].
OverlapResult chi_ho_ground_exact(const PhysicalSetup& setup, double tau);

// Kick decoherence for a precomputed Rydberg dwell time tau_x (tau_a, tau_R
// or tau_R - tau_a); identical closed form to chi_two_pi.
OverlapResult eps_adiabatic(const PhysicalSetup& setup, double tau_x);

// Two-photon ladder with intermediate-state recoil K1 and Rydberg-return
// recoil KR: eps = (dx/2 Dx)^2 with dx = (K1 - KR) tau / M.
OverlapResult eps_stirap(const PhysicalSetup& setup, double K1, double KR,
                         double tau);
// Convenience overload deriving K1/KR from two beam configurations.
OverlapResult eps_stirap(const PhysicalSetup& setup_K1,
                         const PhysicalSetup& setup_KR, double tau);

// Intensity-inhomogeneity (focusing) error of a 2pi pulse on a thermal atom.
struct FocusingResult {
  double eps_full = 0.0;             // all axial + transverse terms
  double eps_transverse_only = 0.0;  // w0-only form (Rayleigh terms dropped)
  double axial_fraction = 0.0;  // axial-term share of eps_full (dropping check)
  bool leading_order_valid = true;
};
//   eps_full = (pi^2/2) [ (3<x2>^2 + 6<x2>x0^2 + x0^4)/4 xR^4
//                       + (<x2> + x0^2)(2<y2> + y0^2)/xR^2 w0^2
//                       + (8<y2>^2 + 8<y2>y0^2 + y0^4)/w0^4 ]
// with <x2>, <y2> the thermal variances along/transverse to the beams and
// (x0, y0) static pointing offsets; w0, xR are the effective waist/Rayleigh
// range of the combined drive.  Transverse-only:
//   eps = (pi^2/2)(y0/w0)^4 + 4 pi^2 (y0/w0)^2 D + 4 pi^2 D^2,
//   D = kB T_eff,perp / (M w_perp^2 w0^2).
FocusingResult eps_focusing(const PhysicalSetup& setup);

// Relative sizes of the cubic Gouy phase x^3/3xR^3 and wavefront-curvature
// phase x((y-y0)^2+z^2)/xR w0^2 against the plane-wave phase k*x of each
// beam, evaluated at the rms thermal extent.  One entry per beam.
struct PhaseVariation {
  std::vector<double> gouy_rel;
  std::vector<double> curvature_rel;
};
PhaseVariation phase_variation_estimates(const PhysicalSetup& setup);

// Bell-state infidelity from photon kicks in a pi-2pi-pi sequence:
//   1 - F = (K^2 kB T_eff / 2M)(tau1^2/2 + 3 tau2^2/8).
double infidelity_pi2pipi_kick(const PhysicalSetup& setup, double tau1,
                               double tau2);

// Radiative contribution 1 - F = Gamma (tau1/2 + tau2/4).
double infidelity_radiative(double gamma, double tau1, double tau2);

// Kick infidelity of the adiabatic gate:
//   1 - F = (K^2 kB T_eff / 2M)(tau_a^2/2 + tau_R^2/2 + (tau_R - tau_a)^2/4).
double infidelity_adiabatic_kick(const PhysicalSetup& setup, double tau_a,
                                 double tau_R);

// Interaction-force kick while both atoms are Rydberg-excited:
//   1 - F = 27 B^2 kB T_eff,perp tau_RR^2 / (2 M w_perp^2 r12^2).
double infidelity_rydberg_kick(const PhysicalSetup& setup, double tau_RR);

// Temperature dependence of the pi-pair decoherence:
//   exact   = (K^2 tau1^2 w/4M) coth(w/2 kB T)
//   low_T   = (K^2 tau1^2 w/4M) [1 + 2 exp(-w/kB T)]
//   high_T  = (K^2 tau1^2 kB T/2M) [1 + (w/kB T)^2/12]
//   high_T_leading drops the bracketed correction.
struct DopplerForms {
  double exact = 0.0;
  double low_T = 0.0;
  double high_T = 0.0;
  double high_T_leading = 0.0;
};
DopplerForms doppler_asymptotics(const PhysicalSetup& setup, double tau1);

// Recoil heating: energy gained per kick pair and temperature growth over
// N trap-off/on gate cycles of off-time tau_off:
//   dE = E_rec (w tau1)^2,   T_N = T_eff exp[N (w tau_off)^2 / 2].
struct HeatingResult {
  double dE_per_kick = 0.0;     // rad/us
  double dE_per_kick_nK = 0.0;  // same, as dE/kB in nanokelvin
  double T_after_N_K = 0.0;     // kelvin
  double growth_factor = 1.0;   // T_N / T_eff
};
HeatingResult heating_estimates(const PhysicalSetup& setup, double tau1,
                                double tau_off, int n_gates);

}  // namespace rydfid
