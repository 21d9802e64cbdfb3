#pragma once

#include <stdexcept>
#include <string>

#include "rydfid/constants.hpp"

// Pulse-envelope families and gate parameter sets.
//
// Envelopes are real, non-negative Rabi amplitudes Omega(t) in rad/us.  Time
// conventions: the pair and single bump families are centred on t = 0 (pair
// lobes at -tau/2 and +tau/2); flat_top occupies [t_start, t_start + width);
// offset_gaussian occupies [0, T_pulse] with exact zeros at both ends.

namespace rydfid {

enum class PulseFamily {
  flat_top,
  gaussian_pair,         // exp(-(t±tau/2)^2/dt^2) lobes
  super_gaussian_pair,   // exp(-(t±tau/2)^6/dt^6) lobes
  super_gaussian_single, // exp(-t^6/dt^6)
  gaussian,              // exp(-t^2/dt^2)
  offset_gaussian,       // shifted Gaussian, zeroed at both ends
};

struct PulseEnvelope {
  PulseFamily family = PulseFamily::gaussian;
  double omega_max = 0.0;  // peak Rabi amplitude, rad/us
  double width = 0.0;      // dt / dt1 / dt2 / sigma, us
  double tau = 0.0;        // lobe separation, or T_pulse for offset_gaussian
  double t_start = 0.0;    // flat_top only

  double omega(double t) const;

  // Support window outside which the envelope is numerically negligible
  // (< ~1e-7 of peak for the Gaussian-type families).
  double window_start() const;
  double window_stop() const;

  // Dimensionless shape integral: area for omega_max = 1.
  double shape_integral() const;
};

// Named constructors.
PulseEnvelope make_flat_top(double omega_max, double width, double t_start = 0.0);
PulseEnvelope make_gaussian_pair(double omega_max, double dt, double tau);
PulseEnvelope make_super_gaussian_pair(double omega_max, double dt1, double tau1);
PulseEnvelope make_super_gaussian_single(double omega_max, double dt2);
PulseEnvelope make_gaussian(double omega_max, double dt);
PulseEnvelope make_offset_gaussian(double omega_max, double sigma, double t_pulse);

// Peak amplitude achieving a given pulse area for the envelope's shape
// (numeric quadrature of the shape integral).
double calibrate_pulse_area(const PulseEnvelope& envelope, double target_area);

// --- gate parameter sets -----------------------------------------------------

// Blockade C_Z: pi on control, 2pi on target, pi on control, with t^6
// super-Gaussian envelopes; tau1 separates the two pi lobes.
struct PiTwoPiPiParams {
  double omega1_max = 0.0;  // rad/us, pi-pulse peak
  double omega2_max = 0.0;  // rad/us, 2pi-pulse peak
  double tau1 = 0.0;        // us
  double delta_t1 = 0.0;    // us
  double delta_t2 = 0.0;    // us
};

// Detuned-Gaussian adiabatic C_Z applied to both atoms simultaneously.
struct AdiabaticParams {
  double omega0 = 0.0;            // rad/us, peak Rabi amplitude
  double delta_over_omega0 = 0.0; // constant detuning ratio (negative)
  double delta_t = 0.0;           // us, Gaussian width
  double blockade_rad_s = 0.0;    // rad/s; 0 = take the setup's value
};

enum class GateKind { pi_2pi_pi, adiabatic };

struct GateSpec {
  GateKind kind = GateKind::pi_2pi_pi;
  PiTwoPiPiParams pi_2pi_pi;
  AdiabaticParams adiabatic;

  void validate() const;  // throws std::invalid_argument on bad parameters
};

// Table parameter sets used throughout: blockade C_Z with
// (tau1, dt1, dt2) = (1.0044, 0.14, 0.22) us and pi/2pi-calibrated peaks,
// and the three adiabatic rows (Omega0 = 2pi*17 MHz).
GateSpec standard_pi_2pi_pi_gate();
GateSpec table_adiabatic_gate(int row);  // row = 1, 2, 3

}  // namespace rydfid
