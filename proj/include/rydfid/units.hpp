#pragma once

#include <string>
#include <vector>

#include "rydfid/constants.hpp"

// Experimental setup description and unit handling.
//
// PhysicalSetup is the single source of truth for atom, trap, beam and Rydberg
// parameters.  Fields are stored in the units an experimentalist would quote
// (amu, kelvin, Hz, nm, um, us, rad/s); accessor methods convert to the
// internal unit system of constants.hpp (um, us, energies as rad/us).

namespace rydfid {

// Conversions between SI / lab units and internal units.  Kept as a struct of
// static functions so call sites read unit_system-style: UnitSystem::time_us(t).
struct UnitSystem {
  // --- to internal ---
  static double mass_from_amu(double amu) { return amu * mass_internal_per_amu; }
  static double mass_from_kg(double kg) { return kg / hbar_SI * 1e-6; }
  static double time_from_s(double s) { return s * 1e6; }
  static double length_from_m(double m) { return m * 1e6; }
  static double energy_from_joule(double j) { return j / hbar_SI * 1e-6; }
  // thermal energy kB*T as rad/us
  static double energy_from_kelvin(double k) { return k * kB_over_hbar; }
  // ordinary frequency f in Hz -> angular frequency rad/us
  static double angular_freq_from_hz(double f) { return 2.0 * pi * f * 1e-6; }
  static double angular_freq_from_rad_s(double w) { return w * 1e-6; }

  // --- back to SI / lab ---
  static double mass_to_amu(double m) { return m / mass_internal_per_amu; }
  static double mass_to_kg(double m) { return m * hbar_SI * 1e6; }
  static double time_to_s(double t) { return t * 1e-6; }
  static double length_to_m(double x) { return x * 1e-6; }
  static double energy_to_joule(double e) { return e * hbar_SI * 1e6; }
  static double energy_to_kelvin(double e) { return e / kB_over_hbar; }
  static double angular_freq_to_hz(double w) { return w / (2.0 * pi) * 1e6; }
  static double angular_freq_to_rad_s(double w) { return w * 1e6; }
};

// One excitation beam.  `direction` is the sign with which this beam's photon
// momentum enters the net two-photon recoil (+1 or -1); beams whose momentum
// transfers oppose each other get opposite signs.
struct Beam {
  double wavelength_nm = 0.0;
  int direction = +1;
  double waist_um = 0.0;  // 1/e^2 intensity radius w0
};

struct PhysicalSetup {
  double mass_amu = cs133_mass_amu;
  double temperature_K = 0.0;
  double trap_freq_parallel_Hz = 0.0;  // along the beam axis
  double trap_freq_perp_Hz = 0.0;      // transverse
  bool trap_on = true;
  std::vector<Beam> beams;
  double rydberg_lifetime_us = 0.0;  // <=0 means no radiative decay
  double blockade_B_rad_s = 2.0 * pi * 600.0e6;
  // Sign with which the blockade shift enters the doubly excited level
  // (-2*Delta + sign*B).  -1 corresponds to an attractive interaction.
  int blockade_sign = -1;
  double r12_um = 0.0;  // atom separation
  double misalign_x0_um = 0.0;  // beam-pointing offsets
  double misalign_y0_um = 0.0;

  // --- internal-unit accessors ---
  double mass() const { return UnitSystem::mass_from_amu(mass_amu); }
  double omega_parallel() const {
    return UnitSystem::angular_freq_from_hz(trap_freq_parallel_Hz);
  }
  double omega_perp() const {
    return UnitSystem::angular_freq_from_hz(trap_freq_perp_Hz);
  }
  // kB*T as rad/us
  double thermal_energy() const {
    return UnitSystem::energy_from_kelvin(temperature_K);
  }
  // decay rate 1/us (0 when no lifetime given)
  double gamma() const {
    return rydberg_lifetime_us > 0.0 ? 1.0 / rydberg_lifetime_us : 0.0;
  }
  double blockade() const {
    return UnitSystem::angular_freq_from_rad_s(blockade_B_rad_s);
  }
};

// Net recoil wavevector K = |sum_i dir_i * 2*pi/lambda_i| in rad/um.
// K == 0 (matched beams) is a valid configuration, not an error.
double effective_wavevector(const PhysicalSetup& setup);

// Focusing geometry of the combined excitation field.  The two-photon Rabi
// frequency is the product of the beam amplitudes, so inverse-square waists
// and Rayleigh ranges add.
struct BeamGeometry {
  std::vector<double> rayleigh_um;  // per beam, x_R = pi w0^2 / lambda
  double waist_eff_um = 0.0;        // 1/w_eff^2 = sum 1/w0_i^2
  double rayleigh_eff_um = 0.0;     // 1/x_Reff^2 = sum 1/x_Ri^2
};
BeamGeometry effective_beam_geometry(const PhysicalSetup& setup);

// Thermal energy of a harmonic mode including zero-point motion:
//   kB*T_eff = hbar*omega * (1/2 + 1/(exp(hbar*omega/kB*T) - 1)),
// returned as rad/us.  T == 0 gives exactly omega/2 (no overflow).
double effective_thermal_energy(double temperature_K, double omega);

// Mean vibrational quantum nbar = 1/(exp(hbar*omega/kB*T)-1); 0 at T=0.
double mean_occupation(double temperature_K, double omega);

// Photon recoil energy E_rec/hbar = K^2 / (2 M), rad/us.
double recoil_energy(const PhysicalSetup& setup);

// rms size of the thermal oscillator state, sqrt(kB*T_eff/(M omega^2)), um.
double thermal_position_spread(const PhysicalSetup& setup, double omega);

// Momentum-space thermal length Delta_x = 1/sqrt(2 kB*T_eff M), um.  This is
// the coherence scale that a recoil walk-off delta_x is compared against.
double thermal_coherence_length(const PhysicalSetup& setup, double omega);

// Free-flight recoil walk-off delta_x = K * tau / M, um.
double recoil_walkoff(const PhysicalSetup& setup, double tau_us);

// Human-readable one-line summary (used by report headers).
std::string describe(const PhysicalSetup& setup);

}  // namespace rydfid
