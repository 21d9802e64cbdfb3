#pragma once

// Physical constants (CODATA 2018) and the internal unit system.
//
// All solver-facing quantities are expressed in "atomic experiment" units:
//   length  -> micrometres (um)
//   time    -> microseconds (us)
//   energy  -> angular frequency, rad/us  (i.e. E/hbar)
// In these units hbar == 1 and a particle of SI mass M enters as
//   mass_internal = (M / hbar_SI) * 1e-6   [us / um^2],
// so that p^2/2m, omega*(n+1/2), Rabi frequencies and detunings are all
// directly comparable rad/us numbers.

namespace rydfid {

// SI values.
inline constexpr double hbar_SI = 1.054571817e-34;   // J s
inline constexpr double kB_SI = 1.380649e-23;        // J / K
inline constexpr double amu_SI = 1.66053906660e-27;  // kg

inline constexpr double pi = 3.14159265358979323846;

// kB/hbar in rad/(us K): multiply a temperature in kelvin by this to get the
// thermal energy as an angular frequency in internal units.
inline constexpr double kB_over_hbar = kB_SI / hbar_SI * 1e-6;

// Mass conversion: atomic mass units -> internal mass (us/um^2).
inline constexpr double mass_internal_per_amu = amu_SI / hbar_SI * 1e-6;

// Commonly used defaults.
inline constexpr double cs133_mass_amu = 132.91;  // caesium atomic mass

}  // namespace rydfid
