#pragma once

#include "rydfid/pulses.hpp"

// C_Z phase condition, adiabatic-branch dynamical phases, and the
// two-parameter search for adiabatic gate settings.

namespace rydfid {

// Distance of phi11 - phi01 - phi10 from the nearest odd multiple of pi,
// in [0, pi].  This combination is invariant under single-qubit Z
// rotations, so it is zero exactly when the diagonal phase gate is locally
// equivalent to C_Z; periodic (period 2 pi) in each argument.
double cz_phase_defect(double phi01, double phi10, double phi11);

struct DynamicalPhases {
  double phi01 = 0.0;  // one excitable atom, rad
  double phi11 = 0.0;  // both atoms excitable, with blockade, rad
};

// Dynamical phases of the adiabatic gate, obtained by integrating the
// instantaneous eigenvalue branch continuously connected to |1> (one-atom
// 2x2 with the |R> diagonal at -Delta) and to |11> (symmetric two-atom 3x3
// with the signed blockade shift added on |RR>).  Branches are tracked by
// eigenvector continuity with local step halving, not by energy ordering;
// a persistent overlap below 0.9 throws.  Phases use the convention
// phi = -int lambda dt, which is non-negative for red detuning.
DynamicalPhases dynamical_phases(const AdiabaticParams& p,
                                 double blockade_signed_rad_s,
                                 double window_sigmas = 4.0);

// min over t of sqrt(Delta^2 + Omega^2) / |dtheta/dt|, theta the two-level
// mixing angle.  Large values mean deeply adiabatic evolution.  When the
// mixing angle never moves (zero drive, or Delta = 0) the margin is
// reported as std::numeric_limits<double>::max().
double adiabaticity_margin(const PulseEnvelope& envelope, double delta);

struct AdiabaticSearchResult {
  GateSpec spec;        // adiabatic kind carrying the best (ratio, delta_t)
  double defect = 0.0;  // cz_phase_defect at the optimum, rad
  double margin = 0.0;  // adiabaticity_margin at the optimum
};

// Direct search for (Delta/Omega0, delta_t) minimizing the C_Z phase defect
// at fixed blockade and peak Rabi frequency: coarse-grid seed followed by
// Nelder-Mead refinement, with a soft 1/margin penalty so that among
// near-degenerate minima the more adiabatic one wins.  delta_t is confined
// to [delta_t_lo, delta_t_hi]; if no zero-defect point exists in bounds the
// result simply carries the best defect found.
AdiabaticSearchResult search_adiabatic_params(double blockade_signed_rad_s,
                                              double omega0,
                                              double delta_t_lo,
                                              double delta_t_hi);

}  // namespace rydfid
