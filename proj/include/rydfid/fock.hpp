#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rydfid/units.hpp"

// Truncated harmonic-oscillator (number) basis for one motional mode:
// photon-recoil displacement operators, Boltzmann ensembles, and undriven
// (idle) propagators with the trap on or off.

namespace rydfid {

struct FockBasis {
  int n_max = 0;        // highest retained vibrational quantum number
  double omega = 0.0;   // mode angular frequency, rad/us
  double lamb_dicke = 0.0;            // eta = K sqrt(1/(2 M omega))
  Eigen::MatrixXcd displacement;      // <m|e^{iKx}|n>, (n_max+1)^2
};

// eta = kick * x_zpf for the given mode; kick in rad/um.
FockBasis make_fock_basis(const PhysicalSetup& setup, double omega, int n_max,
                          double kick);

// Exact associated-Laguerre matrix elements of e^{i eta (a + a^dag)}.
// D is symmetric; unitary on the untruncated space.
Eigen::MatrixXcd build_displacement(int n_max, double eta_ld);

// Power-series variant: sum_{j<=order} (i eta X)^j / j! evaluated on a basis
// padded by `order` levels and then truncated, mirroring a finite expansion
// of the exponential.  Agrees with the exact form to ~1e-6 only while
// eta*sqrt(2n+1) stays below ~1.
Eigen::MatrixXcd build_displacement_taylor(int n_max, double eta_ld,
                                           int order = 10);

// p^2/2M of the mode expressed in the number basis of the (switched-off)
// trap: (omega/4)(2 a^dag a + 1 - a^dag^2 - a^2).
Eigen::MatrixXd kinetic_fock_matrix(int n_max, double omega);

// Propagator for an undriven atom over `duration`: number-basis phases
// e^{-i omega (n+1/2) t} with the trap on, kinetic-only evolution (one
// symmetric eigendecomposition) with the trap off.
Eigen::MatrixXcd idle_propagator(int n_max, double omega, bool trap_on,
                                 double duration);

struct ThermalMember {
  int n1 = 0;
  int n2 = 0;
  double weight = 0.0;
};

// Single-mode Boltzmann probabilities P(n) = (1-q) q^n, q = e^{-hw/kT},
// for n = 0..n_cap.  T <= 0 collapses onto the ground state.
std::vector<double> thermal_occupations(double temperature_K, double omega,
                                        int n_cap);

// Product ensemble (n1, n2): members accumulated in decreasing weight until
// the cumulative weight reaches 1 - weight_cutoff, then renormalized.
// weight_cutoff must lie in (0, 1].
std::vector<ThermalMember> thermal_ensemble(const PhysicalSetup& setup,
                                            double omega,
                                            double weight_cutoff);

}  // namespace rydfid
