#pragma once

#include <Eigen/Dense>

#include "rydfid/gates.hpp"

// Dense two-atom density-matrix reference solver.
//
// Evolves the full master equation for two driven atoms -- internal levels
// {0, 1, R, d} tensored with a truncated vibrational ladder per atom -- with
// the radiative decay R -> d as a Lindblad dissipator acting on the internal
// labels only.  The Hilbert space is (4 (n_max+1))^2 and the density matrix
// squares that, so the solver is guarded to n_max <= 3.  Its purpose is
// cross-validation of the pure-state ensemble engine: because the dark state
// never couples back to the qubit labels, the two methods must agree exactly
// on every qubit-projected quantity, and this solver makes no use of that
// structure (one dense Hamiltonian, one dense commutator).

namespace rydfid {

struct LindbladResult {
  EnsembleResult ensemble;  // qubit-projected channel Gram, engine convention
  Eigen::MatrixXcd rho;     // final density matrix
  int fock_levels = 0;      // vibrational levels per atom (n_max + 1)
  int hilbert_dim = 0;      // rho is hilbert_dim x hilbert_dim

  double trace_defect = 0.0;        // max |tr(rho) - 1| over the evolution
  double hermiticity_defect = 0.0;  // ||rho - rho^H||_F at the end
  double dark_population = 0.0;     // final weight with either atom in |d>

  // Flat index of |i1 m1> (x) |i2 m2>; internal labels 0,1,2,3 = {0,1,R,d}.
  int index(int i1, int m1, int i2, int m2) const;
};

// Evolves the Bell-protocol start (H (x) H)|11> (x) |n1 n2> over the gate
// window and reduces the final density matrix to the same projected channel
// Gram the ensemble engine produces, so the two can be compared entry by
// entry.  Throws for n_max outside [1, 3] or levels outside the basis.
LindbladResult lindblad_reference(const GateHamiltonian& h, int n1, int n2);

}  // namespace rydfid
