#include "rydfid/lindblad.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rydfid/fock.hpp"
#include "rydfid/ode.hpp"
#include "rydfid/pulses.hpp"

namespace rydfid {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

enum : int { lbl0 = 0, lbl1 = 1, lblR = 2, lbld = 3 };

}  // namespace

int LindbladResult::index(int i1, int m1, int i2, int m2) const {
  return (i1 * fock_levels + m1) +
         4 * fock_levels * (i2 * fock_levels + m2);
}

LindbladResult lindblad_reference(const GateHamiltonian& h, int n1, int n2) {
  h.gate.validate();
  if (h.n_max < 1 || h.n_max > 3) {
    throw std::invalid_argument(
        "density-matrix reference requires 1 <= n_max <= 3");
  }
  const int N = h.n_max + 1;
  if (n1 < 0 || n1 >= N || n2 < 0 || n2 >= N) {
    throw std::invalid_argument("initial vibrational level outside the basis");
  }

  const PhysicalSetup& setup = h.setup;
  const double omega = setup.omega_parallel();
  const double kick = h.kicks_on ? effective_wavevector(setup) : 0.0;
  const double gamma = setup.gamma();
  const double b_shift = h.signed_blockade();
  const double t0 = h.gate_window_start();
  const double t1 = h.gate_window_stop();

  // one-atom motional Hamiltonian (identical for every internal label)
  Eigen::MatrixXcd hmot = Eigen::MatrixXcd::Zero(N, N);
  if (setup.trap_on) {
    for (int n = 0; n < N; ++n) hmot(n, n) = omega * (n + 0.5);
  } else {
    hmot = kinetic_fock_matrix(N - 1, omega).cast<cd>();
  }
  Eigen::MatrixXcd disp = Eigen::MatrixXcd::Identity(N, N);
  if (kick != 0.0) {
    disp = make_fock_basis(setup, omega, N - 1, kick).displacement;
  }

  const int d1 = 4 * N;
  const int dim = d1 * d1;

  // per-atom static part and drive structure factor
  Eigen::MatrixXcd atom_static = Eigen::MatrixXcd::Zero(d1, d1);
  for (int i = 0; i < 4; ++i) atom_static.block(i * N, i * N, N, N) = hmot;
  const double delta_r =
      h.gate.kind == GateKind::adiabatic
          ? -(h.gate.adiabatic.delta_over_omega0 * h.gate.adiabatic.omega0)
          : 0.0;
  for (int m = 0; m < N; ++m) {
    atom_static(lblR * N + m, lblR * N + m) += delta_r;
  }
  Eigen::MatrixXcd atom_drive = Eigen::MatrixXcd::Zero(d1, d1);
  atom_drive.block(lblR * N, lbl1 * N, N, N) = disp;
  atom_drive.block(lbl1 * N, lblR * N, N, N) = disp.adjoint();

  // two-atom embeddings (atom 1 is the fast index)
  auto embed1 = [&](const Eigen::MatrixXcd& op) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a2 = 0; a2 < d1; ++a2) {
      out.block(d1 * a2, d1 * a2, d1, d1) = op;
    }
    return out;
  };
  auto embed2 = [&](const Eigen::MatrixXcd& op) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a2 = 0; a2 < d1; ++a2) {
      for (int b2 = 0; b2 < d1; ++b2) {
        if (op(a2, b2) == cd{0.0, 0.0}) continue;
        for (int k = 0; k < d1; ++k) {
          out(d1 * a2 + k, d1 * b2 + k) = op(a2, b2);
        }
      }
    }
    return out;
  };

  LindbladResult out;
  out.fock_levels = N;
  out.hilbert_dim = dim;

  Eigen::MatrixXcd h_static = embed1(atom_static) + embed2(atom_static);
  for (int m1 = 0; m1 < N; ++m1) {
    for (int m2 = 0; m2 < N; ++m2) {
      const int a = out.index(lblR, m1, lblR, m2);
      h_static(a, a) += b_shift;
    }
  }
  const Eigen::MatrixXcd v1 = embed1(atom_drive);
  const Eigen::MatrixXcd v2 = embed2(atom_drive);

  PulseEnvelope env1, env2;
  if (h.gate.kind == GateKind::adiabatic) {
    env1 = make_gaussian(h.gate.adiabatic.omega0, h.gate.adiabatic.delta_t);
    env2 = env1;
  } else {
    const auto& p = h.gate.pi_2pi_pi;
    env1 = make_super_gaussian_pair(p.omega1_max, p.delta_t1, p.tau1);
    env2 = make_super_gaussian_single(p.omega2_max, p.delta_t2);
  }

  // dissipator index maps: how many atoms are in |R>, and the image of each
  // basis state under the R -> d jump of each atom
  std::vector<int> r_count(dim, 0), jump1(dim, -1), jump2(dim, -1);
  for (int i1 = 0; i1 < 4; ++i1) {
    for (int m1 = 0; m1 < N; ++m1) {
      for (int i2 = 0; i2 < 4; ++i2) {
        for (int m2 = 0; m2 < N; ++m2) {
          const int a = out.index(i1, m1, i2, m2);
          r_count[a] = (i1 == lblR) + (i2 == lblR);
          if (i1 == lblR) jump1[a] = out.index(lbld, m1, i2, m2);
          if (i2 == lblR) jump2[a] = out.index(i1, m1, lbld, m2);
        }
      }
    }
  }

  // Bell-protocol start: (H (x) H)|11> (x) |n1 n2>
  const double sgn[4] = {+1.0, -1.0, -1.0, +1.0};  // channels 00,01,10,11
  std::vector<int> chan(4);
  for (int c = 0; c < 4; ++c) {
    chan[c] = out.index(c >> 1, n1, c & 1, n2);
  }
  cvec state(static_cast<std::size_t>(dim) * dim, cd{0.0, 0.0});
  {
    Eigen::Map<Eigen::MatrixXcd> rho(state.data(), dim, dim);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        rho(chan[a], chan[b]) = 0.25 * sgn[a] * sgn[b];
      }
    }
  }

  Eigen::MatrixXcd ham(dim, dim), hr(dim, dim);
  auto rhs = [&](const cvec& y, cvec& dy, double t) {
    Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), dim, dim);
    Eigen::Map<Eigen::MatrixXcd> drho(dy.data(), dim, dim);
    ham = h_static;
    ham.noalias() += (0.5 * env1.omega(t)) * v1;
    ham.noalias() += (0.5 * env2.omega(t)) * v2;
    // rho stays Hermitian along the flow, so rho H = (H rho)^H
    hr.noalias() = ham * rho;
    drho = -kI * (hr - hr.adjoint());
    for (int b = 0; b < dim; ++b) {
      for (int a = 0; a < dim; ++a) {
        const int nr = r_count[a] + r_count[b];
        if (nr == 0) continue;
        const cd val = rho(a, b);
        drho(a, b) -= (0.5 * gamma * nr) * val;
        if (jump1[a] >= 0 && jump1[b] >= 0) {
          drho(jump1[a], jump1[b]) += gamma * val;
        }
        if (jump2[a] >= 0 && jump2[b] >= 0) {
          drho(jump2[a], jump2[b]) += gamma * val;
        }
      }
    }
  };

  double trace_defect = 0.0;
  double top_population = 0.0;
  auto observe = [&](const cvec& y, double) {
    Eigen::Map<const Eigen::MatrixXcd> rho(y.data(), dim, dim);
    cd tr{0.0, 0.0};
    for (int a = 0; a < dim; ++a) tr += rho(a, a);
    trace_defect = std::max(trace_defect, std::abs(tr - 1.0));
    if (N >= 2) {
      double top = 0.0;
      for (int i1 = 0; i1 < 4; ++i1) {
        for (int m1 = 0; m1 < N; ++m1) {
          for (int i2 = 0; i2 < 4; ++i2) {
            for (int m2 = 0; m2 < N; ++m2) {
              if (m1 < N - 2 && m2 < N - 2) continue;
              const int a = out.index(i1, m1, i2, m2);
              top += rho(a, a).real();
            }
          }
        }
      }
      top_population = std::max(top_population, top);
    }
  };

  integrate_cvec_observed(rhs, state, t0, t1, observe, h.ode);

  out.rho = Eigen::Map<const Eigen::MatrixXcd>(state.data(), dim, dim);
  out.trace_defect = trace_defect;
  out.hermiticity_defect = (out.rho - out.rho.adjoint()).norm();
  for (int i1 = 0; i1 < 4; ++i1) {
    for (int m1 = 0; m1 < N; ++m1) {
      for (int i2 = 0; i2 < 4; ++i2) {
        for (int m2 = 0; m2 < N; ++m2) {
          if (i1 != lbld && i2 != lbld) continue;
          out.dark_population +=
              out.rho(out.index(i1, m1, i2, m2), out.index(i1, m1, i2, m2))
                  .real();
        }
      }
    }
  }

  // qubit-projected channel Gram in the engine's convention: undo the channel
  // amplitudes (1/4 with the Hadamard sign pattern) and trace the vibration
  Eigen::Matrix4cd gram = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      cd acc{0.0, 0.0};
      for (int m1 = 0; m1 < N; ++m1) {
        for (int m2 = 0; m2 < N; ++m2) {
          acc += out.rho(out.index(a >> 1, m1, a & 1, m2),
                         out.index(b >> 1, m1, b & 1, m2));
        }
      }
      gram(a, b) = 4.0 * sgn[a] * sgn[b] * acc;
    }
  }
  out.ensemble.gram = gram;
  out.ensemble.members = 1;
  out.ensemble.n_max = h.n_max;
  out.ensemble.norm_defect = trace_defect;
  out.ensemble.top_level_population = top_population;
  return out;
}

}  // namespace rydfid
