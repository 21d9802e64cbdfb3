#include "rydfid/gates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rydfid {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// Motional mode data shared by the solvers: trap spectrum (or kinetic matrix
// when the trap is off), recoil displacement, and the idle propagator over
// the gate window.  All matrices are stored complex so Eigen products mix
// freely.
struct MotionalModel {
  int dim = 0;  // levels 0..dim-1
  double omega = 0.0;
  bool trap_on = true;
  Eigen::VectorXcd trap_diag;      // omega (n + 1/2)
  Eigen::MatrixXcd kinetic;       // p^2/2M in the number basis
  Eigen::MatrixXcd displacement;  // e^{iKx}
  Eigen::MatrixXcd idle;          // undriven propagator over [t0, t1]

  Eigen::MatrixXcd apply_motion(const Eigen::MatrixXcd& block) const {
    if (trap_on) {
      return trap_diag.asDiagonal() * block + block * trap_diag.asDiagonal();
    }
    return kinetic * block + block * kinetic;
  }
};

MotionalModel make_motional_model(const PhysicalSetup& setup, double omega,
                                  int dim, double kick, double duration) {
  if (dim < 1) throw std::invalid_argument("motional basis needs >= 1 level");
  MotionalModel m;
  m.dim = dim;
  m.omega = omega;
  m.trap_on = setup.trap_on;
  m.trap_diag = Eigen::VectorXcd(dim);
  for (int n = 0; n < dim; ++n) m.trap_diag(n) = omega * (n + 0.5);
  m.kinetic = kinetic_fock_matrix(dim - 1, omega).cast<cd>();
  if (kick != 0.0) {
    m.displacement = make_fock_basis(setup, omega, dim - 1, kick).displacement;
  } else {
    m.displacement = Eigen::MatrixXcd::Identity(dim, dim);
  }
  m.idle = idle_propagator(dim - 1, omega, setup.trap_on, duration);
  return m;
}

struct SolveDiagnostics {
  double norm_defect = 0.0;
  double top_population = 0.0;

  void merge(const SolveDiagnostics& o) {
    norm_defect = std::max(norm_defect, o.norm_defect);
    top_population = std::max(top_population, o.top_population);
  }
};

// One atom, internal space {|1>, |R>}, driven by Omega(t)/2 (D |R><1| + h.c.)
// with an extra diagonal delta_r on |R> (detuning and/or blockade shift) and
// decay gamma out of |R>.  State layout: [c1(0..N-1), cR(0..N-1), loss].
struct OneAtomResult {
  Eigen::VectorXcd on_1;  // |1>-projected motional amplitudes at t1
  double loss = 0.0;
  SolveDiagnostics diag;
};

OneAtomResult solve_one_atom(const MotionalModel& mot,
                             const PulseEnvelope& drive, double delta_r,
                             double gamma, int n_init, double t0, double t1,
                             const OdeOptions& opt) {
  const int N = mot.dim;
  if (n_init < 0 || n_init >= N) {
    throw std::invalid_argument("initial vibrational level outside the basis");
  }
  const Eigen::MatrixXcd& D = mot.displacement;
  const Eigen::MatrixXcd Dh = D.adjoint();

  cvec state(2 * N + 1, cd{0.0, 0.0});
  state[n_init] = 1.0;

  auto rhs = [&](const cvec& y, cvec& dy, double t) {
    Eigen::Map<const Eigen::VectorXcd> c1(y.data(), N);
    Eigen::Map<const Eigen::VectorXcd> cR(y.data() + N, N);
    Eigen::Map<Eigen::VectorXcd> d1(dy.data(), N);
    Eigen::Map<Eigen::VectorXcd> dR(dy.data() + N, N);
    const double half_omega = 0.5 * drive.omega(t);

    Eigen::VectorXcd h1, hR;
    if (mot.trap_on) {
      h1 = mot.trap_diag.cwiseProduct(c1);
      hR = mot.trap_diag.cwiseProduct(cR);
    } else {
      h1 = mot.kinetic * c1;
      hR = mot.kinetic * cR;
    }
    h1.noalias() += half_omega * (Dh * cR);
    hR.noalias() += half_omega * (D * c1);
    hR += delta_r * cR;

    d1 = -kI * h1;
    dR = (-kI) * hR - (0.5 * gamma) * cR;
    dy[2 * N] = gamma * cR.squaredNorm();
  };

  SolveDiagnostics diag;
  auto observe = [&](const cvec& y, double) {
    Eigen::Map<const Eigen::VectorXcd> full(y.data(), 2 * N);
    const double norm2 = full.squaredNorm();
    const double loss = y[2 * N].real();
    diag.norm_defect =
        std::max(diag.norm_defect, std::abs(norm2 + loss - 1.0));
    if (N >= 2) {
      const double top = std::norm(y[N - 1]) + std::norm(y[N - 2]) +
                         std::norm(y[2 * N - 1]) + std::norm(y[2 * N - 2]);
      diag.top_population = std::max(diag.top_population, top);
    }
  };

  integrate_cvec_observed(rhs, state, t0, t1, observe, opt);

  OneAtomResult out;
  out.on_1 = Eigen::Map<const Eigen::VectorXcd>(state.data(), N);
  out.loss = state[2 * N].real();
  out.diag = diag;
  return out;
}

// Scalar two-level version (no motion): returns the |1> amplitude after the
// pulse and the decayed population.
struct TwoLevelResult {
  cd on_1{0.0, 0.0};
  double loss = 0.0;
  double norm_defect = 0.0;
};

TwoLevelResult solve_two_level(const PulseEnvelope& drive, double delta_r,
                               double gamma, double t0, double t1,
                               const OdeOptions& opt) {
  cvec state = {cd{1.0, 0.0}, cd{0.0, 0.0}, cd{0.0, 0.0}};
  auto rhs = [&](const cvec& y, cvec& dy, double t) {
    const double half_omega = 0.5 * drive.omega(t);
    dy[0] = -kI * (half_omega * y[1]);
    dy[1] = -kI * (half_omega * y[0] + delta_r * y[1]) - 0.5 * gamma * y[1];
    dy[2] = gamma * std::norm(y[1]);
  };
  TwoLevelResult out;
  auto observe = [&](const cvec& y, double) {
    const double total = std::norm(y[0]) + std::norm(y[1]) + y[2].real();
    out.norm_defect = std::max(out.norm_defect, std::abs(total - 1.0));
  };
  integrate_cvec_observed(rhs, state, t0, t1, observe, opt);
  out.on_1 = state[0];
  out.loss = state[2].real();
  return out;
}

double pulse_quadrature(const std::function<double(double)>& f, double t0,
                        double t1) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, t0, t1, 10, 1e-13);
}

// --- joint |11> channel ------------------------------------------------------

// Joint |11> solve in the product basis {|1>,|R>} x {|1>,|R>} x Fock x Fock.
// The state is stored as four dim x dim motional matrices (blocks 11, 1R, R1,
// RR); atom-1 operators left-multiply, atom-2 operators right-multiply by the
// transpose.
struct JointResult {
  Eigen::MatrixXcd on_11;  // |11>-projected motional matrix
  double loss = 0.0;
  SolveDiagnostics diag;
};

// Per-atom drive envelopes and |R> diagonals; the adiabatic gate uses the
// same envelope and detuning for both atoms, the pi-2pi-pi gate drives the
// control with the pi-pi pair and the target with the single 2pi bump.
struct JointDrive {
  PulseEnvelope drive1, drive2;
  double delta_r1 = 0.0, delta_r2 = 0.0;
};

JointResult solve_joint_11(const MotionalModel& mot, const JointDrive& jd,
                           double b_shift, double gamma, int n1, int n2,
                           double t0, double t1, const OdeOptions& opt) {
  const int N = mot.dim;
  const int N2 = N * N;
  if (n1 >= N || n2 >= N) {
    throw std::invalid_argument("initial vibrational level outside the basis");
  }
  const Eigen::MatrixXcd& D = mot.displacement;
  const Eigen::MatrixXcd Dh = D.adjoint();
  const Eigen::MatrixXcd Dt = D.transpose();
  const Eigen::MatrixXcd Dc = D.conjugate();

  cvec state(4 * N2 + 1, cd{0.0, 0.0});
  state[n1 + N * n2] = 1.0;  // block 11, column-major (m1 + N m2)

  auto rhs = [&](const cvec& y, cvec& dy, double t) {
    using CMap = Eigen::Map<const Eigen::MatrixXcd>;
    using WMap = Eigen::Map<Eigen::MatrixXcd>;
    CMap p11(y.data(), N, N), p1R(y.data() + N2, N, N),
        pR1(y.data() + 2 * N2, N, N), pRR(y.data() + 3 * N2, N, N);
    WMap d11(dy.data(), N, N), d1R(dy.data() + N2, N, N),
        dR1(dy.data() + 2 * N2, N, N), dRR(dy.data() + 3 * N2, N, N);
    const double g1 = 0.5 * jd.drive1.omega(t);
    const double g2 = 0.5 * jd.drive2.omega(t);

    Eigen::MatrixXcd h11 = mot.apply_motion(p11);
    Eigen::MatrixXcd h1R = mot.apply_motion(p1R);
    Eigen::MatrixXcd hR1 = mot.apply_motion(pR1);
    Eigen::MatrixXcd hRR = mot.apply_motion(pRR);

    // drive: atom 1 couples 11<->R1 and 1R<->RR, atom 2 couples 11<->1R and
    // R1<->RR
    h11.noalias() += g1 * (Dh * pR1);
    h11.noalias() += g2 * (p1R * Dc);
    hR1.noalias() += g1 * (D * p11);
    hR1.noalias() += g2 * (pRR * Dc);
    h1R.noalias() += g2 * (p11 * Dt);
    h1R.noalias() += g1 * (Dh * pRR);
    hRR.noalias() += g1 * (D * p1R);
    hRR.noalias() += g2 * (pR1 * Dt);

    h1R += jd.delta_r2 * p1R;
    hR1 += jd.delta_r1 * pR1;
    hRR += (jd.delta_r1 + jd.delta_r2 + b_shift) * pRR;

    d11 = -kI * h11;
    d1R = (-kI) * h1R - (0.5 * gamma) * p1R;
    dR1 = (-kI) * hR1 - (0.5 * gamma) * pR1;
    dRR = (-kI) * hRR - gamma * pRR;
    dy[4 * N2] =
        gamma * (p1R.squaredNorm() + pR1.squaredNorm() +
                 2.0 * pRR.squaredNorm());
  };

  SolveDiagnostics diag;
  auto observe = [&](const cvec& y, double) {
    Eigen::Map<const Eigen::VectorXcd> full(y.data(), 4 * N2);
    const double norm2 = full.squaredNorm();
    diag.norm_defect = std::max(
        diag.norm_defect, std::abs(norm2 + y[4 * N2].real() - 1.0));
    if (N >= 2) {
      double top = 0.0;
      for (int b = 0; b < 4; ++b) {
        Eigen::Map<const Eigen::MatrixXcd> blk(y.data() + b * N2, N, N);
        top += blk.row(N - 1).squaredNorm() + blk.row(N - 2).squaredNorm() +
               blk.col(N - 1).squaredNorm() + blk.col(N - 2).squaredNorm();
      }
      diag.top_population = std::max(diag.top_population, top);
    }
  };

  integrate_cvec_observed(rhs, state, t0, t1, observe, opt);

  JointResult out;
  out.on_11 = Eigen::Map<const Eigen::MatrixXcd>(state.data(), N, N);
  out.loss = state[4 * N2].real();
  out.diag = diag;
  return out;
}

struct JointOverlaps {
  cd J00, J01, J10;  // <psi_a | psi_11> for a = 00, 01, 10
  double J11;        // ||psi_11||^2
};

// --- blockade pi-2pi-pi ------------------------------------------------------

struct PiPulsePair {
  PulseEnvelope control;  // two pi lobes on the control atom
  PulseEnvelope target;   // single 2pi bump on the target atom
};

PiPulsePair pi_2pi_pi_envelopes(const GateSpec& gate) {
  const auto& p = gate.pi_2pi_pi;
  return {make_super_gaussian_pair(p.omega1_max, p.delta_t1, p.tau1),
          make_super_gaussian_single(p.omega2_max, p.delta_t2)};
}

// Per-initial-level one-atom overlaps for the pi-2pi-pi gate.
// A   = <idle | pi-pi>            P  = ||pi-pi||^2
// B2  = <idle | 2pi>              Q  = ||2pi||^2
// C, X, R2 describe the blocked target in the light-shift (stark)
// approximation only; the exact path solves the |11> channel jointly.
struct PiPerLevel {
  cd A, B2;
  cd C{0.0, 0.0}, X{0.0, 0.0};
  double P = 0.0, Q = 0.0, R2 = 0.0;
  double loss = 0.0;
  Eigen::VectorXcd pipi, two_pi;  // final |1>-projected motional amplitudes
};

EnsembleResult run_pi_2pi_pi(const GateHamiltonian& h) {
  const PhysicalSetup& setup = h.setup;
  const double omega_trap = setup.omega_parallel();
  const double kick = h.kicks_on ? effective_wavevector(setup) : 0.0;
  const double gamma = setup.gamma();
  const double b_shift = h.signed_blockade();
  const PiPulsePair env = pi_2pi_pi_envelopes(h.gate);
  const double t0 = h.gate_window_start();
  const double t1 = h.gate_window_stop();

  const auto members = thermal_ensemble(setup, omega_trap, h.weight_cutoff);
  const MotionalModel mot =
      make_motional_model(setup, omega_trap, h.n_max + 1, kick, t1 - t0);

  bool use_stark = false;
  switch (h.blocked) {
    case BlockedTreatment::exact: use_stark = false; break;
    case BlockedTreatment::stark: use_stark = true; break;
    case BlockedTreatment::automatic:
      use_stark =
          std::abs(b_shift) >= 50.0 * h.gate.pi_2pi_pi.omega2_max;
      break;
  }
  // Light-shift phase of a blocked atom: exp(i sign(B) int Omega^2/(4|B|) dt).
  cd stark_phase{1.0, 0.0};
  if (use_stark) {
    const double phi = pulse_quadrature(
        [&](double t) {
          const double om = env.target.omega(t);
          return om * om / (4.0 * std::abs(b_shift));
        },
        t0, t1);
    stark_phase = std::exp(kI * std::copysign(phi, b_shift));
  }

  SolveDiagnostics diag;
  std::vector<std::optional<PiPerLevel>> cache(h.n_max + 1);
  auto level = [&](int n) -> const PiPerLevel& {
    if (!cache[n]) {
      const Eigen::VectorXcd u = mot.idle.col(n);
      PiPerLevel e;
      OneAtomResult pipi =
          solve_one_atom(mot, env.control, 0.0, gamma, n, t0, t1, h.ode);
      OneAtomResult two_pi =
          solve_one_atom(mot, env.target, 0.0, gamma, n, t0, t1, h.ode);
      diag.merge(pipi.diag);
      diag.merge(two_pi.diag);
      e.A = u.dot(pipi.on_1);
      e.P = pipi.on_1.squaredNorm();
      e.B2 = u.dot(two_pi.on_1);
      e.Q = two_pi.on_1.squaredNorm();
      e.loss = std::max(pipi.loss, two_pi.loss);
      e.pipi = pipi.on_1;
      e.two_pi = two_pi.on_1;
      if (use_stark) {
        e.C = stark_phase;
        e.R2 = 1.0;
        e.X = stark_phase * std::conj(e.B2);
      }
      cache[n] = e;
    }
    return *cache[n];
  };

  // Exact |11> channel: joint two-atom solve with the control and target
  // envelopes and the blockade on |RR>.  The envelopes differ per atom, so
  // the cache key is the ordered level pair.
  const int joint_dim_cap = h.n_max + 1;
  std::map<std::pair<int, int>, JointOverlaps> joint_cache;
  std::map<int, MotionalModel> joint_models;
  auto joint = [&](int a, int b) -> const JointOverlaps& {
    const auto key = std::make_pair(a, b);
    auto it = joint_cache.find(key);
    if (it != joint_cache.end()) return it->second;
    const int dim =
        std::min(joint_dim_cap, std::max(a, b) + 1 + h.joint_fock_pad);
    auto mit = joint_models.find(dim);
    if (mit == joint_models.end()) {
      mit = joint_models
                .emplace(dim, make_motional_model(setup, omega_trap, dim, kick,
                                                  t1 - t0))
                .first;
    }
    const MotionalModel& jm = mit->second;
    const JointDrive jd{env.control, env.target, 0.0, 0.0};
    JointResult r = solve_joint_11(jm, jd, b_shift, gamma, a, b, t0, t1,
                                   h.ode);
    diag.merge(r.diag);
    const Eigen::VectorXcd u1 = jm.idle.col(a);
    const Eigen::VectorXcd u2 = jm.idle.col(b);
    const Eigen::VectorXcd c1 = level(a).pipi.head(dim);
    const Eigen::VectorXcd c2 = level(b).two_pi.head(dim);
    JointOverlaps j;
    j.J00 = (u1.adjoint() * r.on_11 * u2.conjugate())(0, 0);
    j.J01 = (u1.adjoint() * r.on_11 * c2.conjugate())(0, 0);
    j.J10 = (c1.adjoint() * r.on_11 * u2.conjugate())(0, 0);
    j.J11 = r.on_11.squaredNorm();
    return joint_cache.emplace(key, j).first->second;
  };

  // Channel states for the non-interacting channels are products of one-atom
  // states:
  //   psi_00 = idle(n1) x idle(n2)      psi_01 = idle(n1) x 2pi(n2)
  //   psi_10 = pi-pi(n1) x idle(n2)
  // and psi_11 is either the joint solve (exact) or the light-shift product
  // pi-pi(n1) x e^{i phi_B} idle(n2) (stark).
  EnsembleResult out;
  out.n_max = h.n_max;
  out.members = static_cast<int>(members.size());
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  for (const auto& m : members) {
    const PiPerLevel& e1 = level(m.n1);
    const PiPerLevel& e2 = level(m.n2);
    const double w = m.weight;
    M(0, 0) += w;
    M(1, 1) += w * e2.Q;
    M(2, 2) += w * e1.P;
    M(0, 1) += w * std::conj(e2.B2);
    M(0, 2) += w * std::conj(e1.A);
    M(1, 2) += w * std::conj(e1.A) * e2.B2;
    if (use_stark) {
      M(3, 3) += w * e1.P * e2.R2;
      M(0, 3) += w * std::conj(e1.A) * std::conj(e2.C);
      M(1, 3) += w * std::conj(e1.A) * std::conj(e2.X);
      M(2, 3) += w * e1.P * std::conj(e2.C);
    } else {
      const JointOverlaps& j = joint(m.n1, m.n2);
      M(3, 3) += w * j.J11;
      M(0, 3) += w * std::conj(j.J00);
      M(1, 3) += w * std::conj(j.J01);
      M(2, 3) += w * std::conj(j.J10);
    }
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) M(a, b) = std::conj(M(b, a));
  out.gram = M;
  out.norm_defect = diag.norm_defect;
  out.top_level_population = diag.top_population;
  return out;
}

// --- adiabatic C_Z -----------------------------------------------------------

struct AdiabaticPerLevel {
  cd s;      // <idle | driven>
  double q;  // ||driven||^2
  Eigen::VectorXcd driven;
  Eigen::VectorXcd idle;
};

EnsembleResult run_adiabatic(const GateHamiltonian& h) {
  const PhysicalSetup& setup = h.setup;
  const auto& p = h.gate.adiabatic;
  const double omega_trap = setup.omega_parallel();
  const double kick = h.kicks_on ? effective_wavevector(setup) : 0.0;
  const double gamma = setup.gamma();
  const double delta = p.delta_over_omega0 * p.omega0;  // laser detuning (<0)
  const double delta_r = -delta;                        // diagonal on |R>
  const double b_shift = h.signed_blockade();
  const PulseEnvelope drive = make_gaussian(p.omega0, p.delta_t);
  const double t1 = h.gate_window_stop();
  const double t0 = h.gate_window_start();

  const auto members = thermal_ensemble(setup, omega_trap, h.weight_cutoff);
  int n_top = 0;
  for (const auto& m : members) n_top = std::max({n_top, m.n1, m.n2});

  const MotionalModel mot =
      make_motional_model(setup, omega_trap, h.n_max + 1, kick, t1 - t0);

  SolveDiagnostics diag;
  std::vector<std::optional<AdiabaticPerLevel>> one(h.n_max + 1);
  auto level = [&](int n) -> const AdiabaticPerLevel& {
    if (!one[n]) {
      AdiabaticPerLevel e;
      OneAtomResult r =
          solve_one_atom(mot, drive, delta_r, gamma, n, t0, t1, h.ode);
      diag.merge(r.diag);
      e.idle = mot.idle.col(n);
      e.driven = r.on_1;
      e.s = e.idle.dot(e.driven);
      e.q = e.driven.squaredNorm();
      one[n] = std::move(e);
    }
    return *one[n];
  };

  // Joint solves are cached per unordered pair in a basis large enough for
  // the pair's initial levels plus recoil spreading; the drive is symmetric
  // under atom exchange, so the swapped member reuses the same solve with the
  // 01 and 10 overlaps interchanged.
  const int joint_dim_cap = h.n_max + 1;
  std::map<std::pair<int, int>, JointOverlaps> joint_cache;
  std::map<int, MotionalModel> joint_models;
  auto joint = [&](int a, int b) -> const JointOverlaps& {
    const auto key = std::make_pair(a, b);
    auto it = joint_cache.find(key);
    if (it != joint_cache.end()) return it->second;
    const int dim =
        std::min(joint_dim_cap, std::max(a, b) + 1 + h.joint_fock_pad);
    auto mit = joint_models.find(dim);
    if (mit == joint_models.end()) {
      mit = joint_models
                .emplace(dim, make_motional_model(setup, omega_trap, dim, kick,
                                                  t1 - t0))
                .first;
    }
    const MotionalModel& jm = mit->second;
    const JointDrive jd{drive, drive, delta_r, delta_r};
    JointResult r = solve_joint_11(jm, jd, b_shift, gamma, a, b, t0, t1,
                                   h.ode);
    diag.merge(r.diag);
    const Eigen::VectorXcd u1 = jm.idle.col(a);
    const Eigen::VectorXcd u2 = jm.idle.col(b);
    const Eigen::VectorXcd c1 = level(a).driven.head(dim);
    const Eigen::VectorXcd c2 = level(b).driven.head(dim);
    JointOverlaps j;
    j.J00 = (u1.adjoint() * r.on_11 * u2.conjugate())(0, 0);
    j.J01 = (u1.adjoint() * r.on_11 * c2.conjugate())(0, 0);
    j.J10 = (c1.adjoint() * r.on_11 * u2.conjugate())(0, 0);
    j.J11 = r.on_11.squaredNorm();
    return joint_cache.emplace(key, j).first->second;
  };

  EnsembleResult out;
  out.n_max = h.n_max;
  out.members = static_cast<int>(members.size());
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  for (const auto& m : members) {
    const AdiabaticPerLevel& e1 = level(m.n1);
    const AdiabaticPerLevel& e2 = level(m.n2);
    const bool swapped = m.n1 > m.n2;
    const JointOverlaps& j =
        swapped ? joint(m.n2, m.n1) : joint(m.n1, m.n2);
    const cd J00 = j.J00;
    const cd J01 = swapped ? j.J10 : j.J01;
    const cd J10 = swapped ? j.J01 : j.J10;
    const double w = m.weight;
    M(0, 0) += w;
    M(1, 1) += w * e2.q;
    M(2, 2) += w * e1.q;
    M(3, 3) += w * j.J11;
    M(0, 1) += w * std::conj(e2.s);
    M(0, 2) += w * std::conj(e1.s);
    M(0, 3) += w * std::conj(J00);
    M(1, 2) += w * std::conj(e1.s) * e2.s;
    M(1, 3) += w * std::conj(J01);
    M(2, 3) += w * std::conj(J10);
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) M(a, b) = std::conj(M(b, a));
  out.gram = M;
  out.norm_defect = diag.norm_defect;
  out.top_level_population = diag.top_population;
  return out;
}

// --- Bell readout ------------------------------------------------------------

struct BellComponents {
  double rho0000 = 0.0;
  double rho1111 = 0.0;
  cd rho0011{0.0, 0.0};
  double fidelity = 0.0;
};

// Input state H x H |11> gives channel coefficients (1/2, -1/2, -1/2, 1/2);
// phases theta_j act on |1>_j, then a Hadamard on qubit 2 mixes 00 with 01
// and 10 with 11.  All reduced-density-matrix entries are bilinear in the
// channel Gram matrix.
BellComponents bell_components(const Eigen::Matrix4cd& M, double th1,
                               double th2) {
  const cd v0 = cd{0.5, 0.0};
  const cd v1 = -0.5 * std::exp(kI * th2);
  const cd v2 = -0.5 * std::exp(kI * th1);
  const cd v3 = 0.5 * std::exp(kI * (th1 + th2));
  BellComponents c;
  c.rho0000 = 0.5 * (std::norm(v0) * M(0, 0).real() +
                     std::norm(v1) * M(1, 1).real() +
                     2.0 * std::real(v0 * std::conj(v1) * M(0, 1)));
  c.rho1111 = 0.5 * (std::norm(v2) * M(2, 2).real() +
                     std::norm(v3) * M(3, 3).real() -
                     2.0 * std::real(v2 * std::conj(v3) * M(2, 3)));
  c.rho0011 = 0.5 * (v0 * std::conj(v2) * M(0, 2) -
                     v0 * std::conj(v3) * M(0, 3) +
                     v1 * std::conj(v2) * M(1, 2) -
                     v1 * std::conj(v3) * M(1, 3));
  c.fidelity = 0.5 * (c.rho0000 + c.rho1111) + std::abs(c.rho0011);
  return c;
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-11) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double GateHamiltonian::blockade_rad_us() const {
  if (gate.kind == GateKind::adiabatic && gate.adiabatic.blockade_rad_s > 0.0) {
    return UnitSystem::angular_freq_from_rad_s(gate.adiabatic.blockade_rad_s);
  }
  return setup.blockade();
}

double GateHamiltonian::signed_blockade() const {
  if (setup.blockade_sign != 1 && setup.blockade_sign != -1) {
    throw std::invalid_argument("blockade_sign must be +1 or -1");
  }
  return setup.blockade_sign * blockade_rad_us();
}

double GateHamiltonian::gate_window_start() const {
  if (gate.kind == GateKind::adiabatic) {
    return -window_sigmas * gate.adiabatic.delta_t;
  }
  const PiPulsePair env = pi_2pi_pi_envelopes(gate);
  return std::min(env.control.window_start(), env.target.window_start());
}

double GateHamiltonian::gate_window_stop() const {
  if (gate.kind == GateKind::adiabatic) {
    return window_sigmas * gate.adiabatic.delta_t;
  }
  const PiPulsePair env = pi_2pi_pi_envelopes(gate);
  return std::max(env.control.window_stop(), env.target.window_stop());
}

EnsembleResult run_gate_ensemble(const GateHamiltonian& h) {
  h.gate.validate();
  if (h.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  switch (h.gate.kind) {
    case GateKind::pi_2pi_pi:
      return run_pi_2pi_pi(h);
    case GateKind::adiabatic:
      return run_adiabatic(h);
  }
  throw std::logic_error("unhandled gate kind");
}

FidelityReport bell_fidelity(const EnsembleResult& ensemble, bool one_phase) {
  const Eigen::Matrix4cd& M = ensemble.gram;
  auto fid = [&](double th1, double th2) {
    return bell_components(M, th1, th2).fidelity;
  };

  const int grid = 64;
  const double step = 2.0 * pi / grid;
  double best1 = 0.0, best2 = 0.0, best = -1.0;
  if (one_phase) {
    for (int i = 0; i < grid; ++i) {
      const double th = i * step;
      const double f = fid(th, th);
      if (f > best) {
        best = f;
        best1 = best2 = th;
      }
    }
    const double th = golden_max(
        [&](double x) { return fid(x, x); }, best1 - step, best1 + step);
    if (fid(th, th) > best) best1 = best2 = th;
  } else {
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const double f = fid(i * step, j * step);
        if (f > best) {
          best = f;
          best1 = i * step;
          best2 = j * step;
        }
      }
    }
    for (int sweep = 0; sweep < 3; ++sweep) {
      best1 = golden_max([&](double x) { return fid(x, best2); },
                         best1 - step, best1 + step);
      best2 = golden_max([&](double x) { return fid(best1, x); },
                         best2 - step, best2 + step);
    }
  }

  FidelityReport rep;
  const BellComponents refined = bell_components(M, best1, best2);
  const BellComponents origin = bell_components(M, 0.0, 0.0);
  rep.phase_converged = refined.fidelity >= best - 1e-12;
  const BellComponents& use =
      refined.fidelity >= origin.fidelity ? refined : origin;
  rep.theta1 = refined.fidelity >= origin.fidelity ? best1 : 0.0;
  rep.theta2 = refined.fidelity >= origin.fidelity ? best2 : 0.0;
  rep.bell_fidelity = use.fidelity;
  rep.rho0000 = use.rho0000;
  rep.rho1111 = use.rho1111;
  rep.rho0011 = use.rho0011;
  rep.members = ensemble.members;
  rep.n_max = ensemble.n_max;
  rep.norm_defect = ensemble.norm_defect;
  rep.top_level_population = ensemble.top_level_population;
  return rep;
}

FidelityReport gate_fidelity(const GateHamiltonian& h, bool one_phase) {
  return bell_fidelity(run_gate_ensemble(h), one_phase);
}

RydbergTimes rydberg_time_integrals(const GateHamiltonian& h) {
  h.gate.validate();
  const double b_shift = h.signed_blockade();
  const double t0 = h.gate_window_start();
  const double t1 = h.gate_window_stop();

  // Internal basis (|11>, |1R>, |R1>, |RR>) with no motion and no decay.
  std::function<void(const cvec&, cvec&, double)> rhs;
  if (h.gate.kind == GateKind::pi_2pi_pi) {
    const PiPulsePair env = pi_2pi_pi_envelopes(h.gate);
    rhs = [env, b_shift](const cvec& y, cvec& dy, double t) {
      const double g1 = 0.5 * env.control.omega(t);
      const double g2 = 0.5 * env.target.omega(t);
      dy[0] = -kI * (g2 * y[1] + g1 * y[2]);
      dy[1] = -kI * (g2 * y[0] + g1 * y[3]);
      dy[2] = -kI * (g1 * y[0] + g2 * y[3]);
      dy[3] = -kI * (g1 * y[1] + g2 * y[2] + b_shift * y[3]);
      dy[4] = 0.5 * (std::norm(y[1]) + std::norm(y[2]) +
                     2.0 * std::norm(y[3]));
      dy[5] = std::norm(y[3]);
    };
  } else {
    const auto& p = h.gate.adiabatic;
    const PulseEnvelope drive = make_gaussian(p.omega0, p.delta_t);
    const double delta_r = -p.delta_over_omega0 * p.omega0;
    rhs = [drive, delta_r, b_shift](const cvec& y, cvec& dy, double t) {
      const double g = 0.5 * drive.omega(t);
      dy[0] = -kI * (g * (y[1] + y[2]));
      dy[1] = -kI * (g * (y[0] + y[3]) + delta_r * y[1]);
      dy[2] = -kI * (g * (y[0] + y[3]) + delta_r * y[2]);
      dy[3] = -kI * (g * (y[1] + y[2]) +
                     (2.0 * delta_r + b_shift) * y[3]);
      dy[4] = 0.5 * (std::norm(y[1]) + std::norm(y[2]) +
                     2.0 * std::norm(y[3]));
      dy[5] = std::norm(y[3]);
    };
  }

  cvec state(6, cd{0.0, 0.0});
  state[0] = 1.0;
  integrate_cvec(rhs, state, t0, t1, h.ode);

  // One-atom Rydberg residence time: |1> driven by the single-atom envelope
  // (the control pair for the pi-2pi-pi gate).
  PulseEnvelope one_drive;
  double one_delta = 0.0;
  if (h.gate.kind == GateKind::pi_2pi_pi) {
    one_drive = pi_2pi_pi_envelopes(h.gate).control;
  } else {
    const auto& p = h.gate.adiabatic;
    one_drive = make_gaussian(p.omega0, p.delta_t);
    one_delta = -p.delta_over_omega0 * p.omega0;
  }
  cvec one(3, cd{0.0, 0.0});
  one[0] = 1.0;
  auto one_rhs = [&](const cvec& y, cvec& dy, double t) {
    const double g = 0.5 * one_drive.omega(t);
    dy[0] = -kI * (g * y[1]);
    dy[1] = -kI * (g * y[0] + one_delta * y[1]);
    dy[2] = std::norm(y[1]);
  };
  integrate_cvec(one_rhs, one, t0, t1, h.ode);

  return {one[2].real(), state[4].real(), state[5].real()};
}

FidelityReport rr_kick_run(const GateHamiltonian& h, bool gradient_on,
                           bool one_phase) {
  h.gate.validate();
  if (h.gate.kind != GateKind::adiabatic) {
    throw std::invalid_argument(
        "the interaction-gradient impulse run applies to the adiabatic gate");
  }
  const PhysicalSetup& setup = h.setup;
  const auto& p = h.gate.adiabatic;
  const double omega_t = setup.omega_perp();
  if (omega_t <= 0.0) {
    throw std::invalid_argument("transverse trap frequency must be positive");
  }
  if (setup.r12_um <= 0.0) {
    throw std::invalid_argument("atom separation r12 must be positive");
  }
  const double mass = setup.mass();
  const double rms_y = std::sqrt(
      effective_thermal_energy(setup.temperature_K, omega_t) /
      (mass * omega_t * omega_t));
  if (rms_y / setup.r12_um > 0.1) {
    throw std::invalid_argument(
        "thermal spread exceeds 10% of the atom separation; the linearized "
        "interaction gradient is not valid");
  }

  const double gamma = setup.gamma();
  const double delta_r = -p.delta_over_omega0 * p.omega0;
  const double b_shift = h.signed_blockade();
  const PulseEnvelope drive = make_gaussian(p.omega0, p.delta_t);
  const double t0 = h.gate_window_start();
  const double t1 = h.gate_window_stop();
  const int N = h.n_max + 1;

  // Relative coordinate y_rel = (y2 - y1)/sqrt(2): the blockade level
  // B[1 - 6 (y2-y1)/r12] linearizes to a force g (a + a^dag) on |RR> with
  // g = -6 sqrt(2) sign(B) |B| y_zpf / r12; the centre of mass is untouched.
  const double y_zpf = std::sqrt(1.0 / (2.0 * mass * omega_t));
  const double grad =
      gradient_on ? -6.0 * std::sqrt(2.0) * b_shift * y_zpf / setup.r12_um
                  : 0.0;

  // Boltzmann ensemble of the relative mode (same occupation statistics as
  // each atom's mode for equal frequencies).
  const double kT = setup.thermal_energy();
  std::vector<double> weights;
  if (kT <= 0.0) {
    weights = {1.0};
  } else {
    const double q = std::exp(-omega_t / kT);
    double cum = 0.0;
    for (int n = 0; n < N; ++n) {
      weights.push_back((1.0 - q) * std::pow(q, n));
      cum += weights.back();
      if (cum >= 1.0 - h.weight_cutoff) break;
    }
    for (double& w : weights) w /= cum;
  }

  const TwoLevelResult single =
      solve_two_level(drive, delta_r, gamma, t0, t1, h.ode);
  const cd a01 = single.on_1;

  const Eigen::MatrixXcd idle = idle_propagator(N - 1, omega_t, setup.trap_on,
                                                t1 - t0);
  Eigen::VectorXd ladder(N);  // sqrt(n+1) couplings of (a + a^dag)
  for (int n = 0; n < N; ++n) ladder(n) = std::sqrt(n + 1.0);

  SolveDiagnostics diag;
  diag.norm_defect = single.norm_defect;

  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  const double sq2 = std::sqrt(2.0);
  for (int n = 0; n < static_cast<int>(weights.size()); ++n) {
    const double w = weights[n];
    // Three-level ladder {|11>, |W>, |RR>} x relative Fock mode.
    cvec state(3 * N + 1, cd{0.0, 0.0});
    state[n] = 1.0;
    auto rhs = [&](const cvec& y, cvec& dy, double t) {
      Eigen::Map<const Eigen::VectorXcd> c0(y.data(), N);
      Eigen::Map<const Eigen::VectorXcd> cw(y.data() + N, N);
      Eigen::Map<const Eigen::VectorXcd> cr(y.data() + 2 * N, N);
      Eigen::Map<Eigen::VectorXcd> d0(dy.data(), N);
      Eigen::Map<Eigen::VectorXcd> dw(dy.data() + N, N);
      Eigen::Map<Eigen::VectorXcd> dr(dy.data() + 2 * N, N);
      const double g = sq2 * 0.5 * drive.omega(t);

      auto add_trap = [&](Eigen::VectorXcd& out,
                          Eigen::Map<const Eigen::VectorXcd>& in) {
        for (int m = 0; m < N; ++m) out(m) += omega_t * (m + 0.5) * in(m);
      };
      Eigen::VectorXcd h0 = Eigen::VectorXcd::Zero(N);
      Eigen::VectorXcd hw = Eigen::VectorXcd::Zero(N);
      Eigen::VectorXcd hr = Eigen::VectorXcd::Zero(N);
      add_trap(h0, c0);
      add_trap(hw, cw);
      add_trap(hr, cr);
      h0 += g * cw;
      hw += g * (c0 + cr) + delta_r * cw;
      hr += g * cw + (2.0 * delta_r + b_shift) * cr;
      if (grad != 0.0) {
        for (int m = 0; m < N; ++m) {
          cd x{0.0, 0.0};
          if (m > 0) x += ladder(m - 1) * cr(m - 1);
          if (m < N - 1) x += ladder(m) * cr(m + 1);
          hr(m) += grad * x;
        }
      }
      d0 = -kI * h0;
      dw = (-kI) * hw - (0.5 * gamma) * cw;
      dr = (-kI) * hr - gamma * cr;
      dy[3 * N] = gamma * (cw.squaredNorm() + 2.0 * cr.squaredNorm());
    };
    auto observe = [&](const cvec& y, double) {
      Eigen::Map<const Eigen::VectorXcd> full(y.data(), 3 * N);
      diag.norm_defect =
          std::max(diag.norm_defect,
                   std::abs(full.squaredNorm() + y[3 * N].real() - 1.0));
      if (N >= 2) {
        double top = 0.0;
        for (int b = 0; b < 3; ++b) {
          top += std::norm(y[b * N + N - 1]) + std::norm(y[b * N + N - 2]);
        }
        diag.top_population = std::max(diag.top_population, top);
      }
    };
    integrate_cvec_observed(rhs, state, t0, t1, observe, h.ode);

    Eigen::Map<const Eigen::VectorXcd> psi11(state.data(), N);
    const Eigen::VectorXcd u = idle.col(n);
    const cd j = u.dot(psi11);
    M(0, 0) += w;
    M(1, 1) += w * std::norm(a01);
    M(2, 2) += w * std::norm(a01);
    M(3, 3) += w * psi11.squaredNorm();
    M(0, 1) += w * std::conj(a01);
    M(0, 2) += w * std::conj(a01);
    M(0, 3) += w * std::conj(j);
    M(1, 2) += w * std::norm(a01);
    M(1, 3) += w * a01 * std::conj(j);
    M(2, 3) += w * a01 * std::conj(j);
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) M(a, b) = std::conj(M(b, a));

  EnsembleResult ens;
  ens.gram = M;
  ens.members = static_cast<int>(weights.size());
  ens.n_max = h.n_max;
  ens.norm_defect = diag.norm_defect;
  ens.top_level_population = diag.top_population;
  return bell_fidelity(ens, one_phase);
}

}  // namespace rydfid
