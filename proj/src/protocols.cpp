#include "rydfid/protocols.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "rydfid/units.hpp"

namespace rydfid {

namespace {

// Simpson node count for the phase integrals.  The tracked eigenvalue is
// smooth on the pulse-width scale, so this is accurate to well below 1e-8
// rad for the parameter ranges of interest.
constexpr int kPhaseSteps = 3000;

struct Picked {
  double lambda = 0.0;
  Eigen::VectorXd v;
  double overlap = 0.0;
};

Picked pick_branch(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                   const Eigen::VectorXd& ref, const Eigen::MatrixXd& h) {
  es.compute(h);
  int best = 0;
  double best_overlap = -1.0;
  for (int j = 0; j < h.rows(); ++j) {
    const double o = std::abs(ref.dot(es.eigenvectors().col(j)));
    if (o > best_overlap) {
      best_overlap = o;
      best = j;
    }
  }
  Picked p;
  p.lambda = es.eigenvalues()(best);
  p.v = es.eigenvectors().col(best);
  if (ref.dot(p.v) < 0.0) p.v = -p.v;  // fix the real-vector sign freedom
  p.overlap = best_overlap;
  return p;
}

// Continue the branch from (ref at ta) to tb, halving the interval whenever
// the eigenvector turns faster than the 0.9-overlap criterion allows.
Picked connect_branch(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                      const std::function<Eigen::MatrixXd(double)>& hmat,
                      const Eigen::VectorXd& ref, double ta, double tb,
                      int depth) {
  Picked p = pick_branch(es, ref, hmat(tb));
  if (p.overlap >= 0.9) return p;
  if (depth >= 40) {
    throw std::runtime_error(
        "branch tracking lost the adiabatic eigenvector (overlap < 0.9)");
  }
  const double tm = 0.5 * (ta + tb);
  Picked mid = connect_branch(es, hmat, ref, ta, tm, depth + 1);
  return connect_branch(es, hmat, mid.v, tm, tb, depth + 1);
}

// Integral of the tracked eigenvalue branch starting from `start` at t0,
// composite Simpson; the returned phase is -int lambda dt.
double tracked_phase(const std::function<Eigen::MatrixXd(double)>& hmat,
                     const Eigen::VectorXd& start, double t0, double t1) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  const int n = kPhaseSteps;  // even
  const double h = (t1 - t0) / n;
  Picked cur = pick_branch(es, start, hmat(t0));
  if (cur.overlap < 0.9) {
    throw std::runtime_error(
        "no adiabatic branch: the start state is not close to an eigenvector");
  }
  double acc = cur.lambda;
  for (int k = 1; k <= n; ++k) {
    const double ta = t0 + (k - 1) * h;
    const double tb = t0 + k * h;
    Picked nxt = connect_branch(es, hmat, cur.v, ta, tb, 0);
    const double w = (k == n) ? 1.0 : ((k % 2 == 1) ? 4.0 : 2.0);
    acc += w * nxt.lambda;
    cur = nxt;
  }
  return -(h / 3.0) * acc;
}

}  // namespace

double cz_phase_defect(double phi01, double phi10, double phi11) {
  return std::abs(std::remainder(phi11 - phi01 - phi10 - pi, 2.0 * pi));
}

DynamicalPhases dynamical_phases(const AdiabaticParams& p,
                                 double blockade_signed_rad_s,
                                 double window_sigmas) {
  if (p.omega0 <= 0.0 || p.delta_t <= 0.0 || window_sigmas <= 0.0) {
    throw std::invalid_argument("adiabatic gate parameters must be positive");
  }
  const double delta = p.delta_over_omega0 * p.omega0;  // laser detuning
  const double d = -delta;                              // |R> diagonal
  const double b =
      UnitSystem::angular_freq_from_rad_s(blockade_signed_rad_s);
  const PulseEnvelope drive = make_gaussian(p.omega0, p.delta_t);
  const double t0 = -window_sigmas * p.delta_t;
  const double t1 = window_sigmas * p.delta_t;

  auto h_one = [&](double t) {
    const double g = 0.5 * drive.omega(t);
    Eigen::MatrixXd m(2, 2);
    m << 0.0, g, g, d;
    return m;
  };
  // symmetric basis (|11>, (|1R>+|R1>)/sqrt2, |RR>)
  auto h_two = [&](double t) {
    const double g = drive.omega(t) / std::sqrt(2.0);
    Eigen::MatrixXd m(3, 3);
    m << 0.0, g, 0.0, g, d, g, 0.0, g, 2.0 * d + b;
    return m;
  };

  DynamicalPhases out;
  out.phi01 = tracked_phase(h_one, Eigen::Vector2d{1.0, 0.0}, t0, t1);
  out.phi11 = tracked_phase(h_two, Eigen::Vector3d{1.0, 0.0, 0.0}, t0, t1);
  return out;
}

double adiabaticity_margin(const PulseEnvelope& envelope, double delta) {
  const double t0 = envelope.window_start();
  const double t1 = envelope.window_stop();
  const int n = 4000;
  const double h = (t1 - t0) / n;
  const double eps = 1e-6;  // us, derivative step
  double best = std::numeric_limits<double>::max();
  for (int k = 0; k <= n; ++k) {
    const double t = t0 + k * h;
    const double om = envelope.omega(t);
    const double dom =
        (envelope.omega(t + eps) - envelope.omega(t - eps)) / (2.0 * eps);
    // |dtheta/dt| = |Delta| |dOmega/dt| / (2 (Delta^2 + Omega^2)) for the
    // two-level mixing angle theta = atan2(Omega, -Delta) / 2
    const double num = std::abs(delta) * std::abs(dom);
    if (num <= 0.0) continue;  // angle not moving here
    const double gap2 = delta * delta + om * om;
    best = std::min(best, 2.0 * gap2 * std::sqrt(gap2) / num);
  }
  return best;
}

AdiabaticSearchResult search_adiabatic_params(double blockade_signed_rad_s,
                                              double omega0,
                                              double delta_t_lo,
                                              double delta_t_hi) {
  if (blockade_signed_rad_s == 0.0 || omega0 <= 0.0 || delta_t_lo <= 0.0 ||
      delta_t_hi < delta_t_lo) {
    throw std::invalid_argument(
        "search requires a nonzero blockade, positive omega0 and "
        "0 < delta_t_lo <= delta_t_hi");
  }

  auto clamp_dt = [&](double dt) {
    return std::min(delta_t_hi, std::max(delta_t_lo, dt));
  };
  // objective: squared defect plus a soft adiabaticity penalty that breaks
  // the degeneracy along the defect-zero curve
  auto eval = [&](double ratio, double dt_raw) {
    const double dt = clamp_dt(dt_raw);
    AdiabaticParams p;
    p.omega0 = omega0;
    p.delta_over_omega0 = ratio;
    p.delta_t = dt;
    const DynamicalPhases ph = dynamical_phases(p, blockade_signed_rad_s);
    const double defect = cz_phase_defect(ph.phi01, ph.phi01, ph.phi11);
    const double margin =
        adiabaticity_margin(make_gaussian(omega0, dt), ratio * omega0);
    return std::tuple<double, double, double>(
        defect * defect + 1e-6 / std::min(margin, 1e12), defect, margin);
  };
  auto objective = [&](double ratio, double dt) {
    return std::get<0>(eval(ratio, dt));
  };

  // coarse grid seed over red detunings
  const bool dt_fixed = (delta_t_hi - delta_t_lo) < 1e-9;
  double best_r = -0.5, best_dt = delta_t_lo;
  double best_f = std::numeric_limits<double>::max();
  const int n_dt = dt_fixed ? 1 : 9;
  for (int i = 0; i <= 27; ++i) {
    const double r = -1.40 + 0.05 * i;  // -1.40 .. -0.05
    for (int j = 0; j < n_dt; ++j) {
      const double dt =
          dt_fixed ? delta_t_lo
                   : delta_t_lo + (delta_t_hi - delta_t_lo) * j / (n_dt - 1);
      const double f = objective(r, dt);
      if (f < best_f) {
        best_f = f;
        best_r = r;
        best_dt = dt;
      }
    }
  }

  if (dt_fixed) {
    // golden-section refinement in the detuning ratio alone
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_r - 0.06, c = best_r + 0.06;
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double f1 = objective(x1, best_dt), f2 = objective(x2, best_dt);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - gr * (c - a);
        f1 = objective(x1, best_dt);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (c - a);
        f2 = objective(x2, best_dt);
      }
    }
    best_r = (f1 < f2) ? x1 : x2;
  } else {
    // Nelder-Mead on (ratio, delta_t)
    using Pt = std::array<double, 2>;
    std::array<Pt, 3> s = {Pt{best_r, best_dt},
                           Pt{best_r + 0.02, best_dt},
                           Pt{best_r, clamp_dt(best_dt * 1.05 + 1e-4)}};
    std::array<double, 3> fs;
    for (int i = 0; i < 3; ++i) fs[i] = objective(s[i][0], s[i][1]);
    for (int it = 0; it < 150; ++it) {
      // order: s[0] best, s[2] worst
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (fs[j] < fs[i]) {
            std::swap(fs[i], fs[j]);
            std::swap(s[i], s[j]);
          }
      const double size = std::max(
          std::abs(s[1][0] - s[0][0]) + std::abs(s[2][0] - s[0][0]),
          (std::abs(s[1][1] - s[0][1]) + std::abs(s[2][1] - s[0][1])) /
              std::max(best_dt, 1e-6));
      if (size < 1e-8) break;
      const Pt centroid{0.5 * (s[0][0] + s[1][0]), 0.5 * (s[0][1] + s[1][1])};
      auto along = [&](double c) {
        return Pt{centroid[0] + c * (centroid[0] - s[2][0]),
                  centroid[1] + c * (centroid[1] - s[2][1])};
      };
      const Pt xr = along(1.0);
      const double fr = objective(xr[0], xr[1]);
      if (fr < fs[0]) {
        const Pt xe = along(2.0);
        const double fe = objective(xe[0], xe[1]);
        if (fe < fr) {
          s[2] = xe;
          fs[2] = fe;
        } else {
          s[2] = xr;
          fs[2] = fr;
        }
      } else if (fr < fs[1]) {
        s[2] = xr;
        fs[2] = fr;
      } else {
        const Pt xc = along(fr < fs[2] ? 0.5 : -0.5);
        const double fc = objective(xc[0], xc[1]);
        if (fc < std::min(fr, fs[2])) {
          s[2] = xc;
          fs[2] = fc;
        } else {  // shrink toward the best vertex
          for (int i = 1; i < 3; ++i) {
            s[i] = {0.5 * (s[i][0] + s[0][0]), 0.5 * (s[i][1] + s[0][1])};
            fs[i] = objective(s[i][0], s[i][1]);
          }
        }
      }
    }
    int ib = 0;
    for (int i = 1; i < 3; ++i)
      if (fs[i] < fs[ib]) ib = i;
    best_r = s[ib][0];
    best_dt = clamp_dt(s[ib][1]);
  }

  AdiabaticSearchResult out;
  out.spec.kind = GateKind::adiabatic;
  out.spec.adiabatic.omega0 = omega0;
  out.spec.adiabatic.delta_over_omega0 = best_r;
  out.spec.adiabatic.delta_t = best_dt;
  out.spec.adiabatic.blockade_rad_s = std::abs(blockade_signed_rad_s);
  out.spec.validate();
  const auto [f, defect, margin] = eval(best_r, best_dt);
  (void)f;
  out.defect = defect;
  out.margin = margin;
  return out;
}

}  // namespace rydfid
