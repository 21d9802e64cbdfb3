#include "rydfid/fock.hpp"

#include <algorithm>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <stdexcept>

namespace rydfid {

namespace {

// i^k without drift
std::complex<double> ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

Eigen::MatrixXcd build_displacement(int n_max, double eta_ld) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const int dim = n_max + 1;
  Eigen::MatrixXcd d(dim, dim);
  if (eta_ld == 0.0) {
    d.setIdentity();
    return d;
  }
  const double e2 = eta_ld * eta_ld;
  const double pref = std::exp(-0.5 * e2);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n <= m; ++n) {
      const int k = m - n;
      // sqrt(n!/m!) eta^k via log-gamma for stability
      const double amp =
          std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) +
                   k * std::log(eta_ld));
      const double lag = boost::math::laguerre(n, k, e2);
      const std::complex<double> val = pref * ipow(k) * amp * lag;
      d(m, n) = val;
      d(n, m) = val;  // X = a + a^dag is symmetric, so is e^{i eta X}
    }
  }
  return d;
}

Eigen::MatrixXcd build_displacement_taylor(int n_max, double eta_ld,
                                           int order) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (order < 0) throw std::invalid_argument("order must be non-negative");
  const int big = n_max + 1 + order;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(big, big);
  for (int n = 0; n + 1 < big; ++n) {
    const double v = std::sqrt(n + 1.0);
    x(n, n + 1) = v;
    x(n + 1, n) = v;
  }
  x *= std::complex<double>(0.0, eta_ld);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(big, big);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(big, big);
  for (int j = 1; j <= order; ++j) {
    term = term * x / static_cast<double>(j);
    sum += term;
  }
  return sum.topLeftCorner(n_max + 1, n_max + 1);
}

FockBasis make_fock_basis(const PhysicalSetup& setup, double omega, int n_max,
                          double kick) {
  if (omega <= 0.0) throw std::invalid_argument("mode frequency must be positive");
  FockBasis b;
  b.n_max = n_max;
  b.omega = omega;
  b.lamb_dicke = kick * std::sqrt(1.0 / (2.0 * setup.mass() * omega));
  b.displacement = build_displacement(n_max, b.lamb_dicke);
  return b;
}

Eigen::MatrixXd kinetic_fock_matrix(int n_max, double omega) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const int dim = n_max + 1;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    k(n, n) = omega * (2.0 * n + 1.0) / 4.0;
    if (n + 2 < dim) {
      const double v = -omega * std::sqrt((n + 1.0) * (n + 2.0)) / 4.0;
      k(n, n + 2) = v;
      k(n + 2, n) = v;
    }
  }
  return k;
}

Eigen::MatrixXcd idle_propagator(int n_max, double omega, bool trap_on,
                                 double duration) {
  const int dim = n_max + 1;
  if (trap_on) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n)
      u(n, n) = std::exp(std::complex<double>(0.0, -omega * (n + 0.5) * duration));
    return u;
  }
  const Eigen::MatrixXd k = kinetic_fock_matrix(n_max, omega);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phases(dim);
  for (int n = 0; n < dim; ++n)
    phases(n) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(n) * duration));
  return v.cast<std::complex<double>>() * phases.asDiagonal() *
         v.transpose().cast<std::complex<double>>();
}

std::vector<double> thermal_occupations(double temperature_K, double omega,
                                        int n_cap) {
  if (n_cap < 0) throw std::invalid_argument("n_cap must be non-negative");
  std::vector<double> p(n_cap + 1, 0.0);
  if (temperature_K <= 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double kt = temperature_K * kB_over_hbar;
  const double q = std::exp(-omega / kt);
  const double norm = 1.0 - q;
  double w = norm;
  for (int n = 0; n <= n_cap; ++n) {
    p[n] = w;
    w *= q;
  }
  return p;
}

std::vector<ThermalMember> thermal_ensemble(const PhysicalSetup& setup,
                                            double omega,
                                            double weight_cutoff) {
  if (!(weight_cutoff > 0.0 && weight_cutoff <= 1.0))
    throw std::invalid_argument("weight_cutoff must lie in (0, 1]");
  if (omega <= 0.0) throw std::invalid_argument("mode frequency must be positive");
  if (setup.temperature_K <= 0.0) return {{0, 0, 1.0}};

  const double kt = setup.temperature_K * kB_over_hbar;
  const double q = std::exp(-omega / kt);
  // single-mode tail beyond N is q^{N+1}; keep it far below the cutoff
  int cap = static_cast<int>(
      std::ceil(std::log(std::max(1e-300, weight_cutoff * 1e-4)) / std::log(q)));
  cap = std::clamp(cap, 1, 4000);
  const auto p = thermal_occupations(setup.temperature_K, omega, cap);

  std::vector<ThermalMember> all;
  all.reserve(static_cast<size_t>(cap + 1) * (cap + 1));
  for (int n1 = 0; n1 <= cap; ++n1)
    for (int n2 = 0; n2 <= cap; ++n2)
      all.push_back({n1, n2, p[n1] * p[n2]});
  std::sort(all.begin(), all.end(), [](const ThermalMember& a,
                                       const ThermalMember& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.n1 != b.n1) return a.n1 < b.n1;
    return a.n2 < b.n2;
  });
  std::vector<ThermalMember> out;
  double cum = 0.0;
  for (const auto& m : all) {
    out.push_back(m);
    cum += m.weight;
    if (cum >= 1.0 - weight_cutoff) break;
  }
  for (auto& m : out) m.weight /= cum;
  return out;
}

}  // namespace rydfid
