#include "rydfid/kspace.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace rydfid {

namespace {

// Exact propagator application for a constant 2x2 Hermitian block
// [[e1, v], [v, e2]] over time dt (used for flat-top segments).
void apply_const_two_level(std::complex<double>& a, std::complex<double>& b,
                           double e1, double e2, double v, double dt) {
  const double c = 0.5 * (e1 + e2);
  const double d = 0.5 * (e1 - e2);
  const double r = std::hypot(d, v);
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, -c * dt));
  double cosr = std::cos(r * dt);
  double sincr = (r * dt == 0.0) ? dt : std::sin(r * dt) / r;  // sin(r dt)/r
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> na = phase * (cosr * a - i * sincr * (d * a + v * b));
  const std::complex<double> nb = phase * (cosr * b - i * sincr * (v * a - d * b));
  a = na;
  b = nb;
}

}  // namespace

double KGrid::thermal_k(const PhysicalSetup& setup) {
  const double kteff =
      effective_thermal_energy(setup.temperature_K, setup.omega_parallel());
  return std::sqrt(2.0 * setup.mass() * kteff);
}

KGrid KGrid::make_default(const PhysicalSetup& setup, double kick, int nk) {
  if (nk < 8) throw std::invalid_argument("momentum grid too small");
  const double half = 8.0 * thermal_k(setup) + 2.0 * std::abs(kick);
  KGrid g;
  g.nk = nk;
  double dk = 2.0 * half / (nk - 1);
  if (std::abs(kick) > 0.0) {
    // snap dk so the kick is an integer number of grid steps
    const int shift = std::max(1, (int)std::lround(std::abs(kick) / dk));
    dk = std::abs(kick) / shift;
    const double need = 8.0 * thermal_k(setup) + std::abs(kick);
    if (0.5 * dk * (nk - 1) < need * (1.0 - 1e-12))
      throw std::invalid_argument(
          "momentum grid too coarse to cover the thermal span with the kick "
          "on integer grid steps; increase nk");
  }
  g.dk = dk;
  g.k0 = -0.5 * dk * (nk - 1);
  return g;
}

bool KGrid::covers(const PhysicalSetup& setup, double kick) const {
  const double need = 8.0 * thermal_k(setup) + std::abs(kick);
  return 0.5 * span() >= need * (1.0 - 1e-12);
}

namespace {

KKernel propagate_two_level_impl(const KGrid& grid,
                                 const PulseEnvelope& envelope,
                                 const TimeFunction& detuning,
                                 const double* const_detuning, double kick,
                                 const PhysicalSetup& setup, double t0,
                                 double tf, const OdeOptions& opt) {
  if (grid.nk <= 0 || grid.dk <= 0.0)
    throw std::invalid_argument("invalid momentum grid");
  const double m = setup.mass();
  KKernel kern;
  kern.grid = grid;
  kern.k11.resize(grid.nk);
  kern.rydberg_residual.resize(grid.nk);

  const bool exact_flat =
      envelope.family == PulseFamily::flat_top && const_detuning != nullptr;
  const double ws = std::max(t0, envelope.window_start());
  const double we = std::min(tf, envelope.window_stop());

  for (int i = 0; i < grid.nk; ++i) {
    const double k = grid.k(i);
    const double e1 = k * k / (2.0 * m);
    const double e2 = (k + kick) * (k + kick) / (2.0 * m);
    std::complex<double> a(1.0, 0.0), b(0.0, 0.0);
    if (exact_flat) {
      const double dd = *const_detuning;
      if (ws > t0) apply_const_two_level(a, b, e1, e2 - dd, 0.0, ws - t0);
      if (we > ws)
        apply_const_two_level(a, b, e1, e2 - dd, 0.5 * envelope.omega_max,
                              we - ws);
      if (tf > we) apply_const_two_level(a, b, e1, e2 - dd, 0.0, tf - we);
    } else {
      cvec y = {a, b};
      auto sys = [&](const cvec& s, cvec& ds, double t) {
        const std::complex<double> im(0.0, 1.0);
        const double v = 0.5 * envelope.omega(t);
        const double dd = const_detuning ? *const_detuning : detuning(t);
        ds[0] = -im * (e1 * s[0] + v * s[1]);
        ds[1] = -im * ((e2 - dd) * s[1] + v * s[0]);
      };
      try {
        // integrate in (up to) three spans so envelope edges are step limits
        double edges[4] = {t0, std::min(std::max(ws, t0), tf),
                           std::max(std::min(we, tf), t0), tf};
        for (int seg = 0; seg < 3; ++seg)
          if (edges[seg + 1] > edges[seg])
            integrate_cvec(sys, y, edges[seg], edges[seg + 1], opt);
      } catch (const std::exception& e) {
        throw std::runtime_error("momentum-grid integration failed at k index " +
                                 std::to_string(i) + ": " + e.what());
      }
      a = y[0];
      b = y[1];
    }
    kern.k11[i] = std::exp(std::complex<double>(0.0, e1 * (tf - t0))) * a;
    kern.rydberg_residual[i] = std::norm(b);
  }
  return kern;
}

}  // namespace

KKernel propagate_two_level(const KGrid& grid, const PulseEnvelope& envelope,
                            const TimeFunction& detuning, double kick,
                            const PhysicalSetup& setup, double t0, double tf,
                            const OdeOptions& opt) {
  return propagate_two_level_impl(grid, envelope, detuning, nullptr, kick,
                                  setup, t0, tf, opt);
}

KKernel propagate_two_level(const KGrid& grid, const PulseEnvelope& envelope,
                            double detuning, double kick,
                            const PhysicalSetup& setup, double t0, double tf,
                            const OdeOptions& opt) {
  return propagate_two_level_impl(grid, envelope, TimeFunction(), &detuning,
                                  kick, setup, t0, tf, opt);
}

KKernel propagate_stirap(const KGrid& grid, const PulseEnvelope& omega1,
                         const PulseEnvelope& omegaR, double delta1,
                         double deltaR, double k1, double kR,
                         const PhysicalSetup& setup, double t0, double tf,
                         const OdeOptions& opt) {
  if (grid.nk <= 0 || grid.dk <= 0.0)
    throw std::invalid_argument("invalid momentum grid");
  const double m = setup.mass();
  KKernel kern;
  kern.grid = grid;
  kern.k11.resize(grid.nk);
  kern.rydberg_residual.resize(grid.nk);
  for (int i = 0; i < grid.nk; ++i) {
    const double k = grid.k(i);
    const double e1 = k * k / (2.0 * m) + delta1;
    const double ep = (k + k1) * (k + k1) / (2.0 * m);
    const double er = (k + k1 - kR) * (k + k1 - kR) / (2.0 * m) - deltaR;
    cvec y = {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    auto sys = [&](const cvec& s, cvec& ds, double t) {
      const std::complex<double> im(0.0, 1.0);
      const double v1 = 0.5 * omega1.omega(t);
      const double vr = 0.5 * omegaR.omega(t);
      ds[0] = -im * (e1 * s[0] + v1 * s[1]);
      ds[1] = -im * (ep * s[1] + v1 * s[0] + vr * s[2]);
      ds[2] = -im * (er * s[2] + vr * s[1]);
    };
    try {
      integrate_cvec(sys, y, t0, tf, opt);
    } catch (const std::exception& e) {
      throw std::runtime_error("three-level integration failed at k index " +
                               std::to_string(i) + ": " + e.what());
    }
    kern.k11[i] = std::exp(std::complex<double>(0.0, k * k / (2.0 * m) *
                                                        (tf - t0))) * y[0];
    kern.rydberg_residual[i] = std::norm(y[1]) + std::norm(y[2]);
  }
  return kern;
}

KKernel delta_pi_pair_kernel(const KGrid& grid, double kick,
                             const PhysicalSetup& setup, double tau1) {
  const int shift = (int)std::lround(kick / grid.dk);
  if (std::abs(kick - shift * grid.dk) > 1e-9 * std::max(1.0, std::abs(kick)))
    throw std::invalid_argument(
        "kick must be an integer number of grid steps; build the grid with "
        "KGrid::make_default for this kick");
  const double m = setup.mass();
  KKernel kern;
  kern.grid = grid;
  kern.k11.resize(grid.nk);
  kern.rydberg_residual.assign(grid.nk, 0.0);
  for (int i = 0; i < grid.nk; ++i) {
    // pi kick up maps sample i to i+shift; free flight; pi kick back down
    const double k = grid.k(i);
    const double kup = grid.k0 + (i + shift) * grid.dk;
    const double de = (kup * kup - k * k) / (2.0 * m);
    kern.k11[i] = -std::exp(std::complex<double>(0.0, -de * tau1));
  }
  return kern;
}

OverlapResult chi_thermal(const KKernel& kernel, const PhysicalSetup& setup,
                          double omega) {
  const double kteff = effective_thermal_energy(setup.temperature_K, omega);
  const double m = setup.mass();
  const double sig2 = m * kteff;  // momentum variance
  const KGrid& g = kernel.grid;
  double coverage = 0.0;
  for (int i = 0; i < g.nk; ++i) {
    const double k = g.k(i);
    coverage += g.dk / std::sqrt(2.0 * pi * sig2) *
                std::exp(-k * k / (2.0 * sig2));
  }
  if (coverage < 0.999)
    throw std::runtime_error("momentum grid covers too little thermal weight");
  std::complex<double> chi(0.0, 0.0);
  for (int i = 0; i < g.nk; ++i) {
    const double k = g.k(i);
    const double w = g.dk / std::sqrt(2.0 * pi * sig2) *
                     std::exp(-k * k / (2.0 * sig2)) / coverage;
    chi += w * kernel.k11[i];
  }
  OverlapResult r;
  r.chi = chi;
  r.epsilon = 1.0 - std::abs(chi);
  r.phase = std::arg(chi);
  r.leading_order_valid = r.epsilon <= 0.1;
  return r;
}

double tau_a(const PulseEnvelope& envelope, double delta,
             const OdeOptions& opt) {
  cvec y = {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};  // phi_1, phi_R, int P_R dt
  auto sys = [&](const cvec& s, cvec& ds, double t) {
    const std::complex<double> im(0.0, 1.0);
    const double v = 0.5 * envelope.omega(t);
    ds[0] = -im * v * s[1];
    ds[1] = -im * (-delta * s[1] + v * s[0]);
    ds[2] = std::norm(s[1]);
  };
  integrate_cvec(sys, y, envelope.window_start(), envelope.window_stop(), opt);
  if (std::norm(y[1]) > 1e-4)
    throw std::runtime_error(
        "pulse is not adiabatic: final Rydberg population " +
        std::to_string(std::norm(y[1])));
  return y[2].real();
}

double tau_a_adiabatic_estimate(const PulseEnvelope& envelope, double delta) {
  const auto f = [&](double t) {
    const double w = envelope.omega(t);
    return 0.5 * (1.0 - std::abs(delta) / std::hypot(delta, w));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, envelope.window_start(), envelope.window_stop(), 10, 1e-13);
}

double adiabatic_phase_check(const PulseEnvelope& envelope, double delta,
                             double deltaE) {
  // The |1>-connected branch accumulates phi = int (D + sqrt(D^2+Omega^2))/2
  // with D the effective detuning; a deltaE shift of the Rydberg diagonal
  // turns D = delta into delta - deltaE.  alpha = phi(0) - phi(deltaE).
  const auto f = [&](double t) {
    const double w = envelope.omega(t);
    const double dshift = delta - deltaE;
    return 0.5 * ((delta + std::hypot(delta, w)) -
                  (dshift + std::hypot(dshift, w)));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, envelope.window_start(), envelope.window_stop(), 10, 1e-13);
}

}  // namespace rydfid
