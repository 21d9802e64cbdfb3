#include "rydfid/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydfid {

namespace {

// Gaussian walk-off overlap shared by the sudden-regime pair formulas:
// chi = sign * exp(-i phi_rec) * exp(-x), x = K^2 tau^2 kB T_eff / 2M.
OverlapResult sudden_pair_overlap(const PhysicalSetup& setup, double k,
                                  double tau) {
  const double m = setup.mass();
  const double kteff =
      effective_thermal_energy(setup.temperature_K, setup.omega_parallel());
  const double x = k * k * tau * tau * kteff / (2.0 * m);
  const double erec_phase = k * k / (2.0 * m) * tau;  // E_rec tau
  OverlapResult r;
  r.chi = -std::exp(std::complex<double>(-x, -erec_phase));
  r.epsilon = 1.0 - std::abs(r.chi);
  r.phase = std::arg(r.chi);
  r.leading_order_valid = r.epsilon <= 0.1;
  return r;
}

}  // namespace

OverlapResult chi_single_2pi(const PhysicalSetup& setup, double tau2) {
  return sudden_pair_overlap(setup, effective_wavevector(setup), tau2);
}

OverlapResult chi_two_pi(const PhysicalSetup& setup, double tau1) {
  return sudden_pair_overlap(setup, effective_wavevector(setup), tau1);
}

OverlapResult eps_ho_trap_on(const PhysicalSetup& setup, double tau) {
  const double k = effective_wavevector(setup);
  const double m = setup.mass();
  const double w = setup.omega_parallel();
  const double kteff = effective_thermal_energy(setup.temperature_K, w);
  double eps, phase;
  if (w * tau < 1e-6) {
    // series limit, avoids 0/0 for free flight
    const double wt2 = w * tau * w * tau;
    eps = k * k * kteff * tau * tau / (2.0 * m) * (1.0 - wt2 / 12.0);
    phase = -k * k * tau / (2.0 * m) * (1.0 - wt2 / 6.0);
  } else {
    eps = k * k * kteff / (m * w * w) * (1.0 - std::cos(w * tau));
    phase = -k * k / (2.0 * m * w) * std::sin(w * tau);
  }
  OverlapResult r;
  r.epsilon = eps;
  r.chi = (1.0 - eps) * std::exp(std::complex<double>(0.0, phase));
  r.phase = phase;
  r.leading_order_valid = eps <= 0.1;
  return r;
}

OverlapResult chi_ho_ground_exact(const PhysicalSetup& setup, double tau) {
  const double k = effective_wavevector(setup);
  const double m = setup.mass();
  const double w = setup.omega_parallel();
  if (w <= 0.0) throw std::invalid_argument("trap frequency required");
  const double eta2 = k * k / (2.0 * m * w);  // Lamb-Dicke parameter squared
  const double mag = std::exp(-eta2 * (1.0 - std::cos(w * tau)));
  const double phase = -eta2 * std::sin(w * tau);
  OverlapResult r;
  r.chi = mag * std::exp(std::complex<double>(0.0, phase));
  r.epsilon = 1.0 - mag;
  r.phase = phase;
  r.leading_order_valid = r.epsilon <= 0.1;
  return r;
}

OverlapResult eps_adiabatic(const PhysicalSetup& setup, double tau_x) {
  return sudden_pair_overlap(setup, effective_wavevector(setup), tau_x);
}

OverlapResult eps_stirap(const PhysicalSetup& setup, double K1, double KR,
                         double tau) {
  const double m = setup.mass();
  const double kteff =
      effective_thermal_energy(setup.temperature_K, setup.omega_parallel());
  const double dk = K1 - KR;
  const double x = dk * dk * tau * tau * kteff / (2.0 * m);
  OverlapResult r;
  r.chi = std::exp(-x);
  r.epsilon = 1.0 - std::exp(-x);
  r.phase = 0.0;
  r.leading_order_valid = r.epsilon <= 0.1;
  return r;
}

OverlapResult eps_stirap(const PhysicalSetup& setup_K1,
                         const PhysicalSetup& setup_KR, double tau) {
  return eps_stirap(setup_K1, effective_wavevector(setup_K1),
                    effective_wavevector(setup_KR), tau);
}

FocusingResult eps_focusing(const PhysicalSetup& setup) {
  const BeamGeometry g = effective_beam_geometry(setup);
  if (g.waist_eff_um <= 0.0 || g.rayleigh_eff_um <= 0.0)
    throw std::invalid_argument("focusing estimate needs beam geometry");
  const double w0 = g.waist_eff_um;
  const double xr = g.rayleigh_eff_um;
  const double x2 = std::pow(thermal_position_spread(setup, setup.omega_parallel()), 2);
  const double y2 = std::pow(thermal_position_spread(setup, setup.omega_perp()), 2);
  const double x0 = setup.misalign_x0_um, y0 = setup.misalign_y0_um;

  const double pi2h = pi * pi / 2.0;
  const double t_axial =
      pi2h * (3.0 * x2 * x2 + 6.0 * x2 * x0 * x0 + std::pow(x0, 4)) /
      (4.0 * std::pow(xr, 4));
  const double t_cross = pi2h * (x2 + x0 * x0) * (2.0 * y2 + y0 * y0) /
                         (xr * xr * w0 * w0);
  const double t_trans =
      pi2h * (8.0 * y2 * y2 + 8.0 * y2 * y0 * y0 + std::pow(y0, 4)) /
      std::pow(w0, 4);

  FocusingResult r;
  r.eps_full = t_axial + t_cross + t_trans;
  const double d = y2 / (w0 * w0);
  r.eps_transverse_only = pi2h * std::pow(y0 / w0, 4) +
                          4.0 * pi * pi * (y0 / w0) * (y0 / w0) * d +
                          4.0 * pi * pi * d * d;
  r.axial_fraction = t_trans > 0.0 ? (t_axial + t_cross) / t_trans
                                   : std::numeric_limits<double>::infinity();
  r.leading_order_valid = r.eps_full <= 0.1;
  return r;
}

PhaseVariation phase_variation_estimates(const PhysicalSetup& setup) {
  const BeamGeometry g = effective_beam_geometry(setup);
  const double xrms = thermal_position_spread(setup, setup.omega_parallel());
  const double y2 = std::pow(thermal_position_spread(setup, setup.omega_perp()), 2);
  const double y0 = setup.misalign_y0_um;
  const double rho2 = (y2 + y0 * y0) + y2;  // <(y-y0)^2> + <z^2>
  PhaseVariation pv;
  for (size_t i = 0; i < setup.beams.size(); ++i) {
    const Beam& b = setup.beams[i];
    const double kbeam = 2.0 * pi / (b.wavelength_nm * 1e-3);
    const double xr = g.rayleigh_um[i];
    pv.gouy_rel.push_back(xrms * xrms / (3.0 * std::pow(xr, 3) * kbeam));
    pv.curvature_rel.push_back(rho2 / (xr * b.waist_um * b.waist_um * kbeam));
  }
  return pv;
}

double infidelity_pi2pipi_kick(const PhysicalSetup& setup, double tau1,
                               double tau2) {
  const double k = effective_wavevector(setup);
  const double kteff =
      effective_thermal_energy(setup.temperature_K, setup.omega_parallel());
  return k * k * kteff / (2.0 * setup.mass()) *
         (tau1 * tau1 / 2.0 + 3.0 * tau2 * tau2 / 8.0);
}

double infidelity_radiative(double gamma, double tau1, double tau2) {
  return gamma * (tau1 / 2.0 + tau2 / 4.0);
}

double infidelity_adiabatic_kick(const PhysicalSetup& setup, double tau_a,
                                 double tau_R) {
  const double k = effective_wavevector(setup);
  const double kteff =
      effective_thermal_energy(setup.temperature_K, setup.omega_parallel());
  const double d = tau_R - tau_a;
  return k * k * kteff / (2.0 * setup.mass()) *
         (tau_a * tau_a / 2.0 + tau_R * tau_R / 2.0 + d * d / 4.0);
}

double infidelity_rydberg_kick(const PhysicalSetup& setup, double tau_RR) {
  if (setup.r12_um <= 0.0)
    throw std::invalid_argument("rydberg kick estimate needs r12 > 0");
  const double w = setup.omega_perp();
  if (w <= 0.0) throw std::invalid_argument("transverse trap frequency required");
  const double kteff = effective_thermal_energy(setup.temperature_K, w);
  const double b = setup.blockade();
  return 27.0 * b * b * kteff * tau_RR * tau_RR /
         (2.0 * setup.mass() * w * w * setup.r12_um * setup.r12_um);
}

DopplerForms doppler_asymptotics(const PhysicalSetup& setup, double tau1) {
  const double k = effective_wavevector(setup);
  const double m = setup.mass();
  const double w = setup.omega_parallel();
  if (w <= 0.0) throw std::invalid_argument("trap frequency required");
  const double kt = setup.thermal_energy();
  const double base = k * k * tau1 * tau1 * w / (4.0 * m);
  DopplerForms f;
  if (kt <= 0.0) {
    f.exact = base;       // coth -> 1
    f.low_T = base;       // exp(-w/kT) -> 0
    f.high_T = 0.0;       // high-T expansion undefined at T = 0
    f.high_T_leading = 0.0;
  } else {
    const double x = w / (2.0 * kt);
    f.exact = base / std::tanh(x);
    f.low_T = base * (1.0 + 2.0 * std::exp(-2.0 * x));
    f.high_T_leading = k * k * tau1 * tau1 * kt / (2.0 * m);
    f.high_T = f.high_T_leading * (1.0 + (w / kt) * (w / kt) / 12.0);
  }
  return f;
}

HeatingResult heating_estimates(const PhysicalSetup& setup, double tau1,
                                double tau_off, int n_gates) {
  const double w = setup.omega_parallel();
  const double erec = recoil_energy(setup);
  HeatingResult h;
  h.dE_per_kick = erec * (w * tau1) * (w * tau1);
  h.dE_per_kick_nK = UnitSystem::energy_to_kelvin(h.dE_per_kick) * 1e9;
  h.growth_factor = std::exp(n_gates * (w * tau_off) * (w * tau_off) / 2.0);
  const double teff_K = UnitSystem::energy_to_kelvin(
      effective_thermal_energy(setup.temperature_K, w));
  h.T_after_N_K = teff_K * h.growth_factor;
  return h;
}

}  // namespace rydfid
