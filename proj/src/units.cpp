#include "rydfid/units.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rydfid {

double effective_wavevector(const PhysicalSetup& setup) {
  double k = 0.0;
  for (const Beam& b : setup.beams) {
    if (b.wavelength_nm <= 0.0)
      throw std::invalid_argument("beam wavelength must be positive");
    k += b.direction * 2.0 * pi / (b.wavelength_nm * 1e-3);  // nm -> um
  }
  return std::abs(k);
}

BeamGeometry effective_beam_geometry(const PhysicalSetup& setup) {
  BeamGeometry g;
  double inv_w2 = 0.0, inv_xr2 = 0.0;
  for (const Beam& b : setup.beams) {
    if (b.waist_um <= 0.0)
      throw std::invalid_argument("beam waist must be positive");
    const double lambda_um = b.wavelength_nm * 1e-3;
    const double xr = pi * b.waist_um * b.waist_um / lambda_um;
    g.rayleigh_um.push_back(xr);
    inv_w2 += 1.0 / (b.waist_um * b.waist_um);
    inv_xr2 += 1.0 / (xr * xr);
  }
  g.waist_eff_um = inv_w2 > 0.0 ? 1.0 / std::sqrt(inv_w2) : 0.0;
  g.rayleigh_eff_um = inv_xr2 > 0.0 ? 1.0 / std::sqrt(inv_xr2) : 0.0;
  return g;
}

double effective_thermal_energy(double temperature_K, double omega) {
  if (omega <= 0.0) {
    // free particle: no zero-point term, classical kB*T
    return UnitSystem::energy_from_kelvin(temperature_K);
  }
  if (temperature_K <= 0.0) return 0.5 * omega;
  const double kT = UnitSystem::energy_from_kelvin(temperature_K);
  const double x = omega / kT;
  if (x > 700.0) return 0.5 * omega;  // exp would overflow; nbar ~ 0
  return omega * (0.5 + 1.0 / std::expm1(x));
}

double mean_occupation(double temperature_K, double omega) {
  if (temperature_K <= 0.0 || omega <= 0.0) return 0.0;
  const double x = omega / UnitSystem::energy_from_kelvin(temperature_K);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

double recoil_energy(const PhysicalSetup& setup) {
  const double k = effective_wavevector(setup);
  return k * k / (2.0 * setup.mass());
}

double thermal_position_spread(const PhysicalSetup& setup, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("trap frequency required");
  const double kteff = effective_thermal_energy(setup.temperature_K, omega);
  return std::sqrt(kteff / setup.mass()) / omega;
}

double thermal_coherence_length(const PhysicalSetup& setup, double omega) {
  const double kteff = effective_thermal_energy(setup.temperature_K, omega);
  if (kteff <= 0.0) throw std::invalid_argument("zero thermal energy");
  return 1.0 / std::sqrt(2.0 * kteff * setup.mass());
}

double recoil_walkoff(const PhysicalSetup& setup, double tau_us) {
  return effective_wavevector(setup) * tau_us / setup.mass();
}

std::string describe(const PhysicalSetup& setup) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "m=%.2f amu, T=%.3g uK, f=(%.3g, %.3g) kHz, trap %s, %zu beams, "
                "K=%.4f rad/um",
                setup.mass_amu, setup.temperature_K * 1e6,
                setup.trap_freq_parallel_Hz * 1e-3, setup.trap_freq_perp_Hz * 1e-3,
                setup.trap_on ? "on" : "off", setup.beams.size(),
                effective_wavevector(setup));
  return std::string(buf);
}

}  // namespace rydfid
