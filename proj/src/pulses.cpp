#include "rydfid/pulses.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace rydfid {

namespace {
inline double bump2(double u) { return std::exp(-u * u); }
inline double bump6(double u) {
  const double u2 = u * u;
  return std::exp(-u2 * u2 * u2);
}
// Gaussian support half-width in units of the width parameter: exp(-16) ~ 1e-7
constexpr double kGaussianHalfWindow = 4.0;
// t^6 bumps decay much faster: exp(-2.2^6) ~ 4e-50
constexpr double kSuperGaussianHalfWindow = 2.2;
}  // namespace

double PulseEnvelope::omega(double t) const {
  switch (family) {
    case PulseFamily::flat_top:
      return (t >= t_start && t < t_start + width) ? omega_max : 0.0;
    case PulseFamily::gaussian_pair:
      return omega_max *
             (bump2((t + tau / 2.0) / width) + bump2((t - tau / 2.0) / width));
    case PulseFamily::super_gaussian_pair:
      return omega_max *
             (bump6((t + tau / 2.0) / width) + bump6((t - tau / 2.0) / width));
    case PulseFamily::super_gaussian_single:
      return omega_max * bump6(t / width);
    case PulseFamily::gaussian:
      return omega_max * bump2(t / width);
    case PulseFamily::offset_gaussian: {
      if (t <= 0.0 || t >= tau) return 0.0;
      const double off = std::exp(-tau * tau / (4.0 * width * width));
      const double g = std::exp(-std::pow((t - tau / 2.0) / width, 2));
      return omega_max * (g - off) / (1.0 - off);
    }
  }
  return 0.0;
}

double PulseEnvelope::window_start() const {
  switch (family) {
    case PulseFamily::flat_top:
      return t_start;
    case PulseFamily::gaussian_pair:
      return -tau / 2.0 - kGaussianHalfWindow * width;
    case PulseFamily::super_gaussian_pair:
      return -tau / 2.0 - kSuperGaussianHalfWindow * width;
    case PulseFamily::super_gaussian_single:
      return -kSuperGaussianHalfWindow * width;
    case PulseFamily::gaussian:
      return -kGaussianHalfWindow * width;
    case PulseFamily::offset_gaussian:
      return 0.0;
  }
  return 0.0;
}

double PulseEnvelope::window_stop() const {
  switch (family) {
    case PulseFamily::flat_top:
      return t_start + width;
    case PulseFamily::gaussian_pair:
      return tau / 2.0 + kGaussianHalfWindow * width;
    case PulseFamily::super_gaussian_pair:
      return tau / 2.0 + kSuperGaussianHalfWindow * width;
    case PulseFamily::super_gaussian_single:
      return kSuperGaussianHalfWindow * width;
    case PulseFamily::gaussian:
      return kGaussianHalfWindow * width;
    case PulseFamily::offset_gaussian:
      return tau;
  }
  return 0.0;
}

double PulseEnvelope::shape_integral() const {
  if (family == PulseFamily::flat_top) return width;
  PulseEnvelope unit = *this;
  unit.omega_max = 1.0;
  const auto f = [&unit](double t) { return unit.omega(t); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, window_start(), window_stop(), 10, 1e-13);
}

double calibrate_pulse_area(const PulseEnvelope& envelope, double target_area) {
  const double shape = envelope.shape_integral();
  if (shape <= 0.0) throw std::invalid_argument("degenerate envelope shape");
  return target_area / shape;
}

PulseEnvelope make_flat_top(double omega_max, double width, double t_start) {
  return {PulseFamily::flat_top, omega_max, width, 0.0, t_start};
}
PulseEnvelope make_gaussian_pair(double omega_max, double dt, double tau) {
  return {PulseFamily::gaussian_pair, omega_max, dt, tau, 0.0};
}
PulseEnvelope make_super_gaussian_pair(double omega_max, double dt1, double tau1) {
  return {PulseFamily::super_gaussian_pair, omega_max, dt1, tau1, 0.0};
}
PulseEnvelope make_super_gaussian_single(double omega_max, double dt2) {
  return {PulseFamily::super_gaussian_single, omega_max, dt2, 0.0, 0.0};
}
PulseEnvelope make_gaussian(double omega_max, double dt) {
  return {PulseFamily::gaussian, omega_max, dt, 0.0, 0.0};
}
PulseEnvelope make_offset_gaussian(double omega_max, double sigma, double t_pulse) {
  return {PulseFamily::offset_gaussian, omega_max, sigma, t_pulse, 0.0};
}

void GateSpec::validate() const {
  if (kind == GateKind::pi_2pi_pi) {
    const auto& p = pi_2pi_pi;
    if (p.omega1_max <= 0.0 || p.omega2_max <= 0.0 || p.tau1 <= 0.0 ||
        p.delta_t1 <= 0.0 || p.delta_t2 <= 0.0)
      throw std::invalid_argument("pi-2pi-pi gate parameters must be positive");
    if (p.tau1 <= 2.0 * p.delta_t1)
      throw std::invalid_argument("pi-2pi-pi gate requires tau1 > 2 delta_t1");
  } else {
    const auto& a = adiabatic;
    if (a.omega0 <= 0.0 || a.delta_t <= 0.0)
      throw std::invalid_argument("adiabatic gate parameters must be positive");
  }
}

GateSpec standard_pi_2pi_pi_gate() {
  GateSpec g;
  g.kind = GateKind::pi_2pi_pi;
  g.pi_2pi_pi.tau1 = 1.0044;
  g.pi_2pi_pi.delta_t1 = 0.14;
  g.pi_2pi_pi.delta_t2 = 0.22;
  g.pi_2pi_pi.omega1_max =
      calibrate_pulse_area(make_super_gaussian_single(1.0, 0.14), pi);
  g.pi_2pi_pi.omega2_max =
      calibrate_pulse_area(make_super_gaussian_single(1.0, 0.22), 2.0 * pi);
  g.validate();
  return g;
}

GateSpec table_adiabatic_gate(int row) {
  GateSpec g;
  g.kind = GateKind::adiabatic;
  g.adiabatic.omega0 = 2.0 * pi * 17.0;  // 2pi*17 MHz in rad/us
  switch (row) {
    case 1:
      g.adiabatic.delta_over_omega0 = -0.5000;
      g.adiabatic.delta_t = 0.2;
      g.adiabatic.blockade_rad_s = 2.0 * pi * 600.0e6;
      break;
    case 2:
      g.adiabatic.delta_over_omega0 = -0.8635;
      g.adiabatic.delta_t = 0.2165;
      g.adiabatic.blockade_rad_s = 2.0 * pi * 60.0e6;
      break;
    case 3:
      g.adiabatic.delta_over_omega0 = -0.3000;
      g.adiabatic.delta_t = 0.5;
      g.adiabatic.blockade_rad_s = 2.0 * pi * 4.0e6;
      break;
    default:
      throw std::invalid_argument("adiabatic gate row must be 1, 2 or 3");
  }
  g.validate();
  return g;
}

}  // namespace rydfid
