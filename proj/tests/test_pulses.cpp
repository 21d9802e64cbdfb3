#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rydfid/pulses.hpp"

using namespace rydfid;

namespace {
constexpr double kGamma76 = 0.9277193336;  // Gamma(7/6)
}

TEST_CASE("flat-top envelope is a rectangle") {
  const auto p = make_flat_top(10.0, 0.5, 1.0);
  CHECK(p.omega(0.999) == 0.0);
  CHECK(p.omega(1.0) == doctest::Approx(10.0));
  CHECK(p.omega(1.25) == doctest::Approx(10.0));
  CHECK(p.omega(1.5) == 0.0);
  CHECK(p.window_start() == doctest::Approx(1.0));
  CHECK(p.window_stop() == doctest::Approx(1.5));
  CHECK(p.shape_integral() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gaussian families have the expected profile and windows") {
  const auto g = make_gaussian(5.0, 0.2);
  CHECK(g.omega(0.0) == doctest::Approx(5.0));
  CHECK(g.omega(0.2) == doctest::Approx(5.0 * std::exp(-1.0)));
  CHECK(g.omega(-0.2) == doctest::Approx(g.omega(0.2)));
  CHECK(g.window_start() == doctest::Approx(-0.8));
  CHECK(g.window_stop() == doctest::Approx(0.8));

  const auto s = make_super_gaussian_single(5.0, 0.2);
  CHECK(s.omega(0.2) == doctest::Approx(5.0 * std::exp(-1.0)));
  // t^6 profile is much flatter near the peak than a Gaussian
  CHECK(s.omega(0.1) > g.omega(0.1));
  CHECK(s.window_stop() == doctest::Approx(2.2 * 0.2));

  const auto pair = make_gaussian_pair(5.0, 0.3, 0.6);
  CHECK(pair.omega(0.1) == doctest::Approx(pair.omega(-0.1)).epsilon(1e-12));
  CHECK(pair.omega(0.3) ==
        doctest::Approx(5.0 * (1.0 + std::exp(-4.0))).epsilon(1e-12));
  CHECK(pair.window_start() == doctest::Approx(-0.3 - 4.0 * 0.3));

  const auto spair = make_super_gaussian_pair(5.0, 0.14, 1.0044);
  CHECK(spair.omega(0.5022) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(spair.window_stop() == doctest::Approx(0.5022 + 2.2 * 0.14));
}

TEST_CASE("offset gaussian vanishes exactly at both ends") {
  const auto p = make_offset_gaussian(7.0, 0.3, 1.2);
  CHECK(p.omega(0.0) == 0.0);
  CHECK(p.omega(1.2) == 0.0);
  CHECK(p.omega(-0.1) == 0.0);
  CHECK(p.omega(1.3) == 0.0);
  CHECK(p.omega(0.6) == doctest::Approx(7.0).epsilon(1e-12));  // peak at centre
  CHECK(p.omega(1e-9) < 1e-6);  // continuous ramp from zero
  CHECK(p.window_start() == 0.0);
  CHECK(p.window_stop() == doctest::Approx(1.2));
  CHECK(p.shape_integral() ==
        doctest::Approx(0.516734388248).epsilon(1e-9));
}

TEST_CASE("shape integrals match closed forms") {
  // single Gaussian: sqrt(pi) dt
  CHECK(make_gaussian(1.0, 0.2).shape_integral() ==
        doctest::Approx(std::sqrt(pi) * 0.2).epsilon(1e-7));
  // t^6 bump: 2 dt Gamma(7/6)
  CHECK(make_super_gaussian_single(1.0, 0.14).shape_integral() ==
        doctest::Approx(2.0 * 0.14 * kGamma76).epsilon(1e-9));
  // overlapping Gaussian pair still integrates to the sum of the lobes
  CHECK(make_gaussian_pair(1.0, 0.3, 0.6).shape_integral() ==
        doctest::Approx(2.0 * std::sqrt(pi) * 0.3).epsilon(1e-7));
  // well-separated t^6 pair
  CHECK(make_super_gaussian_pair(1.0, 0.14, 1.0044).shape_integral() ==
        doctest::Approx(4.0 * 0.14 * kGamma76).epsilon(1e-9));
}

TEST_CASE("pulse-area calibration") {
  const double w1 = calibrate_pulse_area(make_super_gaussian_single(1.0, 0.14), pi);
  const double w2 =
      calibrate_pulse_area(make_super_gaussian_single(1.0, 0.22), 2.0 * pi);
  CHECK(w1 == doctest::Approx(12.0941467490).epsilon(1e-9));
  CHECK(w2 == doctest::Approx(15.3925504078).epsilon(1e-9));
  // round trip: the calibrated envelope carries exactly the target area
  CHECK(w1 * make_super_gaussian_single(1.0, 0.14).shape_integral() ==
        doctest::Approx(pi).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_pulse_area(make_flat_top(1.0, 0.0), pi),
                  std::invalid_argument);
}

TEST_CASE("standard blockade gate parameters") {
  const auto g = standard_pi_2pi_pi_gate();
  CHECK(g.kind == GateKind::pi_2pi_pi);
  CHECK(g.pi_2pi_pi.tau1 == doctest::Approx(1.0044));
  CHECK(g.pi_2pi_pi.delta_t1 == doctest::Approx(0.14));
  CHECK(g.pi_2pi_pi.delta_t2 == doctest::Approx(0.22));
  CHECK(g.pi_2pi_pi.omega1_max == doctest::Approx(12.0941467490).epsilon(1e-9));
  CHECK(g.pi_2pi_pi.omega2_max == doctest::Approx(15.3925504078).epsilon(1e-9));
}

TEST_CASE("adiabatic gate table rows") {
  const auto g1 = table_adiabatic_gate(1);
  const auto g2 = table_adiabatic_gate(2);
  const auto g3 = table_adiabatic_gate(3);
  for (const auto* g : {&g1, &g2, &g3})
    CHECK(g->adiabatic.omega0 == doctest::Approx(2.0 * pi * 17.0));
  CHECK(g1.adiabatic.delta_over_omega0 == doctest::Approx(-0.5000));
  CHECK(g1.adiabatic.delta_t == doctest::Approx(0.2));
  CHECK(g1.adiabatic.blockade_rad_s == doctest::Approx(2.0 * pi * 600.0e6));
  CHECK(g2.adiabatic.delta_over_omega0 == doctest::Approx(-0.8635));
  CHECK(g2.adiabatic.delta_t == doctest::Approx(0.2165));
  CHECK(g2.adiabatic.blockade_rad_s == doctest::Approx(2.0 * pi * 60.0e6));
  CHECK(g3.adiabatic.delta_over_omega0 == doctest::Approx(-0.3000));
  CHECK(g3.adiabatic.delta_t == doctest::Approx(0.5));
  CHECK(g3.adiabatic.blockade_rad_s == doctest::Approx(2.0 * pi * 4.0e6));
  CHECK_THROWS_AS(table_adiabatic_gate(0), std::invalid_argument);
  CHECK_THROWS_AS(table_adiabatic_gate(4), std::invalid_argument);
}

TEST_CASE("gate parameter validation") {
  GateSpec g = standard_pi_2pi_pi_gate();
  g.pi_2pi_pi.tau1 = 0.2;  // lobes would overlap the central pulse
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = standard_pi_2pi_pi_gate();
  g.pi_2pi_pi.omega2_max = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  GateSpec a = table_adiabatic_gate(1);
  a.adiabatic.delta_t = 0.0;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}
