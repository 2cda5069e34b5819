#include <cmath>
#include <numbers>
#include <stdexcept>

#include "atsmem/errors.hpp"
#include "atsmem/geometry.hpp"
#include "atsmem/physics.hpp"
#include "atsmem/pulse.hpp"
#include "doctest.h"

using namespace atsmem;

namespace {
// Composite Simpson quadrature over the truncated support.
double simpson(const PulseEnvelope& env, int n = 20000) {
  const double a = env.support_begin(), b = env.support_end();
  const double h = (b - a) / n;
  double s = env(a) + env(b);
  for (int i = 1; i < n; ++i) s += env(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}
}  // namespace

TEST_CASE("square pulse area") {
  const double peak = constants::two_pi / 30e-9;
  const auto env = PulseEnvelope::control(PulseShape::square, 30e-9, 0.0, peak);
  CHECK(pulse_area(env) == doctest::Approx(constants::two_pi).epsilon(1e-12));
}

TEST_CASE("gaussian pulse area matches quadrature") {
  const double peak = 1.7e8, tau = 30e-9;
  const auto env = PulseEnvelope::control(PulseShape::gaussian, tau, 5e-9, peak);
  CHECK(pulse_area(env) == doctest::Approx(peak * tau * 1.06447).epsilon(1e-5));
  CHECK(pulse_area(env) == doctest::Approx(simpson(env)).epsilon(1e-7));
  CHECK(kGaussianAreaFactor == doctest::Approx(std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2))).epsilon(1e-15));
}

TEST_CASE("calibrate_peak_for_area") {
  const double g30 = calibrate_peak_for_area(PulseShape::gaussian, 30e-9, constants::two_pi);
  CHECK(g30 == doctest::Approx(constants::two_pi / (30e-9 * kGaussianAreaFactor)).epsilon(1e-12));
  CHECK(g30 / constants::two_pi == doctest::Approx(31.3e6).epsilon(2e-3));
  CHECK(calibrate_peak_for_area(PulseShape::square, 20e-9, constants::two_pi) ==
        doctest::Approx(constants::two_pi * 50e6).epsilon(1e-12));
  const double g20 = calibrate_peak_for_area(PulseShape::gaussian, 20e-9, constants::two_pi);
  CHECK(g20 / g30 == doctest::Approx(1.5).epsilon(1e-12));

  for (auto shape : {PulseShape::gaussian, PulseShape::square})
    for (double area : {0.3, constants::pi, constants::two_pi}) {
      const double peak = calibrate_peak_for_area(shape, 42e-9, area);
      const auto env = PulseEnvelope::control(shape, 42e-9, 0.0, peak);
      CHECK(std::abs(pulse_area(env) / area - 1.0) < 1e-9);
    }
}

TEST_CASE("pulse area is linear in the peak") {
  const auto env = PulseEnvelope::control(PulseShape::gaussian, 25e-9, 0.0, 1e8);
  for (double c : {0.5, 2.0, 7.25}) CHECK(pulse_area(env.with_peak(c * 1e8)) == doctest::Approx(c * pulse_area(env)).epsilon(1e-15));
}

TEST_CASE("pulse area of a probe envelope is a checked error") {
  const auto probe = PulseEnvelope::probe(PulseShape::gaussian, 30e-9, 0.0);
  CHECK_THROWS_AS(pulse_area(probe), std::invalid_argument);
}

TEST_CASE("probe normalization and width convention") {
  for (auto shape : {PulseShape::gaussian, PulseShape::square}) {
    const auto p = PulseEnvelope::probe(shape, 30e-9, 10e-9);
    const double a = p.support_begin(), b = p.support_end();
    const int n = 200000;
    double e = 0;
    for (int i = 0; i < n; ++i) {
      const double t = a + (i + 0.5) * (b - a) / n;
      e += p(t) * p(t);
    }
    CHECK(e * (b - a) / n == doctest::Approx(1.0).epsilon(1e-4));
  }
  // |E|^2 drops to half at +-fwhm/2.
  const auto p = PulseEnvelope::probe(PulseShape::gaussian, 30e-9, 0.0);
  CHECK(p(15e-9) * p(15e-9) / (p(0) * p(0)) == doctest::Approx(0.5).epsilon(1e-12));
  // Control: Ω itself drops to half.
  const auto c = PulseEnvelope::control(PulseShape::gaussian, 30e-9, 0.0, 1.0);
  CHECK(c(15e-9) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(PulseEnvelope::control_fwhm_from(30e-9, FwhmConvention::intensity) == doctest::Approx(30e-9 * std::sqrt(2.0)));
  CHECK(PulseEnvelope::control_fwhm_from(30e-9, FwhmConvention::amplitude) == doctest::Approx(30e-9));
  CHECK(PulseEnvelope::probe_fwhm_from(30e-9, FwhmConvention::intensity) == doctest::Approx(30e-9));
}

TEST_CASE("envelopes are symmetric and truncated") {
  for (auto shape : {PulseShape::gaussian, PulseShape::square}) {
    const auto c = PulseEnvelope::control(shape, 20e-9, 100e-9, 3.0);
    for (double dt : {1e-9, 7e-9, 15e-9, 40e-9}) CHECK(c(100e-9 + dt) == doctest::Approx(c(100e-9 - dt)).epsilon(1e-12));
    CHECK(c(100e-9 + 5.01 * 20e-9) == 0.0);
  }
  CHECK_THROWS_AS(PulseEnvelope::control(PulseShape::gaussian, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(PulseEnvelope::control(PulseShape::gaussian, 1e-9, 0.0, -1.0), DomainError);
}

TEST_CASE("photons per pulse and leakage budget") {
  const double n = photons_per_pulse(20e-3, 30e-9, 780e-9, PulseShape::gaussian);
  // energy 20 mW * 30 ns * 1.06447 over h c / 780 nm
  const double expected = 20e-3 * 30e-9 * kGaussianAreaFactor / (constants::planck * constants::speed_of_light / 780e-9);
  CHECK(n == doctest::Approx(expected).epsilon(1e-12));
  CHECK(n == doctest::Approx(2.5e9).epsilon(0.02));
  CHECK(photons_per_pulse(0.0, 30e-9, 780e-9, PulseShape::gaussian) == 0.0);
  BeamGeometry g;
  g.extinction_chain = {{"angle", 40.0}, {"fiber", 28.0}};
  const double leaked = leakage_photons(n, g);
  CHECK(leaked > 300.0);
  CHECK(leaked < 450.0);
}

TEST_CASE("control schedule invariants") {
  const double fw = 42e-9;
  CHECK_NOTHROW(ControlSchedule::standard(PulseShape::gaussian, fw, 200e-9));
  // final readout must be 2pi
  CHECK_THROWS_AS(ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {200e-9}, {constants::pi}),
                  ConfigError);
  // centers increasing and after the write
  CHECK_THROWS_AS(ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {300e-9, 200e-9},
                                              {constants::pi, constants::two_pi}),
                  ConfigError);
  CHECK_THROWS_AS(ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {-10e-9},
                                              {constants::two_pi}),
                  ConfigError);
  // area above 2pi
  CHECK_THROWS_AS(ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {200e-9, 400e-9},
                                              {2.5 * constants::pi, constants::two_pi}),
                  ConfigError);
  try {
    ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {300e-9, 200e-9},
                                {2.5 * constants::pi, constants::pi});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 3);
  }

  const auto s = ControlSchedule::from_areas(PulseShape::gaussian, fw, 0.0, constants::two_pi, {200e-9, 350e-9},
                                             {constants::pi, constants::two_pi});
  CHECK(s.centers().size() == 3);
  CHECK(pulse_area(s.readouts()[0].pulse) == doctest::Approx(constants::pi).epsilon(1e-9));
  CHECK(s.rabi(200e-9) == doctest::Approx(s.readouts()[0].pulse.peak_amplitude()).epsilon(1e-9));
  CHECK(s.end_time() == doctest::Approx(350e-9 + 5 * fw));
}

TEST_CASE("parse helpers") {
  CHECK(parse_pulse_shape("gaussian") == PulseShape::gaussian);
  CHECK(parse_pulse_shape("square") == PulseShape::square);
  CHECK_THROWS(parse_pulse_shape("sech"));
  CHECK(parse_fwhm_convention("amplitude") == FwhmConvention::amplitude);
  CHECK(to_string(PulseShape::square) == "square");
}
