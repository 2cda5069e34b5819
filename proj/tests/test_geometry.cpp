#include <cmath>
#include <limits>

#include "atsmem/errors.hpp"
#include "atsmem/geometry.hpp"
#include "atsmem/physics.hpp"
#include "doctest.h"

using namespace atsmem;

namespace {
BeamGeometry at(double degrees, double wavelength = 780e-9) {
  BeamGeometry g;
  g.separation_angle = degrees_to_radians(degrees);
  g.wavelength = wavelength;
  return g;
}
}  // namespace

TEST_CASE("grating period examples") {
  CHECK(grating_period(at(2)) == doctest::Approx(22.3e-6).epsilon(2e-3));
  CHECK(grating_period(at(75)) == doctest::Approx(0.64e-6).epsilon(5e-3));
  CHECK(grating_period(at(180)) == doctest::Approx(390e-9).epsilon(1e-12));
  CHECK(std::isinf(grating_period(at(0))));
}

TEST_CASE("grating period identities") {
  double previous = std::numeric_limits<double>::infinity();
  for (double deg = 0.5; deg <= 180.0; deg += 0.5) {
    const auto g = at(deg);
    const double k = grating_period(g);
    CHECK(k < previous);
    previous = k;
    CHECK(std::abs(k * 2.0 * std::sin(g.separation_angle / 2.0) / g.wavelength - 1.0) < 1e-12);
    const auto pm = phase_matching(g);
    CHECK(pm.grating_period * pm.delta_k_magnitude == doctest::Approx(constants::two_pi).epsilon(1e-14));
  }
}

TEST_CASE("exact wavenumber mode differs below the 1e-4 level") {
  const auto rb = AtomSpecies::rubidium87();
  for (double deg : {2.0, 75.0}) {
    const auto approx = phase_matching(at(deg), WavenumberMode::approximate);
    const auto exact = phase_matching(at(deg), WavenumberMode::exact, rb.ground_splitting());
    CHECK(std::abs(exact.grating_period / approx.grating_period - 1.0) < 1e-3);
  }
  // Collinear beams still leave the tiny wavenumber mismatch in exact mode.
  const auto collinear = phase_matching(at(0), WavenumberMode::exact, rb.ground_splitting());
  CHECK(collinear.delta_k_magnitude > 0.0);
  // c / 6.83 GHz, about 4.4 cm
  CHECK(collinear.grating_period == doctest::Approx(299792458.0 / rb.ground_splitting()).epsilon(1e-3));
}

TEST_CASE("output wavevector") {
  const Vec3 ki{1, 2, 3}, kw{4, 5, 6};
  CHECK(output_wavevector(ki, kw, kw) == ki);
  const Vec3 kr{-4, -5, -6};
  const Vec3 expect{1 - 8, 2 - 10, 3 - 12};
  CHECK(output_wavevector(ki, kw, kr) == expect);
  CHECK(output_wavevector({0, 0, 0}, {0, 0, 0}, {0, 0, 0}) == Vec3{0, 0, 0});
  // linear in each argument
  const Vec3 a = output_wavevector({2, 4, 6}, kw, kw);
  CHECK(a == Vec3{2, 4, 6});
}

TEST_CASE("leakage through the extinction chain") {
  BeamGeometry g = at(2);
  CHECK(leakage_photons(2.5e9, g) == doctest::Approx(2.5e9));
  g.extinction_chain = {{"angle", 40}, {"fiber", 28}};
  CHECK(total_extinction_db(g) == doctest::Approx(68));
  CHECK(leakage_photons(2.5e9, g) == doctest::Approx(2.5e9 * std::pow(10.0, -6.8)).epsilon(1e-12));
  CHECK(leakage_photons(2.5e9, g) == doctest::Approx(400).epsilon(0.01));
  g.extinction_chain.push_back({"wide angle", 40});
  CHECK(leakage_photons(2.5e9, g) == doctest::Approx(0.04).epsilon(0.01));

  // concatenation composes multiplicatively
  BeamGeometry a = at(2), b = at(2), ab = at(2);
  a.extinction_chain = {{"x", 13}};
  b.extinction_chain = {{"y", 21.5}};
  ab.extinction_chain = {{"x", 13}, {"y", 21.5}};
  CHECK(leakage_photons(leakage_photons(1e6, a), b) == doctest::Approx(leakage_photons(1e6, ab)).epsilon(1e-12));
}

TEST_CASE("geometry validation") {
  BeamGeometry g = at(2);
  g.extinction_chain = {{"bad", -3}};
  CHECK_THROWS(g.validate());
  CHECK_THROWS(at(190).validate());
  CHECK_THROWS(leakage_photons(-1.0, at(2)));
}
