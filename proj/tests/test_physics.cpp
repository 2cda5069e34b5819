#include <cmath>
#include <limits>

#include "atsmem/errors.hpp"
#include "atsmem/physics.hpp"
#include "doctest.h"

using namespace atsmem;

TEST_CASE("thermal speed of rubidium at 50 uK") {
  const auto rb = AtomSpecies::rubidium87();
  // sqrt(1.380649e-23 * 50e-6 / 1.443160648e-25)
  const double expected = std::sqrt(1.380649e-23 * 50e-6 / 1.443160648e-25);
  CHECK(thermal_speed(rb, 50e-6) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(thermal_speed(rb, 50e-6) == doctest::Approx(0.0692).epsilon(2e-3));
}

TEST_CASE("thermal speed limits and scaling") {
  const auto rb = AtomSpecies::rubidium87();
  CHECK(thermal_speed(rb, 0.0) == 0.0);
  const AtomSpecies heavy(4.0 * rb.mass(), rb.transition_wavelength(), rb.ground_splitting(),
                          rb.excited_decay_rate());
  CHECK(thermal_speed(heavy, 50e-6) == doctest::Approx(0.5 * thermal_speed(rb, 50e-6)).epsilon(1e-12));
  for (double t : {1e-6, 50e-6, 3e-3})
    CHECK(std::abs(thermal_speed(rb, 4 * t) / thermal_speed(rb, t) - 2.0) < 1e-12);
  CHECK_THROWS_AS(thermal_speed(rb, -1e-6), DomainError);
}

TEST_CASE("species and ensemble validation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(AtomSpecies(nan, 780e-9, 6.8e9, 1e7), DomainError);
  CHECK_THROWS_AS(AtomSpecies(1e-25, inf, 6.8e9, 1e7), DomainError);
  CHECK_THROWS_AS(AtomSpecies(1e-25, 780e-9, 0.0, 1e7), DomainError);
  CHECK_THROWS_AS(AtomSpecies(1e-25, 50e-9, 6.8e9, 1e7), DomainError);
  CHECK_THROWS_AS(AtomSpecies(1e-25, 780e-9, 6.8e9, -1.0), DomainError);

  CHECK_NOTHROW(EnsembleParams(0.0, 0.0));
  CHECK_THROWS_AS(EnsembleParams(-1.0, 50e-6), DomainError);
  CHECK_THROWS_AS(EnsembleParams(10.0, -1.0), DomainError);
  CHECK_THROWS_AS(EnsembleParams(10.0, 50e-6, 2e-3, 0.0, 1.5), DomainError);
  CHECK_THROWS_AS(EnsembleParams(nan, 50e-6), DomainError);
  CHECK_THROWS_AS(EnsembleParams(10.0, 50e-6, 2e-3, inf), DomainError);

  const EnsembleParams e(10.0, 50e-6, 2e-3, 490e-9, 0.5);
  const auto e2 = e.with_optical_depth(4.0);
  CHECK(e2.optical_depth() == 4.0);
  CHECK(e2.magnetic_lifetime() == e.magnetic_lifetime());
  CHECK(e2.overlap_efficiency() == 0.5);
}

TEST_CASE("rubidium defaults") {
  const auto rb = AtomSpecies::rubidium87();
  CHECK(rb.ground_splitting() == doctest::Approx(6.83e9).epsilon(1e-3));
  CHECK(rb.transition_wavelength() == doctest::Approx(780e-9).epsilon(1e-3));
  CHECK(rb.excited_decay_rate() == doctest::Approx(constants::two_pi * 3.03e6));
}
