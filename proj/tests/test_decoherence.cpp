#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "atsmem/decoherence.hpp"
#include "atsmem/errors.hpp"
#include "atsmem/geometry.hpp"
#include "atsmem/physics.hpp"
#include "doctest.h"

using namespace atsmem;

namespace {
DecoherenceModel motional(double kappa, double temperature = 50e-6) {
  DecoherenceModel m;
  m.delta_k_magnitude = constants::two_pi / kappa;
  m.thermal_speed = thermal_speed(AtomSpecies::rubidium87(), temperature);
  return m;
}

std::vector<LifetimeSample> synthetic(double eta0, double tau, int n = 6) {
  std::vector<LifetimeSample> s;
  for (int i = 0; i < n; ++i) {
    const double t = 250e-9 + i * 1000e-9 / (n - 1);
    s.push_back({t, eta0 * std::exp(-t / tau), std::nullopt});
  }
  return s;
}
}  // namespace

TEST_CASE("motional efficiency lifetime") {
  CHECK(motional_efficiency_lifetime(motional(0.65e-6)) == doctest::Approx(1.5e-6).epsilon(0.01));
  CHECK(motional_efficiency_lifetime(motional(23e-6)) == doctest::Approx(53e-6).epsilon(0.01));
  const auto m = motional(0.65e-6);
  const double t = motional_efficiency_lifetime(m);
  // efficiency = amplitude^2 reaches 1/e
  CHECK(std::pow(motional_retention(m, t), 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(motional_retention(m, 0.0) == 1.0);
}

TEST_CASE("motional retention depends only on dk u t") {
  DecoherenceModel a{2.0e6, 0.05, 0.0}, b{1.0e6, 0.10, 0.0}, c{4.0e6, 0.05, 0.0};
  for (double t : {1e-7, 5e-7, 2e-6}) {
    CHECK(motional_retention(a, t) == doctest::Approx(motional_retention(b, t)).epsilon(1e-14));
    CHECK(motional_retention(c, t) == doctest::Approx(motional_retention(a, 2 * t)).epsilon(1e-14));
  }
}

TEST_CASE("magnetic retention") {
  DecoherenceModel m;
  m.magnetic_lifetime = 490e-9;
  CHECK(std::pow(magnetic_retention(m, 490e-9), 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(magnetic_retention(m, 0.0) == 1.0);
  const double ratio = std::pow(magnetic_retention(m, 1250e-9) / magnetic_retention(m, 250e-9), 2);
  CHECK(ratio == doctest::Approx(0.130).epsilon(0.01));
  CHECK(0.115 * ratio == doctest::Approx(0.015).epsilon(0.01));
}

TEST_CASE("total retention") {
  auto m = motional(0.65e-6);
  m.magnetic_lifetime = 490e-9;
  CHECK(total_retention(m, 300e-9) == doctest::Approx(motional_retention(m, 300e-9) * magnetic_retention(m, 300e-9)));
  CHECK(std::pow(motional_retention(m, 490e-9), 2) > 0.89);
  // motional factor is about 0.95 at 490 ns, the magnetic one exp(-1/2)
  CHECK(motional_retention(m, 490e-9) > magnetic_retention(m, 490e-9));

  DecoherenceModel only_mag;
  only_mag.magnetic_lifetime = 490e-9;
  CHECK(total_retention(only_mag, 700e-9) == magnetic_retention(only_mag, 700e-9));
  auto only_mot = motional(0.65e-6);
  CHECK(total_retention(only_mot, 700e-9) == motional_retention(only_mot, 700e-9));
  for (double t : {0.0, 1e-6, 1.0}) CHECK(total_retention(DecoherenceModel::none(), t) == 1.0);

  double prev = 1.0;
  for (double t = 1e-8; t < 5e-6; t += 1e-7) {
    const double r = total_retention(m, t);
    CHECK(r < prev);
    CHECK(r > 0.0);
    prev = r;
  }
  CHECK(std::isfinite(log_total_retention(m, 1e-3)));
  CHECK_THROWS_AS(total_retention(m, -1e-9), DomainError);
}

TEST_CASE("decoherence model from geometry") {
  BeamGeometry g;
  g.separation_angle = degrees_to_radians(75);
  const auto rb = AtomSpecies::rubidium87();
  const auto m = DecoherenceModel::from(rb, EnsembleParams(10, 50e-6, 2e-3, 650e-9), phase_matching(g));
  CHECK(m.motional_enabled());
  CHECK(m.magnetic_enabled());
  CHECK(m.magnetic_lifetime == 650e-9);
  g.separation_angle = 0;
  CHECK_FALSE(DecoherenceModel::from(rb, EnsembleParams(10, 50e-6), phase_matching(g)).motional_enabled());
}

TEST_CASE("exponential fit recovers noiseless data") {
  const auto s = synthetic(0.2, 490e-9);
  const auto fit = fit_exponential_lifetime(s);
  CHECK(fit.tau == doctest::Approx(490e-9).epsilon(1e-9));
  CHECK(fit.eta0 == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fit.chi2 < 1e-20);
  CHECK(fit.dof == 4);
}

TEST_CASE("exponential fit with 5% noise") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> taus;
  for (int rep = 0; rep < 100; ++rep) {
    auto s = synthetic(0.2, 490e-9);
    for (auto& x : s) {
      x.efficiency *= 1.0 + noise(rng);
      x.sigma = 0.05 * x.efficiency;
    }
    taus.push_back(fit_exponential_lifetime(s).tau);
  }
  std::nth_element(taus.begin(), taus.begin() + 50, taus.end());
  CHECK(std::abs(taus[50] / 490e-9 - 1.0) < 0.05);
}

TEST_CASE("weighted fit standard errors follow the supplied sigmas") {
  auto s = synthetic(0.2, 490e-9);
  for (auto& x : s) x.sigma = 0.05 * x.efficiency;
  const auto a = fit_exponential_lifetime(s);
  for (auto& x : s) x.sigma = 0.10 * x.efficiency;
  const auto b = fit_exponential_lifetime(s);
  CHECK(a.weighted);
  CHECK(b.tau_stderr == doctest::Approx(2.0 * a.tau_stderr).epsilon(1e-9));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_exponential_lifetime(synthetic(0.2, 490e-9, 2)), FitError);
  std::vector<LifetimeSample> same{{1e-7, 0.1, {}}, {1e-7, 0.09, {}}, {1e-7, 0.08, {}}};
  CHECK_THROWS_AS(fit_exponential_lifetime(same), FitError);
  auto bad = synthetic(0.2, 490e-9);
  bad[2].efficiency = 0.0;
  CHECK_THROWS_AS(fit_exponential_lifetime(bad), DomainError);
}

TEST_CASE("two point lifetime of the published endpoints") {
  const double tau = two_point_lifetime({250e-9, 0.115, {}}, {1250e-9, 0.008, {}});
  CHECK(tau == doctest::Approx(1000e-9 / std::log(0.115 / 0.008)).epsilon(1e-12));
  CHECK(tau == doctest::Approx(375e-9).epsilon(0.01));
  CHECK(within_sigma(tau, 490e-9, 60e-9, 2.0));
  CHECK_FALSE(within_sigma(tau, 490e-9, 60e-9, 1.0));
}
