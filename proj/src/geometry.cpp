#include "atsmem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "atsmem/errors.hpp"
#include "atsmem/physics.hpp"

namespace atsmem {

void BeamGeometry::validate() const {
  require_finite(separation_angle, "separation_angle");
  require_finite(wavelength, "wavelength");
  if (separation_angle < 0.0 || separation_angle > constants::pi)
    throw DomainError("separation_angle must lie in [0, pi]");
  if (wavelength <= 0.0) throw DomainError("wavelength must be > 0");
  for (const auto& stage : extinction_chain) {
    require_finite(stage.decibels, "extinction dB");
    if (stage.decibels < 0.0)
      throw DomainError("extinction stage '" + stage.label + "' has negative dB");
  }
}

double degrees_to_radians(double degrees) { return degrees * constants::pi / 180.0; }

double grating_period(const BeamGeometry& geometry) {
  geometry.validate();
  const double s = std::sin(0.5 * geometry.separation_angle);
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return geometry.wavelength / (2.0 * s);
}

PhaseMatching phase_matching(const BeamGeometry& geometry, WavenumberMode mode,
                             double ground_splitting_hz) {
  geometry.validate();
  PhaseMatching pm;
  const double k_probe = constants::two_pi / geometry.wavelength;
  if (mode == WavenumberMode::approximate) {
    pm.delta_k_magnitude = 2.0 * k_probe * std::sin(0.5 * geometry.separation_angle);
  } else {
    // The control drives |s> -> |e>, the upper ground level, so it sits one
    // ground splitting below the probe frequency.
    const double nu_probe = constants::speed_of_light / geometry.wavelength;
    const double k_control = k_probe * (1.0 - ground_splitting_hz / nu_probe);
    const double c = std::cos(geometry.separation_angle);
    pm.delta_k_magnitude =
        std::sqrt(std::max(0.0, k_probe * k_probe + k_control * k_control - 2.0 * k_probe * k_control * c));
  }
  pm.grating_period = pm.delta_k_magnitude > 0.0 ? constants::two_pi / pm.delta_k_magnitude
                                                 : std::numeric_limits<double>::infinity();
  pm.output_direction_equals_input = geometry.write_read_copropagating;
  return pm;
}

Vec3 output_wavevector(const Vec3& k_i, const Vec3& k_w, const Vec3& k_r) {
  Vec3 k_o{};
  for (std::size_t a = 0; a < 3; ++a) k_o[a] = k_i[a] - k_w[a] + k_r[a];
  return k_o;
}

double total_extinction_db(const BeamGeometry& geometry) {
  double sum = 0.0;
  for (const auto& stage : geometry.extinction_chain) sum += stage.decibels;
  return sum;
}

double leakage_photons(double control_photons, const BeamGeometry& geometry) {
  require_finite(control_photons, "control_photons");
  if (control_photons < 0.0) throw DomainError("control_photons must be >= 0");
  geometry.validate();
  return control_photons * std::pow(10.0, -total_extinction_db(geometry) / 10.0);
}

}  // namespace atsmem
