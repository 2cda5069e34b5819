#pragma once

#include <array>
#include <string>
#include <vector>

namespace atsmem {

struct ExtinctionStage {
  std::string label;
  double decibels = 0.0;
};

struct BeamGeometry {
  double separation_angle = 0.0;  // rad, between probe and control
  double wavelength = 780.241209686e-9;
  bool write_read_copropagating = true;
  std::vector<ExtinctionStage> extinction_chain;

  void validate() const;
};

struct PhaseMatching {
  double delta_k_magnitude = 0.0;  // rad/m
  double grating_period = 0.0;     // m, +inf when there is no grating
  bool output_direction_equals_input = true;
};

// Approximate: probe and control share one wavenumber. Exact: the control is
// red-shifted by the ground splitting.
enum class WavenumberMode { approximate, exact };

double degrees_to_radians(double degrees);

// κ = λ / (2 sin(θ/2)); +inf at θ = 0.
double grating_period(const BeamGeometry& geometry);

PhaseMatching phase_matching(const BeamGeometry& geometry,
                             WavenumberMode mode = WavenumberMode::approximate,
                             double ground_splitting_hz = 0.0);

using Vec3 = std::array<double, 3>;

// k_o = k_i − k_W + k_R
Vec3 output_wavevector(const Vec3& k_i, const Vec3& k_w, const Vec3& k_r);

double total_extinction_db(const BeamGeometry& geometry);

// Control photons that survive the extinction chain into the probe mode.
double leakage_photons(double control_photons, const BeamGeometry& geometry);

}  // namespace atsmem
