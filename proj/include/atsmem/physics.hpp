#pragma once

#include <numbers>

namespace atsmem {

namespace constants {
// CODATA 2018 exact values.
inline constexpr double boltzmann = 1.380649e-23;       // J/K
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Three-level atom data for the Λ system.
///
/// excited_decay_rate is the amplitude decay rate γ of the optical coherence
/// (rad/s). For the Rb D2 line the default is 2π × 3.03 MHz, i.e. half the
/// population decay rate. The rate is never measured in this setting, so it
/// is a plain input and the efficiency benchmarks are reported as a function
/// of it.
class AtomSpecies {
 public:
  static constexpr double kDefaultDecayRate = constants::two_pi * 3.03e6;

  AtomSpecies(double mass_kg, double transition_wavelength_m, double ground_splitting_hz,
              double excited_decay_rate);

  static AtomSpecies rubidium87(double excited_decay_rate = kDefaultDecayRate);

  double mass() const { return mass_; }
  double transition_wavelength() const { return transition_wavelength_; }
  double ground_splitting() const { return ground_splitting_; }
  double excited_decay_rate() const { return excited_decay_rate_; }

  bool operator==(const AtomSpecies&) const = default;

 private:
  double mass_;
  double transition_wavelength_;
  double ground_splitting_;
  double excited_decay_rate_;
};

/// The atomic cloud. medium_length only scales the spatial axis of dumps; the
/// solver works in normalized z.
class EnsembleParams {
 public:
  EnsembleParams(double optical_depth, double temperature_k, double medium_length_m = 2e-3,
                 double magnetic_lifetime_s = 0.0, double overlap_efficiency = 1.0);

  double optical_depth() const { return optical_depth_; }
  double temperature() const { return temperature_; }
  double medium_length() const { return medium_length_; }
  // 1/e lifetime of the efficiency from ambient-field dephasing; 0 disables.
  double magnetic_lifetime() const { return magnetic_lifetime_; }
  double overlap_efficiency() const { return overlap_efficiency_; }

  EnsembleParams with_optical_depth(double d) const;

  bool operator==(const EnsembleParams&) const = default;

 private:
  double optical_depth_;
  double temperature_;
  double medium_length_;
  double magnetic_lifetime_;
  double overlap_efficiency_;
};

// 1-D Maxwell–Boltzmann r.m.s. speed sqrt(k_B T / m).
double thermal_speed(const AtomSpecies& species, double temperature_k);

}  // namespace atsmem
