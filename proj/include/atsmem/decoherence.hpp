#pragma once

#include <optional>
#include <span>

namespace atsmem {

class AtomSpecies;
class EnsembleParams;
struct PhaseMatching;

/// Spin-wave dephasing during storage.
///
/// Two independent channels act on the stored amplitude:
///  - motional: ballistic thermal motion across the phase grating,
///    amplitude exp(-(|Δk| u t)² / 2), so the efficiency 1/e time is 1/(|Δk| u);
///  - magnetic: ambient-field dephasing, amplitude exp(-t / (2 τ_B)), so the
///    efficiency decays as exp(-t/τ_B).
/// delta_k_magnitude = 0 or thermal_speed = 0 disables the first channel,
/// magnetic_lifetime = 0 the second.
struct DecoherenceModel {
  double delta_k_magnitude = 0.0;  // rad/m
  double thermal_speed = 0.0;      // m/s
  double magnetic_lifetime = 0.0;  // s

  static DecoherenceModel none() { return {}; }
  static DecoherenceModel from(const AtomSpecies& species, const EnsembleParams& ensemble,
                               const PhaseMatching& phase_matching);

  void validate() const;
  bool motional_enabled() const { return delta_k_magnitude > 0.0 && thermal_speed > 0.0; }
  bool magnetic_enabled() const { return magnetic_lifetime > 0.0; }
  DecoherenceModel time_scaled(double factor) const;
};

double motional_retention(const DecoherenceModel& model, double t);
double magnetic_retention(const DecoherenceModel& model, double t);
double total_retention(const DecoherenceModel& model, double t);
// log of total_retention; finite where the factor itself underflows.
double log_total_retention(const DecoherenceModel& model, double t);

// 1/e time of the efficiency for the motional channel alone, 1/(|Δk| u).
double motional_efficiency_lifetime(const DecoherenceModel& model);

struct LifetimeSample {
  double time = 0.0;
  double efficiency = 0.0;
  std::optional<double> sigma;  // absolute uncertainty of efficiency
};

struct LifetimeFit {
  double eta0 = 0.0;
  double tau = 0.0;
  double eta0_stderr = 0.0;
  double tau_stderr = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  bool weighted = false;
};

// Least-squares fit of η₀ exp(-t/τ) on log-transformed efficiencies. Uses
// inverse-variance weights when every sample carries a sigma.
LifetimeFit fit_exponential_lifetime(std::span<const LifetimeSample> samples);

// Lifetime implied by two samples alone: (t2 - t1) / ln(η1/η2).
double two_point_lifetime(const LifetimeSample& a, const LifetimeSample& b);

// |value - reference| <= k * sigma
bool within_sigma(double value, double reference, double sigma, double k);

}  // namespace atsmem
