#include "atsmem/decoherence.hpp"

#include <cmath>
#include <limits>

#include "atsmem/errors.hpp"
#include "atsmem/geometry.hpp"
#include "atsmem/physics.hpp"

namespace atsmem {

DecoherenceModel DecoherenceModel::from(const AtomSpecies& species, const EnsembleParams& ensemble,
                                        const PhaseMatching& phase_matching) {
  DecoherenceModel m;
  m.delta_k_magnitude = phase_matching.delta_k_magnitude;
  m.thermal_speed = atsmem::thermal_speed(species, ensemble.temperature());
  m.magnetic_lifetime = ensemble.magnetic_lifetime();
  return m;
}

void DecoherenceModel::validate() const {
  require_finite(delta_k_magnitude, "delta_k_magnitude");
  require_finite(thermal_speed, "thermal_speed");
  require_finite(magnetic_lifetime, "magnetic_lifetime");
  if (delta_k_magnitude < 0.0 || thermal_speed < 0.0 || magnetic_lifetime < 0.0)
    throw DomainError("decoherence parameters must be >= 0");
}

DecoherenceModel DecoherenceModel::time_scaled(double factor) const {
  DecoherenceModel m = *this;
  m.thermal_speed /= factor;
  m.magnetic_lifetime *= factor;
  return m;
}

namespace {
void check_time(double t) {
  require_finite(t, "t");
  if (t < 0.0) throw DomainError("storage time must be >= 0");
}

double log_motional(const DecoherenceModel& m, double t) {
  if (!m.motional_enabled()) return 0.0;
  const double x = m.delta_k_magnitude * m.thermal_speed * t;
  return -0.5 * x * x;
}

double log_magnetic(const DecoherenceModel& m, double t) {
  if (!m.magnetic_enabled()) return 0.0;
  return -t / (2.0 * m.magnetic_lifetime);
}
}  // namespace

double motional_retention(const DecoherenceModel& model, double t) {
  check_time(t);
  return std::exp(log_motional(model, t));
}

double magnetic_retention(const DecoherenceModel& model, double t) {
  check_time(t);
  return std::exp(log_magnetic(model, t));
}

double total_retention(const DecoherenceModel& model, double t) {
  return std::exp(log_total_retention(model, t));
}

double log_total_retention(const DecoherenceModel& model, double t) {
  check_time(t);
  return log_motional(model, t) + log_magnetic(model, t);
}

double motional_efficiency_lifetime(const DecoherenceModel& model) {
  if (!model.motional_enabled()) return std::numeric_limits<double>::infinity();
  return 1.0 / (model.delta_k_magnitude * model.thermal_speed);
}

bool within_sigma(double value, double reference, double sigma, double k) {
  return std::abs(value - reference) <= k * sigma;
}

}  // namespace atsmem
