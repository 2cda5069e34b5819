#include "atsmem/physics.hpp"

#include <cmath>
#include <sstream>

#include "atsmem/errors.hpp"

namespace atsmem {

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::invalid_argument([&] {
        std::ostringstream os;
        os << issues.size() << " validation error(s)";
        for (const auto& i : issues) os << "\n  - " << i;
        return os.str();
      }()),
      issues_(std::move(issues)) {}

NumericalError::NumericalError(const std::string& what, StepRecord record)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << what << " (step " << record.step << ", t = " << record.time
           << " s, |E|^2 = " << record.field_norm << ", |P|^2 = " << record.optical_norm
           << ", |S|^2 = " << record.spin_norm << ")";
        return os.str();
      }()),
      record_(record) {}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw DomainError(std::string(name) + " must be finite");
}

namespace {
void require_positive(double value, const char* name) {
  require_finite(value, name);
  if (value <= 0.0) throw DomainError(std::string(name) + " must be > 0");
}
}  // namespace

AtomSpecies::AtomSpecies(double mass_kg, double transition_wavelength_m,
                         double ground_splitting_hz, double excited_decay_rate)
    : mass_(mass_kg),
      transition_wavelength_(transition_wavelength_m),
      ground_splitting_(ground_splitting_hz),
      excited_decay_rate_(excited_decay_rate) {
  require_positive(mass_, "mass");
  require_positive(transition_wavelength_, "transition_wavelength");
  require_positive(ground_splitting_, "ground_splitting");
  require_positive(excited_decay_rate_, "excited_decay_rate");
  if (transition_wavelength_ <= 100e-9 || transition_wavelength_ >= 10e-6)
    throw DomainError("transition_wavelength outside (100 nm, 10 um)");
}

AtomSpecies AtomSpecies::rubidium87(double excited_decay_rate) {
  return AtomSpecies(1.443160648e-25, 780.241209686e-9, 6.834682610904e9, excited_decay_rate);
}

EnsembleParams::EnsembleParams(double optical_depth, double temperature_k,
                               double medium_length_m, double magnetic_lifetime_s,
                               double overlap_efficiency)
    : optical_depth_(optical_depth),
      temperature_(temperature_k),
      medium_length_(medium_length_m),
      magnetic_lifetime_(magnetic_lifetime_s),
      overlap_efficiency_(overlap_efficiency) {
  require_finite(optical_depth_, "optical_depth");
  require_finite(temperature_, "temperature");
  require_positive(medium_length_, "medium_length");
  require_finite(magnetic_lifetime_, "magnetic_lifetime");
  require_finite(overlap_efficiency_, "overlap_efficiency");
  if (optical_depth_ < 0.0) throw DomainError("optical_depth must be >= 0");
  if (temperature_ < 0.0) throw DomainError("temperature must be >= 0");
  if (magnetic_lifetime_ < 0.0) throw DomainError("magnetic_lifetime must be >= 0");
  if (overlap_efficiency_ < 0.0 || overlap_efficiency_ > 1.0)
    throw DomainError("overlap_efficiency must lie in [0, 1]");
}

EnsembleParams EnsembleParams::with_optical_depth(double d) const {
  return EnsembleParams(d, temperature_, medium_length_, magnetic_lifetime_, overlap_efficiency_);
}

double thermal_speed(const AtomSpecies& species, double temperature_k) {
  require_finite(temperature_k, "temperature");
  if (temperature_k < 0.0) throw DomainError("temperature must be >= 0");
  return std::sqrt(constants::boltzmann * temperature_k / species.mass());
}

}  // namespace atsmem
