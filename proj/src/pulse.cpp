#include "atsmem/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "atsmem/errors.hpp"
#include "atsmem/physics.hpp"

namespace atsmem {

namespace {
constexpr double kLn2 = std::numbers::ln2;
constexpr double kAreaTolerance = 1e-9;
}  // namespace

PulseShape parse_pulse_shape(std::string_view name) {
  if (name == "gaussian") return PulseShape::gaussian;
  if (name == "square") return PulseShape::square;
  throw ConfigError("unknown pulse shape '" + std::string(name) + "'");
}

FwhmConvention parse_fwhm_convention(std::string_view name) {
  if (name == "intensity") return FwhmConvention::intensity;
  if (name == "amplitude") return FwhmConvention::amplitude;
  throw ConfigError("unknown fwhm convention '" + std::string(name) + "'");
}

std::string_view to_string(PulseShape shape) {
  return shape == PulseShape::gaussian ? "gaussian" : "square";
}

std::string_view to_string(FwhmConvention convention) {
  return convention == FwhmConvention::intensity ? "intensity" : "amplitude";
}

PulseEnvelope::PulseEnvelope(PulseRole role, PulseShape shape, double fwhm, double center,
                             double peak)
    : role_(role), shape_(shape), fwhm_(fwhm), center_(center), peak_(peak) {
  require_finite(fwhm, "fwhm");
  require_finite(center, "center_time");
  require_finite(peak, "peak_amplitude");
  if (fwhm <= 0.0) throw DomainError("fwhm must be > 0");
  if (peak < 0.0) throw DomainError("peak_amplitude must be >= 0");
}

PulseEnvelope PulseEnvelope::probe(PulseShape shape, double fwhm, double center_time) {
  require_finite(fwhm, "fwhm");
  if (fwhm <= 0.0) throw DomainError("fwhm must be > 0");
  const double energy_per_peak2 =
      shape == PulseShape::gaussian ? fwhm * kGaussianAreaFactor : fwhm;
  return PulseEnvelope(PulseRole::probe, shape, fwhm, center_time,
                       1.0 / std::sqrt(energy_per_peak2));
}

PulseEnvelope PulseEnvelope::control(PulseShape shape, double fwhm, double center_time,
                                     double peak_rabi) {
  return PulseEnvelope(PulseRole::control, shape, fwhm, center_time, peak_rabi);
}

double PulseEnvelope::probe_fwhm_from(double quoted, FwhmConvention convention) {
  // |E|² of a gaussian amplitude with FWHM τ has FWHM τ/√2.
  return convention == FwhmConvention::intensity ? quoted : quoted / std::numbers::sqrt2;
}

double PulseEnvelope::control_fwhm_from(double quoted, FwhmConvention convention) {
  // Ω ∝ sqrt(intensity), so an intensity FWHM τ means a Rabi FWHM √2 τ.
  return convention == FwhmConvention::intensity ? quoted * std::numbers::sqrt2 : quoted;
}

double PulseEnvelope::operator()(double t) const {
  const double x = t - center_;
  if (std::abs(x) > kTruncationFwhm * fwhm_) return 0.0;
  if (shape_ == PulseShape::square) return std::abs(x) <= 0.5 * fwhm_ ? peak_ : 0.0;
  // Probe amplitude: |E|² has the FWHM, so the exponent is halved.
  const double k = role_ == PulseRole::probe ? 2.0 * kLn2 : 4.0 * kLn2;
  return peak_ * std::exp(-k * x * x / (fwhm_ * fwhm_));
}

PulseEnvelope PulseEnvelope::with_peak(double peak_rabi) const {
  if (role_ != PulseRole::control) throw std::invalid_argument("with_peak on a probe envelope");
  return PulseEnvelope(role_, shape_, fwhm_, center_, peak_rabi);
}

PulseEnvelope PulseEnvelope::shifted_to(double center_time) const {
  return PulseEnvelope(role_, shape_, fwhm_, center_time, peak_);
}

PulseEnvelope PulseEnvelope::time_scaled(double factor) const {
  if (role_ == PulseRole::probe) return probe(shape_, fwhm_ * factor, center_ * factor);
  return PulseEnvelope(role_, shape_, fwhm_ * factor, center_ * factor, peak_ / factor);
}

double pulse_area(const PulseEnvelope& env) {
  if (env.role() != PulseRole::control)
    throw std::invalid_argument("pulse_area is defined for control envelopes only");
  const double width =
      env.shape() == PulseShape::gaussian ? env.fwhm() * kGaussianAreaFactor : env.fwhm();
  return env.peak_amplitude() * width;
}

double calibrate_peak_for_area(PulseShape shape, double fwhm, double target_area) {
  require_finite(fwhm, "fwhm");
  require_finite(target_area, "target_area");
  if (fwhm <= 0.0 || target_area <= 0.0)
    throw DomainError("calibrate_peak_for_area needs fwhm > 0 and target > 0");
  const double width = shape == PulseShape::gaussian ? fwhm * kGaussianAreaFactor : fwhm;
  return target_area / width;
}

double photons_per_pulse(double peak_power_w, double fwhm, double wavelength_m, PulseShape shape) {
  require_finite(peak_power_w, "peak_power");
  if (peak_power_w < 0.0 || fwhm <= 0.0 || wavelength_m <= 0.0)
    throw DomainError("photons_per_pulse needs non-negative power and positive fwhm, wavelength");
  const double width = shape == PulseShape::gaussian ? fwhm * kGaussianAreaFactor : fwhm;
  const double photon_energy = constants::planck * constants::speed_of_light / wavelength_m;
  return peak_power_w * width / photon_energy;
}

ControlSchedule::ControlSchedule(PulseEnvelope write, std::vector<Readout> readouts)
    : write_(std::move(write)), readouts_(std::move(readouts)) {
  std::vector<std::string> issues;
  if (write_.role() != PulseRole::control) issues.push_back("write pulse must be a control envelope");
  if (readouts_.empty()) issues.push_back("schedule needs at least one readout");
  double previous = write_.center_time();
  for (std::size_t i = 0; i < readouts_.size(); ++i) {
    const auto& r = readouts_[i];
    const std::string tag = "readout[" + std::to_string(i) + "]";
    if (r.pulse.role() != PulseRole::control) issues.push_back(tag + " must be a control envelope");
    if (!(r.pulse.center_time() > previous))
      issues.push_back(tag + " center must be later than the previous pulse");
    previous = r.pulse.center_time();
    if (!(r.target_area > 0.0) || r.target_area > constants::two_pi * (1.0 + kAreaTolerance))
      issues.push_back(tag + " target_area must lie in (0, 2pi]");
  }
  if (!readouts_.empty() &&
      std::abs(readouts_.back().target_area - constants::two_pi) > constants::two_pi * kAreaTolerance)
    issues.push_back("final readout target_area must be 2pi");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ControlSchedule ControlSchedule::from_areas(PulseShape shape, double fwhm, double write_center,
                                            double write_area,
                                            const std::vector<double>& readout_centers,
                                            const std::vector<double>& readout_areas) {
  if (readout_centers.size() != readout_areas.size())
    throw ConfigError("readout centers and areas differ in length");
  auto write = PulseEnvelope::control(shape, fwhm, write_center,
                                      calibrate_peak_for_area(shape, fwhm, write_area));
  std::vector<Readout> readouts;
  for (std::size_t i = 0; i < readout_centers.size(); ++i) {
    auto pulse = PulseEnvelope::control(shape, fwhm, readout_centers[i],
                                        calibrate_peak_for_area(shape, fwhm, readout_areas[i]));
    readouts.push_back({pulse, readout_areas[i]});
  }
  return ControlSchedule(write, std::move(readouts));
}

ControlSchedule ControlSchedule::standard(PulseShape shape, double fwhm, double storage_time) {
  return from_areas(shape, fwhm, 0.0, constants::two_pi, {storage_time}, {constants::two_pi});
}

double ControlSchedule::rabi(double t) const {
  double sum = write_(t);
  for (const auto& r : readouts_) sum += r.pulse(t);
  return sum;
}

double ControlSchedule::peak_rabi() const {
  double peak = write_.peak_amplitude();
  for (const auto& r : readouts_) peak = std::max(peak, r.pulse.peak_amplitude());
  return peak;
}

std::vector<double> ControlSchedule::centers() const {
  std::vector<double> c{write_.center_time()};
  for (const auto& r : readouts_) c.push_back(r.pulse.center_time());
  return c;
}

double ControlSchedule::end_time() const { return readouts_.back().pulse.support_end(); }

ControlSchedule ControlSchedule::amplitude_scaled(double factor) const {
  std::vector<Readout> rs;
  for (const auto& r : readouts_)
    rs.push_back({r.pulse.with_peak(r.pulse.peak_amplitude() * factor), r.target_area});
  return ControlSchedule(write_.with_peak(write_.peak_amplitude() * factor), std::move(rs));
}

ControlSchedule ControlSchedule::time_scaled(double factor) const {
  std::vector<Readout> rs;
  for (const auto& r : readouts_) rs.push_back({r.pulse.time_scaled(factor), r.target_area});
  return ControlSchedule(write_.time_scaled(factor), std::move(rs));
}

}  // namespace atsmem
