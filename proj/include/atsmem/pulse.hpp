#pragma once

#include <string_view>
#include <vector>

namespace atsmem {

enum class PulseShape { gaussian, square };
enum class PulseRole { probe, control };

// Which profile a quoted FWHM refers to. A quoted "30 ns pulse" is read as
// the intensity FWHM by default.
enum class FwhmConvention { intensity, amplitude };

PulseShape parse_pulse_shape(std::string_view name);
FwhmConvention parse_fwhm_convention(std::string_view name);
std::string_view to_string(PulseShape shape);
std::string_view to_string(FwhmConvention convention);

// ∫exp(-4 ln2 t²/τ²) dt / τ = sqrt(π / (4 ln 2)).
inline constexpr double kGaussianAreaFactor = 1.0644670194312262;
// Envelopes vanish beyond this many FWHM from the center.
inline constexpr double kTruncationFwhm = 5.0;

/// Time-domain envelope of either the probe or a control pulse.
///
/// Control: value(t) is the Rabi frequency Ω(t) in rad/s and fwhm is the FWHM
/// of Ω(t). Probe: value(t) is the field amplitude in sqrt(photon flux) units,
/// normalized so that ∫|E|² dt = 1, and fwhm is the FWHM of |E(t)|².
class PulseEnvelope {
 public:
  static PulseEnvelope probe(PulseShape shape, double fwhm, double center_time);
  static PulseEnvelope control(PulseShape shape, double fwhm, double center_time,
                               double peak_rabi);

  // Convert a quoted duration into the canonical fwhm of each role.
  static double probe_fwhm_from(double quoted, FwhmConvention convention);
  static double control_fwhm_from(double quoted, FwhmConvention convention);

  double operator()(double t) const;

  PulseRole role() const { return role_; }
  PulseShape shape() const { return shape_; }
  double fwhm() const { return fwhm_; }
  double center_time() const { return center_; }
  double peak_amplitude() const { return peak_; }
  double support_begin() const { return center_ - kTruncationFwhm * fwhm_; }
  double support_end() const { return center_ + kTruncationFwhm * fwhm_; }

  PulseEnvelope with_peak(double peak_rabi) const;
  PulseEnvelope shifted_to(double center_time) const;
  PulseEnvelope time_scaled(double factor) const;

  bool operator==(const PulseEnvelope&) const = default;

 private:
  PulseEnvelope(PulseRole role, PulseShape shape, double fwhm, double center, double peak);

  PulseRole role_;
  PulseShape shape_;
  double fwhm_;
  double center_;
  double peak_;
};

// ∫Ω(t) dt of a control envelope. Throws std::invalid_argument for a probe.
double pulse_area(const PulseEnvelope& env);

// Peak Rabi frequency giving the requested area.
double calibrate_peak_for_area(PulseShape shape, double fwhm, double target_area);

// Mean photon number of a pulse with the given peak power; fwhm refers to the
// power profile.
double photons_per_pulse(double peak_power_w, double fwhm, double wavelength_m, PulseShape shape);

struct Readout {
  PulseEnvelope pulse;
  double target_area;
};

/// One write pulse followed by one or more readouts. The last readout is
/// always a full 2π pulse that empties the memory.
class ControlSchedule {
 public:
  ControlSchedule(PulseEnvelope write, std::vector<Readout> readouts);

  // Calibrated gaussian/square schedule from pulse areas (rad).
  static ControlSchedule from_areas(PulseShape shape, double fwhm, double write_center,
                                    double write_area, const std::vector<double>& readout_centers,
                                    const std::vector<double>& readout_areas);

  // 2π write at t = 0 and a single 2π readout after storage_time.
  static ControlSchedule standard(PulseShape shape, double fwhm, double storage_time);

  const PulseEnvelope& write() const { return write_; }
  const std::vector<Readout>& readouts() const { return readouts_; }

  // Sum of all pulse envelopes.
  double rabi(double t) const;
  double peak_rabi() const;
  // Write center followed by every readout center.
  std::vector<double> centers() const;
  double end_time() const;

  // Multiplies every peak by factor, leaving target areas as labels.
  ControlSchedule amplitude_scaled(double factor) const;
  ControlSchedule time_scaled(double factor) const;

 private:
  PulseEnvelope write_;
  std::vector<Readout> readouts_;
};

}  // namespace atsmem
