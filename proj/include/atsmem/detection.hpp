#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "atsmem/solver.hpp"

namespace atsmem {

/// Everything between the memory output and the time tagger.
///
/// Leakage values are expected detected counts per trial for a 2π pulse; a
/// pulse of area A leaks (A/2π)² of that. The leakage bumps are gaussian in
/// time, centered leakage_time_offset from each control pulse.
struct DetectorModel {
  double downstream_transmission = 0.1;  // η_t, includes detector efficiency
  double dark_ambient_rate = 0.0;        // counts/s
  double leakage_write = 0.0;
  double leakage_read = 0.0;
  // Extra leakage observed only with atoms present.
  double atom_leakage_write = 0.0;
  double atom_leakage_read = 0.0;
  double leakage_time_offset = -24e-9;
  double leakage_spread_fwhm = 30e-9;

  void validate() const;
  // Calibrated to the published single-photon noise counts, see
  // calibrate_detector.
  static DetectorModel calibrated_default();
};

struct TrialConfig {
  std::uint64_t n_trials = 100000;
  double mean_photons_in = 1.0;
  double bin_width = 1e-9;
  double analysis_window = 50e-9;
  std::uint64_t rng_seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct SourceSelection {
  bool probe = true;
  bool atoms = true;
  bool control = true;
};

struct DetectionHistogram {
  std::vector<double> bin_edges;  // s, size = counts.size() + 1
  std::vector<std::uint64_t> counts;
  std::uint64_t n_trials = 0;

  std::uint64_t total() const;
  double bin_width() const { return bin_edges[1] - bin_edges[0]; }
  // Counts in bins whose centers lie in [center - window/2, center + window/2).
  std::uint64_t counts_in(double center, double window) const;
};

// Uniform bins of width bin_width aligned to multiples of bin_width and
// covering [t_begin, t_end].
DetectionHistogram empty_histogram(double t_begin, double t_end, double bin_width, std::uint64_t n_trials);

// Expected detection rate per trial (1/s) at each sample of sim.time.
std::vector<double> detection_rate(const SimulationResult& sim, const DetectorModel& detector,
                                   double mean_photons_in, const SourceSelection& sources);

// Monte Carlo over config.n_trials independent trials. Each trial draws a
// Poisson number of clicks from the summed rate profile and places them by
// inverse-CDF sampling; trial i uses a stream seeded from (rng_seed, i), so the
// histogram does not depend on config.threads.
DetectionHistogram run_trials(const SimulationResult& sim, const DetectorModel& detector,
                              const TrialConfig& config, bool include_probe, bool include_atoms,
                              bool include_control);

struct ProbabilityEstimate {
  double p = 0.0;
  double standard_error = 0.0;
  // One-sided 95 % upper bound; equals p + 2 stderr except for empty windows.
  double upper_95 = 0.0;
  std::uint64_t counts = 0;
};

ProbabilityEstimate estimate_probabilities(const DetectionHistogram& h, double window_center, double window);

// p_n = N₃ / (N η_t)
double unconditional_noise_probability(double n3_counts, double n_trials, double eta_t);

struct TrialStatistics {
  double p_s = 0.0;
  double p_n = 0.0;
  double p_s_err = 0.0;
  double p_n_err = 0.0;
  double snr = 0.0;
  double snr_err = 0.0;
  std::optional<double> fidelity;
  double fidelity_err = 0.0;
  bool infinite_snr = false;
  bool below_noise = false;  // p_s < p_n
};

// SNR = (p_s - p_n)/p_n and F = 1 - 1/SNR (reported for SNR >= 1).
TrialStatistics snr_and_fidelity(double p_s, double p_n, double p_s_err = 0.0, double p_n_err = 0.0);

struct CountWithError {
  double counts = 0.0;
  double error = 0.0;
};

struct NoiseBudget {
  CountWithError n1, n2, n3;
  // Per-peak counts in windows centered on each leakage peak.
  CountWithError n2_write, n3_write, n2_read, n3_read;
};

// Configurations: I probe only, II control only, III control and atoms.
NoiseBudget noise_budget(const DetectionHistogram& probe_only, const DetectionHistogram& control_only,
                         const DetectionHistogram& control_atoms, double window, double write_center,
                         double read_center, double leakage_offset);

/// Published noise counts of a single-photon run used to pin the detector
/// defaults. n*_write/read are per-peak counts in windows centered on the
/// shifted leakage peaks; n1..n3 are counts in the window on the recall time.
struct NoiseCalibrationData {
  double n_trials = 1.1e6;
  double window = 30e-9;
  double n1 = 5;
  double n2 = 22;
  double n3 = 36;
  double n2_write = 41;
  double n3_write = 41;
  double n2_read = 31;
  double n3_read = 38;
  double leakage_offset = -24e-9;
};

// Dark rate from n1; leakage spread from the ratio of window to per-peak
// control-only counts; amplitudes from the window (read) and per-peak (write)
// counts after subtracting the dark level.
DetectorModel calibrate_detector(const NoiseCalibrationData& data, double eta_t);

// Fraction of a unit gaussian bump (FWHM fwhm, centered at offset) that falls
// in [-window/2, window/2).
double gaussian_window_fraction(double offset, double fwhm, double window);

void write_histogram(std::ostream& os, const DetectionHistogram& h);
// One timestamp in ns per line; blank lines and '#' comments are skipped.
DetectionHistogram histogram_from_events(std::istream& is, double t_begin, double t_end, double bin_width,
                                         std::uint64_t n_trials);

}  // namespace atsmem
