#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "atsmem/detection.hpp"
#include "atsmem/errors.hpp"

namespace atsmem {

namespace {
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

CountWithError poisson_count(std::uint64_t n) {
  return {static_cast<double>(n), std::sqrt(static_cast<double>(n))};
}
}  // namespace

ProbabilityEstimate estimate_probabilities(const DetectionHistogram& h, double window_center, double window) {
  if (h.n_trials == 0) throw ConfigError("histogram has no trials");
  if (!(window > 0.0)) throw ConfigError("estimation window must be > 0");
  if (window_center - 0.5 * window < h.bin_edges.front() - 1e-15 ||
      window_center + 0.5 * window > h.bin_edges.back() + 1e-15)
    throw ConfigError("estimation window lies outside the histogram span");
  ProbabilityEstimate est;
  est.counts = h.counts_in(window_center, window);
  const double n = static_cast<double>(h.n_trials);
  est.p = std::min(1.0, static_cast<double>(est.counts) / n);
  est.standard_error = std::sqrt(est.p * (1.0 - est.p) / n);
  // Zero counts: the exact one-sided 95 % bound -ln(0.05)/N.
  est.upper_95 = est.counts == 0 ? -std::log(0.05) / n : est.p + 2.0 * est.standard_error;
  return est;
}

double unconditional_noise_probability(double n3_counts, double n_trials, double eta_t) {
  require_finite(n3_counts, "N3");
  require_finite(eta_t, "eta_t");
  if (!(n_trials > 0.0)) throw DomainError("N must be > 0");
  if (!(eta_t > 0.0 && eta_t <= 1.0)) throw DomainError("eta_t must lie in (0, 1]");
  if (n3_counts < 0.0) throw DomainError("N3 must be >= 0");
  return n3_counts / (n_trials * eta_t);
}

TrialStatistics snr_and_fidelity(double p_s, double p_n, double p_s_err, double p_n_err) {
  require_finite(p_s, "p_s");
  require_finite(p_n, "p_n");
  TrialStatistics st;
  st.p_s = p_s;
  st.p_n = p_n;
  st.p_s_err = p_s_err;
  st.p_n_err = p_n_err;
  if (p_n <= 0.0) {
    st.infinite_snr = true;
    st.snr = std::numeric_limits<double>::infinity();
    st.fidelity = 1.0;
    return st;
  }
  st.snr = (p_s - p_n) / p_n;
  st.below_noise = p_s < p_n;
  // ∂SNR/∂p_s = 1/p_n, ∂SNR/∂p_n = -p_s/p_n²
  st.snr_err = std::hypot(p_s_err / p_n, p_s * p_n_err / (p_n * p_n));
  if (st.snr >= 1.0) {
    st.fidelity = 1.0 - 1.0 / st.snr;
    st.fidelity_err = st.snr_err / (st.snr * st.snr);
  }
  return st;
}

NoiseBudget noise_budget(const DetectionHistogram& probe_only, const DetectionHistogram& control_only,
                         const DetectionHistogram& control_atoms, double window, double write_center,
                         double read_center, double leakage_offset) {
  if (probe_only.n_trials != control_only.n_trials || probe_only.n_trials != control_atoms.n_trials)
    throw ConfigError("noise-budget histograms must share the number of trials");
  if (probe_only.bin_edges != control_only.bin_edges || probe_only.bin_edges != control_atoms.bin_edges)
    throw ConfigError("noise-budget histograms must share the binning");
  NoiseBudget nb;
  nb.n1 = poisson_count(probe_only.counts_in(read_center, window));
  nb.n2 = poisson_count(control_only.counts_in(read_center, window));
  nb.n3 = poisson_count(control_atoms.counts_in(read_center, window));
  nb.n2_write = poisson_count(control_only.counts_in(write_center + leakage_offset, window));
  nb.n3_write = poisson_count(control_atoms.counts_in(write_center + leakage_offset, window));
  nb.n2_read = poisson_count(control_only.counts_in(read_center + leakage_offset, window));
  nb.n3_read = poisson_count(control_atoms.counts_in(read_center + leakage_offset, window));
  return nb;
}

double gaussian_window_fraction(double offset, double fwhm, double window) {
  const double sigma = fwhm_to_sigma(fwhm);
  return normal_cdf((0.5 * window - offset) / sigma) - normal_cdf((-0.5 * window - offset) / sigma);
}

DetectorModel calibrate_detector(const NoiseCalibrationData& data, double eta_t) {
  if (!(data.n_trials > 0.0) || !(data.window > 0.0)) throw DomainError("calibration needs N > 0 and a window");
  const double n2_excess = data.n2 - data.n1;
  const double n2_read_excess = data.n2_read - data.n1;
  if (!(n2_excess > 0.0) || !(n2_read_excess > 0.0))
    throw DomainError("calibration needs control-only counts above the dark level");

  // Window/per-peak count ratio grows monotonically with the bump width.
  const double target = n2_excess / n2_read_excess;
  auto ratio = [&](double fwhm) {
    return gaussian_window_fraction(data.leakage_offset, fwhm, data.window) /
           gaussian_window_fraction(0.0, fwhm, data.window);
  };
  double lo = 1e-12, hi = 1e-5;
  if (!(ratio(lo) < target && ratio(hi) > target))
    throw DomainError("leakage spread cannot reproduce the window/per-peak count ratio");
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }

  DetectorModel m;
  m.downstream_transmission = eta_t;
  m.leakage_time_offset = data.leakage_offset;
  m.leakage_spread_fwhm = 0.5 * (lo + hi);
  m.dark_ambient_rate = data.n1 / (data.n_trials * data.window);
  const double in_window = gaussian_window_fraction(data.leakage_offset, m.leakage_spread_fwhm, data.window);
  const double on_peak = gaussian_window_fraction(0.0, m.leakage_spread_fwhm, data.window);
  m.leakage_read = n2_excess / (data.n_trials * in_window);
  m.atom_leakage_read = std::max(0.0, data.n3 - data.n2) / (data.n_trials * in_window);
  m.leakage_write = std::max(0.0, data.n2_write - data.n1) / (data.n_trials * on_peak);
  m.atom_leakage_write = std::max(0.0, data.n3_write - data.n2_write) / (data.n_trials * on_peak);
  m.validate();
  return m;
}

}  // namespace atsmem
