#include "atsmem/detection.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "atsmem/errors.hpp"
#include "atsmem/parallel.hpp"
#include "atsmem/rng.hpp"

namespace atsmem {

namespace {
// Per-trial means above this break the pile-up-free assumption.
constexpr double kMaxMeanPerTrial = 50.0;
}  // namespace

void DetectorModel::validate() const {
  std::vector<std::string> issues;
  const double values[] = {downstream_transmission, dark_ambient_rate, leakage_write, leakage_read,
                           atom_leakage_write, atom_leakage_read, leakage_time_offset, leakage_spread_fwhm};
  for (double v : values)
    if (!std::isfinite(v)) issues.push_back("detector parameters must be finite");
  if (!(downstream_transmission > 0.0 && downstream_transmission <= 1.0))
    issues.push_back("detector.eta_t must lie in (0, 1]");
  if (dark_ambient_rate < 0.0) issues.push_back("detector.dark_rate must be >= 0");
  if (leakage_write < 0.0 || leakage_read < 0.0 || atom_leakage_write < 0.0 || atom_leakage_read < 0.0)
    issues.push_back("detector leakage counts must be >= 0");
  if (!(leakage_spread_fwhm > 0.0)) issues.push_back("detector.leakage_fwhm must be > 0");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

DetectorModel DetectorModel::calibrated_default() { return calibrate_detector(NoiseCalibrationData{}, 0.1); }

void TrialConfig::validate() const {
  std::vector<std::string> issues;
  if (n_trials < 1) issues.push_back("trials.n_trials must be >= 1");
  if (!(mean_photons_in >= 0.0) || !std::isfinite(mean_photons_in))
    issues.push_back("trials.mean_photons_in must be >= 0");
  if (!(bin_width > 0.0)) issues.push_back("trials.bin_width must be > 0");
  if (!(analysis_window >= bin_width)) issues.push_back("trials.analysis_window must be >= bin_width");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::uint64_t DetectionHistogram::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::uint64_t DetectionHistogram::counts_in(double center, double window) const {
  const double lo = center - 0.5 * window;
  const double hi = center + 0.5 * window;
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
    if (c >= lo && c < hi) sum += counts[i];
  }
  return sum;
}

DetectionHistogram empty_histogram(double t_begin, double t_end, double bin_width, std::uint64_t n_trials) {
  if (!(bin_width > 0.0) || !(t_end > t_begin)) throw ConfigError("invalid histogram span");
  DetectionHistogram h;
  h.n_trials = n_trials;
  const long first = static_cast<long>(std::floor(t_begin / bin_width + 1e-9));
  const long last = static_cast<long>(std::ceil(t_end / bin_width - 1e-9));
  for (long k = first; k <= last; ++k) h.bin_edges.push_back(k * bin_width);
  h.counts.assign(h.bin_edges.size() - 1, 0);
  return h;
}

std::vector<double> detection_rate(const SimulationResult& sim, const DetectorModel& detector,
                                   double mean_photons_in, const SourceSelection& sources) {
  detector.validate();
  const std::size_t n = sim.time.size();
  std::vector<double> rate(n, detector.dark_ambient_rate);
  const double photon_scale = sim.input_energy > 0.0
                                  ? mean_photons_in * detector.downstream_transmission / sim.input_energy
                                  : 0.0;
  if (sources.probe) {
    const auto& field = sources.atoms ? sim.e_out : sim.e_in;
    for (std::size_t i = 0; i < n; ++i) rate[i] += photon_scale * std::norm(field[i]);
  }
  if (sources.control) {
    const double sigma = detector.leakage_spread_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t k = 0; k < sim.control_centers.size(); ++k) {
      const bool is_write = k == 0;
      double amount = is_write ? detector.leakage_write : detector.leakage_read;
      if (sources.atoms) amount += is_write ? detector.atom_leakage_write : detector.atom_leakage_read;
      const double rel = sim.control_areas[k] / constants::two_pi;
      amount *= rel * rel;
      if (amount == 0.0) continue;
      const double mu = sim.control_centers[k] + detector.leakage_time_offset;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = (sim.time[i] - mu) / sigma;
        if (std::abs(x) < 12.0) rate[i] += amount * norm * std::exp(-0.5 * x * x);
      }
    }
  }
  return rate;
}

DetectionHistogram run_trials(const SimulationResult& sim, const DetectorModel& detector,
                              const TrialConfig& config, bool include_probe, bool include_atoms,
                              bool include_control) {
  config.validate();
  if (sim.time.size() < 2) throw ConfigError("simulation result has no time axis");
  const auto rate = detection_rate(sim, detector, config.mean_photons_in,
                                   SourceSelection{include_probe, include_atoms, include_control});

  // Cell i spans [time[i], time[i+1]) with trapezoidal weight.
  const std::size_t cells = sim.time.size() - 1;
  std::vector<double> cdf(cells);
  double mean = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    mean += 0.5 * (sim.time[i + 1] - sim.time[i]) * (rate[i] + rate[i + 1]);
    cdf[i] = mean;
  }
  if (mean > kMaxMeanPerTrial)
    throw ConfigError("expected detections per trial (" + std::to_string(mean) +
                      ") exceed the single-photon counting regime");

  DetectionHistogram base = empty_histogram(sim.time.front(), sim.time.back(), config.bin_width, config.n_trials);
  const double t0 = base.bin_edges.front();
  const double exp_neg_mean = std::exp(-mean);

  auto run_chunk = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> counts(base.counts.size(), 0);
    if (mean == 0.0) return counts;
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      SplitMix64 rng = trial_stream(config.rng_seed, trial);
      const std::uint64_t k = poisson_small(rng, mean, exp_neg_mean);
      for (std::uint64_t e = 0; e < k; ++e) {
        const double target = rng.uniform() * mean;
        const std::size_t cell = std::min<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin(), cells - 1);
        const double t = sim.time[cell] + rng.uniform() * (sim.time[cell + 1] - sim.time[cell]);
        const auto bin = static_cast<std::size_t>(std::floor((t - t0) / config.bin_width));
        ++counts[std::min(bin, counts.size() - 1)];
      }
    }
    return counts;
  };

  const unsigned threads = std::max(1u, config.threads);
  const std::uint64_t chunk = (config.n_trials + threads - 1) / threads;
  const auto partial = parallel_map(threads, threads, [&](std::size_t w) {
    const std::uint64_t begin = std::min<std::uint64_t>(w * chunk, config.n_trials);
    const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, config.n_trials);
    return run_chunk(begin, end);
  });
  for (const auto& counts : partial)
    for (std::size_t b = 0; b < counts.size(); ++b) base.counts[b] += counts[b];
  return base;
}

void write_histogram(std::ostream& os, const DetectionHistogram& h) {
  os << "bin_start_ns,bin_end_ns,counts,counts_per_trial\n";
  char line[128];
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%llu,%.9e\n", h.bin_edges[i] * 1e9, h.bin_edges[i + 1] * 1e9,
                  static_cast<unsigned long long>(h.counts[i]),
                  static_cast<double>(h.counts[i]) / static_cast<double>(h.n_trials));
    os << line;
  }
}

DetectionHistogram histogram_from_events(std::istream& is, double t_begin, double t_end, double bin_width,
                                         std::uint64_t n_trials) {
  DetectionHistogram h = empty_histogram(t_begin, t_end, bin_width, n_trials);
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double t_ns;
    if (!(ls >> t_ns)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("event stream line " + std::to_string(line_no) + ": not a timestamp");
    }
    const double t = t_ns * 1e-9;
    if (t < h.bin_edges.front() || t >= h.bin_edges.back()) continue;
    const auto bin = static_cast<std::size_t>(std::floor((t - h.bin_edges.front()) / bin_width));
    ++h.counts[std::min(bin, h.counts.size() - 1)];
  }
  return h;
}

}  // namespace atsmem
