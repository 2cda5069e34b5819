#include "atsmem/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "atsmem/decoherence.hpp"
#include "atsmem/errors.hpp"
#include "atsmem/parallel.hpp"
#include "atsmem/protocol_tasks.hpp"
#include "atsmem/rng.hpp"

namespace atsmem {

namespace {

constexpr double ns = 1e-9;

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string suffix(double v) { return num(v); }

struct Context {
  const Scenario& sc;
  const RunOptions& opt;
  RunReport& report;
  std::uint64_t seed;

  void count(const SimulationResult& r) {
    ++report.simulations;
    report.solver_steps += r.steps;
    report.skipped_steps += r.skipped_steps;
  }
  void metric(const std::string& key, double value, double err = 0.0) {
    report.metrics.push_back({key, value, err});
  }
  TrialConfig trials(std::uint64_t arm) const {
    TrialConfig c = build_trials(sc, opt.threads);
    c.rng_seed = derive_seed(seed, arm);
    return c;
  }
};

SimulationResult simulate_checked(const ProtocolSetup& setup, const std::string& where) {
  try {
    return simulate_protocol(setup);
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what(), e.record());
  }
}

// Applies the optional in-window efficiency override of [trials].
SimulationResult for_detection(const Scenario& sc, const SimulationResult& sim) {
  if (!sc.has("trials", "recall_efficiency")) return sim;
  return sim.with_recall_efficiency(0, sc.real("trials", "recall_efficiency"), sc.real("trials", "window_ns") * ns);
}

Table trace_table(const SimulationResult& sim) {
  Table t{"trace", {"time_ns", "input_intensity_per_ns", "output_intensity_per_ns"}, {}};
  const double norm = sim.input_energy > 0 ? ns / sim.input_energy : 0.0;
  const double dt = sim.time.size() > 1 ? sim.time[1] - sim.time[0] : 1.0;
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.5 * ns / dt)));
  for (std::size_t i = 0; i < sim.time.size(); i += stride)
    t.rows.push_back({sim.time[i] / ns, std::norm(sim.e_in[i]) * norm, std::norm(sim.e_out[i]) * norm});
  return t;
}

void run_single(Context& ctx) {
  const ProtocolSetup setup = build_setup(ctx.sc);
  const SimulationResult sim = simulate_checked(setup, ctx.report.scenario_name);
  ctx.count(sim);

  Table results{"results",
                {"optical_depth", "storage_ns", "efficiency", "transmitted", "residual_spin", "residual_optical",
                 "spontaneous_loss", "spin_loss", "bookkeeping_sum"},
                {}};
  results.rows.push_back({setup.ensemble.optical_depth(), (sim.control_centers[1] - sim.control_centers[0]) / ns,
                          sim.total_efficiency(), sim.transmitted_fraction, sim.residual_spin_norm,
                          sim.residual_optical_norm, sim.spontaneous_loss_fraction, sim.spin_loss_fraction,
                          sim.bookkeeping_sum()});
  ctx.report.tables.push_back(std::move(results));
  ctx.report.tables.push_back(trace_table(sim));

  ctx.metric("efficiency", sim.total_efficiency());
  ctx.metric("transmitted", sim.transmitted_fraction);
  ctx.metric("bookkeeping_sum", sim.bookkeeping_sum());
  const auto pm = phase_matching(build_geometry(ctx.sc));
  if (std::isfinite(pm.grating_period)) ctx.metric("grating_period_um", pm.grating_period * 1e6);
  if (setup.decoherence.motional_enabled())
    ctx.metric("motional_lifetime_ns", motional_efficiency_lifetime(setup.decoherence) / ns);

  if (ctx.sc.has_section("trials")) {
    const TrialConfig cfg = ctx.trials(0);
    const SimulationResult det_sim = for_detection(ctx.sc, sim);
    const auto h = run_trials(det_sim, build_detector(ctx.sc), cfg, true, true, true);
    const auto est = estimate_probabilities(h, sim.control_centers[1], cfg.analysis_window);
    ctx.metric("recall_counts", static_cast<double>(est.counts), std::sqrt(static_cast<double>(est.counts)));
    ctx.metric("recall_probability", est.p, est.standard_error);
    ctx.report.histograms["histogram"] = h;
  }
}

void run_lifetime(Context& ctx) {
  const auto storage = ctx.sc.real_list("sweep", "storage_ns");
  const double window = ctx.sc.real("trials", "window_ns") * ns;
  const auto sims = parallel_map(storage.size(), ctx.opt.threads, [&](std::size_t i) {
    Scenario point = ctx.sc;
    point.set("pulse", "storage_ns", num(storage[i]));
    return simulate_checked(build_setup(point), ctx.report.scenario_name + " storage " + num(storage[i]) + " ns");
  });

  const DetectorModel det = build_detector(ctx.sc);
  const double mean_in = ctx.sc.real("trials", "mean_photons");
  Table results{"results",
                {"storage_ns", "efficiency_sim", "efficiency_sim_window", "recall_counts", "efficiency_measured",
                 "efficiency_measured_stderr"},
                {}};
  std::vector<LifetimeSample> measured, simulated;
  for (std::size_t i = 0; i < storage.size(); ++i) {
    const auto& sim = sims[i];
    ctx.count(sim);
    const TrialConfig cfg = ctx.trials(i);
    const auto h = run_trials(sim, det, cfg, true, true, true);
    const double center = sim.control_centers[1];
    const auto counts = static_cast<double>(h.counts_in(center, window));
    const double scale = static_cast<double>(cfg.n_trials) * mean_in * det.downstream_transmission;
    const double eta = scale > 0 ? counts / scale : 0.0;
    const double eta_err = scale > 0 ? std::sqrt(std::max(counts, 1.0)) / scale : 0.0;
    results.rows.push_back({storage[i], sim.total_efficiency(), sim.output_energy_in(center, window), counts, eta,
                            eta_err});
    measured.push_back({storage[i] * ns, eta, eta_err});
    simulated.push_back({storage[i] * ns, sim.total_efficiency(), std::nullopt});
    ctx.metric("efficiency_" + suffix(storage[i]) + "ns", eta, eta_err);
    ctx.report.histograms["histogram_storage_" + suffix(storage[i]) + "ns"] = h;
  }
  ctx.report.tables.push_back(std::move(results));

  if (storage.size() >= 3) {
    try {
      const auto fit = fit_exponential_lifetime(measured);
      ctx.metric("fit_tau_ns", fit.tau / ns, fit.tau_stderr / ns);
      ctx.metric("fit_eta0", fit.eta0, fit.eta0_stderr);
      ctx.metric("fit_chi2_per_dof", fit.dof > 0 ? fit.chi2 / fit.dof : 0.0);
      const auto sim_fit = fit_exponential_lifetime(simulated);
      ctx.metric("sim_fit_tau_ns", sim_fit.tau / ns, sim_fit.tau_stderr / ns);
      ctx.report.tables.push_back(
          {"fit", {"tau_ns", "tau_stderr_ns", "eta0", "eta0_stderr", "chi2", "dof"},
           {{fit.tau / ns, fit.tau_stderr / ns, fit.eta0, fit.eta0_stderr, fit.chi2, static_cast<double>(fit.dof)}}});
    } catch (const std::exception& e) {
      ctx.report.notes.push_back(std::string("lifetime fit skipped: ") + e.what());
    }
  } else {
    ctx.report.notes.push_back("lifetime fit needs at least three storage times");
  }
  if (storage.size() >= 2 && measured.front().efficiency > 0 && measured.back().efficiency > 0 &&
      measured.front().efficiency != measured.back().efficiency)
    ctx.metric("two_point_tau_ns", two_point_lifetime(measured.front(), measured.back()) / ns);
}

void run_snr(Context& ctx) {
  const auto photons = ctx.sc.real_list("sweep", "mean_photons");
  const SimulationResult raw = simulate_checked(build_setup(ctx.sc), ctx.report.scenario_name);
  ctx.count(raw);
  const SimulationResult sim = for_detection(ctx.sc, raw);
  const DetectorModel det = build_detector(ctx.sc);
  const double center = sim.control_centers[1];

  TrialConfig noise_cfg = ctx.trials(0);
  noise_cfg.mean_photons_in = 0.0;
  const auto noise_h = run_trials(sim, det, noise_cfg, false, true, true);
  const auto pn = estimate_probabilities(noise_h, center, noise_cfg.analysis_window);
  ctx.report.histograms["histogram_noise"] = noise_h;
  ctx.metric("p_noise", pn.p, pn.standard_error);

  Table results{"results", {"mean_photons", "p_signal", "p_signal_stderr", "p_noise", "snr", "snr_stderr", "fidelity"},
                {}};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < photons.size(); ++i) {
    TrialConfig cfg = ctx.trials(i + 1);
    cfg.mean_photons_in = photons[i];
    const auto h = run_trials(sim, det, cfg, true, true, true);
    const auto ps = estimate_probabilities(h, center, cfg.analysis_window);
    const auto st = snr_and_fidelity(ps.p, pn.p, ps.standard_error, pn.standard_error);
    const double snr = st.infinite_snr ? NAN : st.snr;
    results.rows.push_back({photons[i], ps.p, ps.standard_error, pn.p, snr, st.snr_err, st.fidelity.value_or(NAN)});
    ctx.metric("snr_n" + suffix(photons[i]), snr, st.snr_err);
    ctx.report.histograms["histogram_n" + suffix(photons[i])] = h;
    if (!st.infinite_snr) {
      xs.push_back(photons[i]);
      ys.push_back(st.snr);
    }
  }
  ctx.report.tables.push_back(std::move(results));

  if (xs.size() >= 2) {
    // Least squares through the origin; R² relative to the mean of y.
    double sxy = 0, sxx = 0, ybar = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += xs[i] * ys[i];
      sxx += xs[i] * xs[i];
      ybar += ys[i];
    }
    ybar /= static_cast<double>(ys.size());
    const double slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ss_res += (ys[i] - slope * xs[i]) * (ys[i] - slope * xs[i]);
      ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    ctx.metric("snr_slope", slope);
    ctx.metric("snr_r2", ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0);
  }
}

void run_noise(Context& ctx) {
  const SimulationResult raw = simulate_checked(build_setup(ctx.sc), ctx.report.scenario_name);
  ctx.count(raw);
  const SimulationResult sim = for_detection(ctx.sc, raw);
  const DetectorModel det = build_detector(ctx.sc);
  const double write_center = sim.control_centers[0];
  const double read_center = sim.control_centers[1];

  const TrialConfig cfg = ctx.trials(0);
  const auto signal = run_trials(sim, det, cfg, true, true, true);
  const auto config1 = run_trials(sim, det, ctx.trials(1), true, false, false);
  const auto config2 = run_trials(sim, det, ctx.trials(2), false, false, true);
  const auto config3 = run_trials(sim, det, ctx.trials(3), false, true, true);
  ctx.report.histograms["histogram_signal"] = signal;
  ctx.report.histograms["histogram_config1"] = config1;
  ctx.report.histograms["histogram_config2"] = config2;
  ctx.report.histograms["histogram_config3"] = config3;

  const double window = cfg.analysis_window;
  const auto nb = noise_budget(config1, config2, config3, window, write_center, read_center, det.leakage_time_offset);
  const auto ns_counts = static_cast<double>(signal.counts_in(read_center, window));
  const double n = static_cast<double>(cfg.n_trials);
  const double eta_t = det.downstream_transmission;

  const double expected = n * cfg.mean_photons_in * eta_t * sim.output_energy_in(read_center, window);
  ctx.metric("expected_signal_counts", expected);
  ctx.metric("signal_counts", ns_counts, std::sqrt(ns_counts));
  const std::pair<const char*, CountWithError> rows[] = {
      {"n1", nb.n1}, {"n2", nb.n2}, {"n3", nb.n3}, {"n2_write", nb.n2_write}, {"n3_write", nb.n3_write},
      {"n2_read", nb.n2_read}, {"n3_read", nb.n3_read}};
  Table results{"results", {"configuration", "counts", "counts_stderr"}, {}};
  int idx = 0;
  for (const auto& [key, c] : rows) {
    ctx.metric(std::string(key) + "_counts", c.counts, c.error);
    results.rows.push_back({static_cast<double>(idx++), c.counts, c.error});
  }
  ctx.report.tables.push_back(std::move(results));

  const double p_n = unconditional_noise_probability(nb.n3.counts, n, eta_t);
  const double p_n_err = nb.n3.error / (n * eta_t);
  const double p_s = ns_counts / (n * eta_t);
  const double p_s_err = std::sqrt(ns_counts) / (n * eta_t);
  const auto st = snr_and_fidelity(p_s, p_n, p_s_err, p_n_err);
  ctx.metric("p_noise", p_n, p_n_err);
  ctx.metric("p_signal", p_s, p_s_err);
  if (!st.infinite_snr) ctx.metric("snr", st.snr, st.snr_err);
  if (st.fidelity) ctx.metric("fidelity", *st.fidelity, st.fidelity_err);
}

void run_splitter(Context& ctx) {
  const ProtocolSetup setup = build_setup(ctx.sc);
  auto areas = ctx.sc.real_list("schedule", "readout_areas_pi");
  for (double& a : areas) a *= constants::pi;
  const double first = ctx.sc.real("pulse", "storage_ns") * ns;
  const double spacing = ctx.sc.real("schedule", "readout_spacing_ns") * ns;

  SplitResult split;
  try {
    split = partial_readout_fractions(setup, areas, first, spacing);
  } catch (const NumericalError& e) {
    throw NumericalError(ctx.report.scenario_name + ": " + e.what(), e.record());
  }
  ctx.count(split.simulation);

  Table results{"results", {"readout", "area_pi", "center_ns", "fraction"}, {}};
  results.rows.push_back({0, 0, split.simulation.control_centers[0] / ns, split.transmitted});
  for (std::size_t k = 0; k < split.fractions.size(); ++k) {
    results.rows.push_back({static_cast<double>(k + 1), areas[k] / constants::pi,
                            split.simulation.control_centers[k + 1] / ns, split.fractions[k]});
    ctx.metric("fraction_" + std::to_string(k + 1), split.fractions[k]);
  }
  ctx.report.tables.push_back(std::move(results));
  ctx.metric("transmitted", split.transmitted);
  ctx.metric("residual_ratio", split.residual_ratio());
  double total = 0;
  for (double f : split.fractions) total += f;
  ctx.metric("recalled_total", total);
  ctx.metric("bookkeeping_sum", split.simulation.bookkeeping_sum());

  if (ctx.sc.flag("split", "tune")) {
    const auto tuned = tune_two_way_split(setup, first, spacing, ctx.sc.real("split", "target_ratio"));
    ctx.count(tuned.result.simulation);
    ctx.metric("tuned_first_area_pi", tuned.first_area / constants::pi);
    ctx.metric("tuned_ratio", tuned.ratio);
    ctx.metric("tuned_iterations", tuned.iterations);
  }

  if (ctx.sc.has_section("trials")) {
    const TrialConfig cfg = ctx.trials(0);
    const auto h = run_trials(split.simulation, build_detector(ctx.sc), cfg, true, true, true);
    ctx.report.histograms["histogram"] = h;
    const auto& centers = split.simulation.control_centers;
    const double t0 = ctx.sc.real("trials", "window_ns") * ns;
    ctx.metric("counts_transmitted", static_cast<double>(h.counts_in(centers[0], t0)));
    for (std::size_t k = 1; k < centers.size(); ++k)
      ctx.metric("counts_readout_" + std::to_string(k), static_cast<double>(h.counts_in(centers[k], t0)));
  }
}

void run_depth(Context& ctx) {
  const ProtocolSetup setup = build_setup(ctx.sc);
  const auto depths = ctx.sc.real_list("sweep", "optical_depth");
  const auto points = efficiency_vs_depth(setup, depths, ctx.opt.threads);
  ctx.report.simulations += static_cast<int>(points.size());
  Table results{"results", {"optical_depth", "efficiency", "transmitted"}, {}};
  std::size_t best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    results.rows.push_back({points[i].optical_depth, points[i].efficiency, points[i].transmitted});
    ctx.metric("efficiency_d" + suffix(points[i].optical_depth), points[i].efficiency);
    if (points[i].efficiency > points[best].efficiency) best = i;
  }
  ctx.report.tables.push_back(std::move(results));
  ctx.metric("max_efficiency", points[best].efficiency);
  ctx.metric("depth_at_max", points[best].optical_depth);
}

void run_optimize(Context& ctx) {
  const ProtocolSetup setup = build_setup(ctx.sc);
  const double lo = constants::two_pi * ctx.sc.real("sweep", "rabi_min_MHz") * 1e6;
  const double hi = constants::two_pi * ctx.sc.real("sweep", "rabi_max_MHz") * 1e6;
  const auto opt = optimize_control_amplitude(setup, lo, hi, ctx.opt.threads);
  ctx.report.simulations += opt.evaluations;
  ctx.report.tables.push_back({"results",
                               {"peak_rabi_MHz", "pulse_area_pi", "efficiency", "multimodal", "evaluations"},
                               {{opt.peak_rabi / constants::two_pi / 1e6, opt.pulse_area / constants::pi,
                                 opt.efficiency, opt.multimodal ? 1.0 : 0.0, static_cast<double>(opt.evaluations)}}});
  ctx.metric("peak_rabi_MHz", opt.peak_rabi / constants::two_pi / 1e6);
  ctx.metric("pulse_area_pi", opt.pulse_area / constants::pi);
  ctx.metric("efficiency", opt.efficiency);
  ctx.metric("multimodal", opt.multimodal ? 1.0 : 0.0);
  if (opt.multimodal) ctx.report.notes.push_back("efficiency has several local maxima in the search range");
}

void write_table(const Table& t, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << num(row[c]);
    os << '\n';
  }
}

}  // namespace

const Metric* RunReport::find_metric(const std::string& key) const {
  for (const auto& m : metrics)
    if (m.key == key) return &m;
  return nullptr;
}

double RunReport::metric(const std::string& key) const {
  if (const Metric* m = find_metric(key)) return m->value;
  throw std::out_of_range("report has no metric '" + key + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  SplitMix64 mix(seed + 0x632be59bd9b4e019ULL * (k + 1));
  return mix.next();
}

RunReport run_scenario(const Scenario& sc, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario_name = sc.name();
  report.kind = sc.kind();
  report.scenario_text = sc.serialize();
  report.config_hash = sc.hash();
  report.seed = options.seed.value_or(sc.integer("trials", "seed"));

  RunOptions opt = options;
  opt.threads = std::max(1u, opt.threads);
  Context ctx{sc, opt, report, report.seed};
  switch (sc.kind()) {
    case ExperimentKind::single_run: run_single(ctx); break;
    case ExperimentKind::lifetime_sweep: run_lifetime(ctx); break;
    case ExperimentKind::snr_sweep: run_snr(ctx); break;
    case ExperimentKind::noise_budget: run_noise(ctx); break;
    case ExperimentKind::beam_splitter: run_splitter(ctx); break;
    case ExperimentKind::efficiency_vs_depth: run_depth(ctx); break;
    case ExperimentKind::optimize_control: run_optimize(ctx); break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RunReport run_scenario(const std::filesystem::path& path, const RunOptions& options) {
  return run_scenario(Scenario::load(path), options);
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < report.tables.size(); ++i)
    write_table(report.tables[i], dir / (report.tables[i].name + ".csv"));

  {
    std::ofstream os(dir / "metrics.csv");
    os << "key,value,stderr\n";
    for (const auto& m : report.metrics) os << m.key << ',' << num(m.value) << ',' << num(m.stderr_value) << '\n';
  }
  if (!report.histograms.empty()) {
    std::filesystem::create_directories(dir / "histograms");
    for (const auto& [name, h] : report.histograms) {
      std::ofstream os(dir / "histograms" / (name + ".csv"));
      write_histogram(os, h);
    }
  }
  {
    std::ofstream os(dir / "scenario.ini");
    os << report.scenario_text;
  }
  std::ofstream os(dir / "summary.txt");
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  os << "scenario: " << report.scenario_name << '\n'
     << "kind: " << to_string(report.kind) << '\n'
     << "version: " << report.version << '\n'
     << "seed: " << report.seed << '\n'
     << "config_hash: " << hash << '\n'
     << "wall_clock_s: " << report.wall_seconds << '\n'
     << "simulations: " << report.simulations << '\n'
     << "solver_steps: " << report.solver_steps << " (skipped " << report.skipped_steps << ")\n";
  if (!report.metrics.empty()) {
    os << "\nmetrics:\n";
    for (const auto& m : report.metrics) {
      os << "  " << m.key << " = " << num(m.value);
      if (m.stderr_value > 0) os << " +- " << num(m.stderr_value);
      os << '\n';
    }
  }
  for (const auto& n : report.notes) os << "note: " << n << '\n';
}

std::filesystem::path default_output_directory() {
  if (const char* env = std::getenv("ATSMEM_OUT_DIR"); env && *env) return env;
  return "atsmem-out";
}

}  // namespace atsmem
