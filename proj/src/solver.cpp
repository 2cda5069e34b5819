#include "atsmem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "atsmem/errors.hpp"

namespace atsmem {

namespace {

constexpr cplx kI{0.0, 1.0};

// Fraction of the FWHM beyond which an envelope counts as switched off for
// the hold-phase shortcut (gaussian Ω/peak < 2^-36, probe |E|² < 2^-64).
constexpr double kControlQuietFwhm = 3.0;
constexpr double kProbeQuietFwhm = 4.0;

double cell_norm(const std::vector<cplx>& v, double dz) {
  double sum = 0.0;
  for (const auto& x : v) sum += std::norm(x);
  return sum * dz;
}

struct Interval {
  double begin;
  double end;
};

Interval active_interval(const PulseEnvelope& env, double quiet_fwhm) {
  if (env.shape() == PulseShape::square)
    return {env.center_time() - 0.5 * env.fwhm(), env.center_time() + 0.5 * env.fwhm()};
  return {env.center_time() - quiet_fwhm * env.fwhm(), env.center_time() + quiet_fwhm * env.fwhm()};
}

// Integrates the weak-probe Λ-system equations
//   ∂E/∂z = i g P
//   ∂P/∂t = -γ P + i g E + i (Ω/2) S
//   ∂S/∂t = i (Ω/2) P
// in the co-moving frame. P and S live at cell centers and E at cell faces;
// each cell is driven by the mean of its two face fields, which makes the
// semi-discrete system conserve |E|² flux + ∫|P|² + ∫|S|² exactly when γ = 0.
// (P, S) then form a linear ODE system in t stepped with RK4.
class Integrator {
 public:
  explicit Integrator(const ProtocolSetup& setup)
      : setup_(setup),
        n_z_(setup.grid.n_z),
        dz_(1.0 / setup.grid.n_z),
        g_(coupling_constant(setup.ensemble.optical_depth(), setup.species.excited_decay_rate())),
        gamma_(setup.optical_decay_rate()),
        p_(n_z_),
        s_(n_z_),
        e_(n_z_ + 1),
        tmp_p_(n_z_),
        tmp_s_(n_z_) {
    for (auto& k : kp_) k.assign(n_z_, cplx{});
    for (auto& k : ks_) k.assign(n_z_, cplx{});
  }

  SimulationResult run();

 private:
  cplx probe_in(double t) const { return setup_.options.probe_scale * setup_.probe(t); }

  void propagate(double t, const std::vector<cplx>& p, std::vector<cplx>& e) const {
    const cplx step = kI * g_ * dz_;
    e[0] = probe_in(t);
    for (int j = 0; j < n_z_; ++j) e[j + 1] = e[j] + step * p[j];
  }

  void derivatives(double t, const std::vector<cplx>& p, const std::vector<cplx>& s,
                   std::vector<cplx>& dp, std::vector<cplx>& ds) {
    propagate(t, p, e_);
    const cplx half_rabi = kI * (0.5 * setup_.schedule.rabi(t));
    const cplx ig = kI * g_;
    for (int j = 0; j < n_z_; ++j) {
      dp[j] = -gamma_ * p[j] + ig * (0.5 * (e_[j] + e_[j + 1])) + half_rabi * s[j];
      ds[j] = half_rabi * p[j];
    }
  }

  void rk4_step(double t, double dt) {
    derivatives(t, p_, s_, kp_[0], ks_[0]);
    for (int stage = 1; stage < 4; ++stage) {
      const double h = stage == 3 ? dt : 0.5 * dt;
      for (int j = 0; j < n_z_; ++j) {
        tmp_p_[j] = p_[j] + h * kp_[stage - 1][j];
        tmp_s_[j] = s_[j] + h * ks_[stage - 1][j];
      }
      derivatives(t + h, tmp_p_, tmp_s_, kp_[stage], ks_[stage]);
    }
    const double w = dt / 6.0;
    for (int j = 0; j < n_z_; ++j) {
      p_[j] += w * (kp_[0][j] + 2.0 * kp_[1][j] + 2.0 * kp_[2][j] + kp_[3][j]);
      s_[j] += w * (ks_[0][j] + 2.0 * ks_[1][j] + 2.0 * ks_[2][j] + ks_[3][j]);
    }
  }

  // Start of the next interval (after t) in which a pulse, the probe or the
  // end of the write window needs explicit integration; t itself when busy.
  double next_busy_time(double t) const;

  const ProtocolSetup& setup_;
  const int n_z_;
  const double dz_;
  const double g_;
  const double gamma_;
  std::vector<cplx> p_, s_, e_, tmp_p_, tmp_s_;
  std::vector<cplx> kp_[4], ks_[4];
  std::vector<Interval> busy_;
};

double Integrator::next_busy_time(double t) const {
  double next = std::numeric_limits<double>::infinity();
  for (const auto& iv : busy_) {
    if (t >= iv.begin && t <= iv.end) return t;
    if (iv.begin > t) next = std::min(next, iv.begin);
  }
  return next;
}

SimulationResult Integrator::run() {
  const auto& sched = setup_.schedule;
  const auto& probe = setup_.probe;
  const auto& grid = setup_.grid;

  busy_.push_back(active_interval(probe, kProbeQuietFwhm));
  busy_.push_back(active_interval(sched.write(), kControlQuietFwhm));
  for (const auto& r : sched.readouts()) busy_.push_back(active_interval(r.pulse, kControlQuietFwhm));

  SimulationResult res;
  res.control_centers = sched.centers();
  res.control_areas.push_back(pulse_area(sched.write()));
  for (const auto& r : sched.readouts()) res.control_areas.push_back(pulse_area(r.pulse));
  for (std::size_t i = 0; i + 1 < res.control_centers.size(); ++i)
    res.window_edges.push_back(0.5 * (res.control_centers[i] + res.control_centers[i + 1]));
  const double write_end = res.window_edges.front();
  const double write_center = sched.write().center_time();
  const double overlap = setup_.ensemble.overlap_efficiency();

  const double t_begin = std::min(probe.support_begin(), sched.write().support_begin());
  const double t_end = std::max(probe.support_end(), sched.end_time());
  const long n_steps = static_cast<long>(std::ceil((t_end - t_begin) / grid.dt));
  const double dt = (t_end - t_begin) / static_cast<double>(n_steps);

  res.time.resize(n_steps + 1);
  res.e_in.resize(n_steps + 1);
  res.e_out.resize(n_steps + 1);
  std::vector<double> window_energy(res.control_centers.size(), 0.0);

  auto window_of = [&](double t) {
    return static_cast<std::size_t>(
        std::upper_bound(res.window_edges.begin(), res.window_edges.end(), t) - res.window_edges.begin());
  };

  double spontaneous = 0.0;
  double spin_loss = 0.0;
  double input_so_far = 0.0;
  bool write_closed = false;

  if (setup_.options.record_stride > 0) {
    res.record.emplace();
    for (int j = 0; j < n_z_; ++j) res.record->z.push_back((j + 0.5) * dz_);
  }
  auto record_row = [&](double t) {
    auto& rec = *res.record;
    rec.t.push_back(t);
    for (int j = 0; j < n_z_; ++j) {
      rec.field.push_back(0.5 * (e_[j] + e_[j + 1]));
      rec.optical_density.push_back(std::norm(p_[j]));
      rec.spin_density.push_back(std::norm(s_[j]));
    }
  };

  // Scalar spin-wave processing over [t0, t1]: decoherence after the write
  // center and the overlap cut when the write window closes.
  auto apply_spin_processes = [&](double t0, double t1) {
    if (t1 > write_center) {
      const double from = std::max(t0, write_center) - write_center;
      const double to = t1 - write_center;
      const double factor = std::exp(log_total_retention(setup_.decoherence, to) -
                                     log_total_retention(setup_.decoherence, from));
      if (factor != 1.0) {
        const double before = cell_norm(s_, dz_);
        for (auto& x : s_) x *= factor;
        spin_loss += before * (1.0 - factor * factor);
      }
    }
    if (!write_closed && t1 >= write_end) {
      write_closed = true;
      const double stored = cell_norm(s_, dz_);
      res.post_write_spin_norm = stored;
      if (overlap < 1.0) {
        const double a = std::sqrt(overlap);
        for (auto& x : s_) x *= a;
        spin_loss += stored * (1.0 - overlap);
      }
    }
  };

  auto check_state = [&](long step, double t) {
    const double pn = cell_norm(p_, dz_);
    const double sn = cell_norm(s_, dz_);
    const double en = cell_norm(e_, dz_);
    if (!std::isfinite(pn) || !std::isfinite(sn) || !std::isfinite(en))
      throw NumericalError("non-finite state during integration", {step, t, en, pn, sn});
    if (pn + sn > (1.0 + grid.rel_tol) * input_so_far + grid.abs_tol)
      throw NumericalError("stored excitation exceeds the absorbed input", {step, t, en, pn, sn});
  };

  propagate(t_begin, p_, e_);
  res.time[0] = t_begin;
  res.e_in[0] = probe_in(t_begin);
  res.e_out[0] = e_.back();
  if (res.record) record_row(t_begin);

  long n = 0;
  while (n < n_steps) {
    const double t = t_begin + n * dt;

    if (setup_.options.hold_shortcut) {
      const double busy_at = std::min(next_busy_time(t), write_closed ? t_end : std::max(t, write_end));
      const long k = std::min<long>(static_cast<long>(std::floor((busy_at - t) / dt)), n_steps - n);
      const double optical = cell_norm(p_, dz_);
      if (k >= 2 && optical < grid.abs_tol * std::max(input_so_far, 1e-300)) {
        // Control and probe are off and the optical coherence is negligible:
        // P decays freely and only the scalar spin processes act on S.
        const cplx e_out0 = res.e_out[n];
        for (long m = 1; m <= k; ++m) {
          const double tm = t + m * dt;
          const double decay = std::exp(-gamma_ * (tm - t));
          res.time[n + m] = tm;
          res.e_in[n + m] = probe_in(tm);
          res.e_out[n + m] = e_out0 * decay;
          const double seg = 0.5 * dt * (std::norm(res.e_out[n + m - 1]) + std::norm(res.e_out[n + m]));
          window_energy[window_of(tm - 0.5 * dt)] += seg;
          input_so_far += 0.5 * dt * (std::norm(res.e_in[n + m - 1]) + std::norm(res.e_in[n + m]));
        }
        const double t_jump = t + k * dt;
        const double p_decay = std::exp(-gamma_ * (t_jump - t));
        spontaneous += optical * (1.0 - p_decay * p_decay);
        for (auto& x : p_) x *= p_decay;
        apply_spin_processes(t, t_jump);
        propagate(t_jump, p_, e_);
        n += k;
        res.skipped_steps += k;
        continue;
      }
    }

    const double optical_before = cell_norm(p_, dz_);
    rk4_step(t, dt);
    const double t_next = t_begin + (n + 1) * dt;
    apply_spin_processes(t, t_next);
    propagate(t_next, p_, e_);

    ++n;
    res.time[n] = t_next;
    res.e_in[n] = probe_in(t_next);
    res.e_out[n] = e_.back();
    input_so_far += 0.5 * dt * (std::norm(res.e_in[n - 1]) + std::norm(res.e_in[n]));
    window_energy[window_of(t_next - 0.5 * dt)] +=
        0.5 * dt * (std::norm(res.e_out[n - 1]) + std::norm(res.e_out[n]));
    spontaneous += gamma_ * dt * (optical_before + cell_norm(p_, dz_));
    check_state(n, t_next);
    if (res.record && n % setup_.options.record_stride == 0) record_row(t_next);
  }
  res.steps = n_steps;

  double input = 0.0;
  for (long i = 0; i < n_steps; ++i)
    input += 0.5 * dt * (std::norm(res.e_in[i]) + std::norm(res.e_in[i + 1]));
  res.input_energy = input;
  const double inv = input > 0.0 ? 1.0 / input : 0.0;
  res.transmitted_fraction = window_energy[0] * inv;
  for (std::size_t w = 1; w < window_energy.size(); ++w)
    res.efficiency_per_readout.push_back(window_energy[w] * inv);
  res.residual_spin_norm = cell_norm(s_, dz_) * inv;
  res.residual_optical_norm = cell_norm(p_, dz_) * inv;
  res.spontaneous_loss_fraction = spontaneous * inv;
  res.spin_loss_fraction = spin_loss * inv;
  res.post_write_spin_norm *= inv;
  return res;
}

}  // namespace

double ProtocolSetup::optical_decay_rate() const {
  return options.optical_decay_rate.value_or(species.excited_decay_rate());
}

ProtocolSetup ProtocolSetup::time_scaled(double factor) const {
  ProtocolSetup out{
      AtomSpecies(species.mass(), species.transition_wavelength(), species.ground_splitting(),
                  species.excited_decay_rate() / factor),
      ensemble,
      probe.time_scaled(factor),
      schedule.time_scaled(factor),
      grid,
      decoherence.time_scaled(factor),
      options};
  out.grid.dt *= factor;
  if (options.optical_decay_rate) out.options.optical_decay_rate = *options.optical_decay_rate / factor;
  return out;
}

double SimulationResult::total_efficiency() const {
  double sum = 0.0;
  for (double e : efficiency_per_readout) sum += e;
  return sum;
}

double SimulationResult::bookkeeping_sum() const {
  return transmitted_fraction + total_efficiency() + residual_spin_norm + residual_optical_norm +
         spontaneous_loss_fraction + spin_loss_fraction;
}

double SimulationResult::output_energy_in(double center, double window) const {
  const double lo = center - 0.5 * window;
  const double hi = center + 0.5 * window;
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < time.size(); ++i) {
    const double mid = 0.5 * (time[i] + time[i + 1]);
    if (mid < lo || mid >= hi) continue;
    energy += 0.5 * (time[i + 1] - time[i]) * (std::norm(e_out[i]) + std::norm(e_out[i + 1]));
  }
  return input_energy > 0.0 ? energy / input_energy : 0.0;
}

SimulationResult SimulationResult::with_recall_efficiency(std::size_t readout, double efficiency,
                                                         double window) const {
  if (readout >= efficiency_per_readout.size()) throw ConfigError("readout index out of range");
  require_finite(efficiency, "efficiency");
  if (efficiency < 0.0) throw DomainError("efficiency must be >= 0");
  const double current = output_energy_in(control_centers[readout + 1], window);
  if (!(current > 0.0)) throw DomainError("no recalled energy inside the window to rescale");
  const double factor2 = efficiency / current;
  const double factor = std::sqrt(factor2);
  SimulationResult out = *this;
  const double lo = window_edges[readout];
  const double hi = readout + 1 < window_edges.size() ? window_edges[readout + 1]
                                                      : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < time.size(); ++i)
    if (time[i] >= lo && time[i] < hi) out.e_out[i] *= factor;
  out.efficiency_per_readout[readout] *= factor2;
  return out;
}

std::size_t SimulationResult::peak_index(std::size_t window) const {
  const double lo = window == 0 ? -std::numeric_limits<double>::infinity() : window_edges[window - 1];
  const double hi = window < window_edges.size() ? window_edges[window] : std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] < lo || time[i] >= hi) continue;
    if (std::norm(e_out[i]) > best_value) {
      best_value = std::norm(e_out[i]);
      best = i;
    }
  }
  return best;
}

double coupling_constant(double optical_depth, double decay_rate) {
  return std::sqrt(0.5 * optical_depth * decay_rate);
}

void validate_grid(const ProtocolSetup& setup) {
  std::vector<std::string> issues;
  const auto& grid = setup.grid;
  const double d = setup.ensemble.optical_depth();
  if (grid.n_z < 32) issues.push_back("grid.n_z must be >= 32");
  if (grid.n_z < 2.0 * d) issues.push_back("grid.n_z must resolve the optical depth (n_z >= 2 d)");
  if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) {
    issues.push_back("grid.dt must be > 0");
  } else {
    const double gamma = setup.species.excited_decay_rate();
    const double limits[] = {
        setup.probe.fwhm() / 20.0,
        setup.schedule.peak_rabi() > 0.0 ? constants::two_pi / (10.0 * setup.schedule.peak_rabi())
                                         : std::numeric_limits<double>::infinity(),
        1.0 / (10.0 * gamma),
        d > 0.0 ? 1.0 / (10.0 * 0.5 * d * gamma) : std::numeric_limits<double>::infinity(),
    };
    const char* names[] = {"probe FWHM/20", "2pi/(10 peak Rabi)", "1/(10 gamma)", "1/(10 d gamma/2)"};
    for (int i = 0; i < 4; ++i)
      if (grid.dt > limits[i])
        issues.push_back("grid.dt = " + std::to_string(grid.dt) + " s exceeds " + names[i] + " = " +
                         std::to_string(limits[i]) + " s");
  }
  if (!(grid.abs_tol > 0.0) || !(grid.rel_tol > 0.0)) issues.push_back("grid tolerances must be > 0");
  if (setup.probe.role() != PulseRole::probe) issues.push_back("probe envelope has the control role");
  if (setup.options.record_stride < 0) issues.push_back("record_stride must be >= 0");
  if (setup.options.optical_decay_rate && !(*setup.options.optical_decay_rate >= 0.0))
    issues.push_back("optical_decay_rate must be >= 0");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  setup.decoherence.validate();
}

SimulationResult simulate_protocol(const ProtocolSetup& setup) {
  validate_grid(setup);
  Integrator integrator(setup);
  return integrator.run();
}

SimulationResult simulate_protocol(const EnsembleParams& ensemble, const AtomSpecies& species,
                                   const PulseEnvelope& probe, const ControlSchedule& schedule,
                                   const SolverGrid& grid, const DecoherenceModel& decoherence) {
  ProtocolSetup setup{species, ensemble, probe, schedule, grid, decoherence, {}};
  return simulate_protocol(setup);
}

void write_field_dump(std::ostream& os, const FieldRecord& record, double medium_length) {
  os << "# z_m t_s re_E im_E abs2_P abs2_S\n";
  const std::size_t nz = record.z.size();
  char line[160];
  for (std::size_t i = 0; i < record.t.size(); ++i) {
    for (std::size_t j = 0; j < nz; ++j) {
      const std::size_t k = i * nz + j;
      std::snprintf(line, sizeof line, "%.9e %.9e %.9e %.9e %.9e %.9e\n", record.z[j] * medium_length,
                    record.t[i], record.field[k].real(), record.field[k].imag(),
                    record.optical_density[k], record.spin_density[k]);
      os << line;
    }
  }
}

}  // namespace atsmem
