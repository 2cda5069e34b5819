#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "atsmem/decoherence.hpp"
#include "atsmem/physics.hpp"
#include "atsmem/pulse.hpp"

namespace atsmem {

using cplx = std::complex<double>;

// Fixed-step grid. z is normalized to [0, 1]; dt is in seconds.
struct SolverGrid {
  int n_z = 128;  // cells along z
  double dt = 0.05e-9;
  // Below this stored/propagating norm the hold phase is skipped analytically.
  double abs_tol = 1e-10;
  // Allowed relative overshoot of the stored norm over the input so far.
  double rel_tol = 1e-3;
};

struct SolverOptions {
  // Rate of the spontaneous-loss term. Defaults to the species γ; setting 0
  // gives the lossless limit while keeping the optical-depth coupling.
  std::optional<double> optical_decay_rate;
  cplx probe_scale{1.0, 0.0};
  bool hold_shortcut = true;
  // Store the (z, t) grid every record_stride steps; 0 disables.
  int record_stride = 0;
};

struct FieldRecord {
  std::vector<double> z;
  std::vector<double> t;
  // Row-major [time][z].
  std::vector<cplx> field;
  std::vector<double> optical_density;
  std::vector<double> spin_density;
};

/// Everything one storage-and-recall run needs.
struct ProtocolSetup {
  AtomSpecies species = AtomSpecies::rubidium87();
  EnsembleParams ensemble{10.0, 50e-6};
  PulseEnvelope probe = PulseEnvelope::probe(PulseShape::gaussian, 30e-9, 0.0);
  ControlSchedule schedule = ControlSchedule::standard(
      PulseShape::gaussian, PulseEnvelope::control_fwhm_from(30e-9, FwhmConvention::intensity), 200e-9);
  SolverGrid grid;
  DecoherenceModel decoherence;
  SolverOptions options;

  double optical_decay_rate() const;
  // All times multiplied by factor and all rates divided by it.
  ProtocolSetup time_scaled(double factor) const;
};

struct SimulationResult {
  std::vector<double> time;
  std::vector<cplx> e_in;
  std::vector<cplx> e_out;
  // Boundaries between the write window and successive readout windows.
  std::vector<double> window_edges;
  std::vector<double> control_centers;
  // Pulse area of the write and every readout, same order as control_centers.
  std::vector<double> control_areas;

  double input_energy = 0.0;
  double transmitted_fraction = 0.0;
  std::vector<double> efficiency_per_readout;
  double residual_spin_norm = 0.0;
  double residual_optical_norm = 0.0;
  double spontaneous_loss_fraction = 0.0;
  // Spin amplitude removed by decoherence and imperfect overlap.
  double spin_loss_fraction = 0.0;
  // Spin norm at the end of the write window.
  double post_write_spin_norm = 0.0;

  long steps = 0;
  long skipped_steps = 0;
  std::optional<FieldRecord> record;

  double total_efficiency() const;
  // transmitted + recalled + residual + losses; 1 up to discretization error.
  double bookkeeping_sum() const;
  // Scales the recalled field of readout k so that the energy inside
  // [center_k - window/2, center_k + window/2] equals efficiency.
  SimulationResult with_recall_efficiency(std::size_t readout, double efficiency, double window) const;
  // Fraction of the input energy inside [center - window/2, center + window/2].
  double output_energy_in(double center, double window) const;

  // Index into time of the largest |e_out|² inside window w (0 = write).
  std::size_t peak_index(std::size_t window) const;
};

// Coupling g with ∂E/∂z = i g P and ∂P/∂t ⊃ i g E; g² = d γ / 2 so that a long
// weak probe transmits e^{-d} in intensity with the control off.
double coupling_constant(double optical_depth, double decay_rate);

// Throws ConfigError when the grid does not resolve the setup.
void validate_grid(const ProtocolSetup& setup);

SimulationResult simulate_protocol(const ProtocolSetup& setup);

SimulationResult simulate_protocol(const EnsembleParams& ensemble, const AtomSpecies& species,
                                   const PulseEnvelope& probe, const ControlSchedule& schedule,
                                   const SolverGrid& grid, const DecoherenceModel& decoherence);

// Columnar text: z t re_E im_E abs2_P abs2_S, one header line.
void write_field_dump(std::ostream& os, const FieldRecord& record, double medium_length);

}  // namespace atsmem
