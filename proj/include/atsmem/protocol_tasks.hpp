#pragma once

#include <span>
#include <vector>

#include "atsmem/solver.hpp"

namespace atsmem {

struct ControlOptimum {
  double peak_rabi = 0.0;    // rad/s, common peak of write and readouts
  double efficiency = 0.0;   // total recalled fraction
  double pulse_area = 0.0;   // area of the write pulse at the optimum
  bool multimodal = false;   // coarse scan found more than one local maximum
  int evaluations = 0;
};

// Scales every control pulse of base to a common peak Rabi frequency.
ProtocolSetup with_peak_rabi(const ProtocolSetup& base, double peak_rabi);

// 1-D maximization of the total efficiency over the control peak Rabi
// frequency in [lo, hi]: coarse scan for a bracket, then golden-section
// search to 0.1 % relative resolution.
ControlOptimum optimize_control_amplitude(const ProtocolSetup& base, double lo, double hi,
                                          unsigned threads = 1);

struct SplitResult {
  std::vector<double> fractions;      // recalled energy per readout
  double transmitted = 0.0;
  double residual_spin = 0.0;         // after the final readout
  double post_write_spin = 0.0;
  SimulationResult simulation;

  double residual_ratio() const { return post_write_spin > 0 ? residual_spin / post_write_spin : 0.0; }
};

// Temporal beam splitter: readouts at first_delay, first_delay + spacing, ...
// relative to the write pulse, with the given areas (the last must be 2π).
SplitResult partial_readout_fractions(const ProtocolSetup& base, std::span<const double> areas,
                                      double first_delay, double spacing);

struct SplitTuning {
  double first_area = 0.0;
  double ratio = 0.0;  // E1 / (E1 + E2)
  SplitResult result;
  int iterations = 0;
};

// Bisection over the area of the first of two readouts so that the first bin
// carries target_ratio of the recalled energy.
SplitTuning tune_two_way_split(const ProtocolSetup& base, double first_delay, double spacing,
                               double target_ratio = 0.5, double tolerance = 1e-4);

struct DepthPoint {
  double optical_depth = 0.0;
  double efficiency = 0.0;
  double transmitted = 0.0;
};

std::vector<DepthPoint> efficiency_vs_depth(const ProtocolSetup& base, std::span<const double> depths,
                                            unsigned threads = 1);

}  // namespace atsmem
