#include <cmath>
#include <vector>

#include "atsmem/parallel.hpp"
#include "atsmem/protocol_tasks.hpp"
#include "doctest.h"

using namespace atsmem;

namespace {
ProtocolSetup with_pulses(double quoted) {
  ProtocolSetup s;
  s.probe = PulseEnvelope::probe(PulseShape::gaussian, quoted, 0.0);
  s.schedule = ControlSchedule::standard(PulseShape::gaussian,
                                         PulseEnvelope::control_fwhm_from(quoted, FwhmConvention::intensity), 200e-9);
  return s;
}

// Independent oracle: dense scan of the write/read area.
double scan_best_area(const ProtocolSetup& base, int points) {
  const double area0 = pulse_area(base.schedule.write());
  const double peak0 = base.schedule.write().peak_amplitude();
  const auto effs = parallel_map(points, default_thread_count(), [&](std::size_t i) {
    const double area = constants::pi + 2.0 * constants::pi * i / (points - 1);
    return simulate_protocol(with_peak_rabi(base, peak0 * area / area0)).total_efficiency();
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < effs.size(); ++i)
    if (effs[i] > effs[best]) best = i;
  return constants::pi + 2.0 * constants::pi * best / (points - 1);
}
}  // namespace

TEST_CASE("optimizer agrees with a dense area scan") {
  const auto base = with_pulses(30e-9);
  const double peak0 = base.schedule.write().peak_amplitude();
  const auto opt = optimize_control_amplitude(base, 0.5 * peak0, 1.5 * peak0, default_thread_count());
  CHECK_FALSE(opt.multimodal);
  CHECK(std::abs(opt.pulse_area / constants::two_pi - 1.0) < 0.15);
  const double oracle = scan_best_area(base, 101);
  CHECK(std::abs(opt.pulse_area - oracle) < 2.0 * constants::two_pi / 100);
  const double at_two_pi = simulate_protocol(base).total_efficiency();
  CHECK(opt.efficiency >= at_two_pi);
}

TEST_CASE("zero-width search range evaluates once") {
  const auto base = with_pulses(30e-9);
  const double peak0 = base.schedule.write().peak_amplitude();
  const auto opt = optimize_control_amplitude(base, peak0, peak0);
  CHECK(opt.evaluations == 1);
  CHECK(opt.peak_rabi == peak0);
  CHECK(opt.pulse_area == doctest::Approx(constants::two_pi).epsilon(1e-9));
  CHECK(opt.efficiency == doctest::Approx(simulate_protocol(base).total_efficiency()).epsilon(1e-12));
}

TEST_CASE("shorter pulses need a stronger optimal control") {
  // Scan oracle for both widths; the optimizer must land on the same ratio.
  const auto b30 = with_pulses(30e-9), b20 = with_pulses(20e-9);
  const double p30 = b30.schedule.write().peak_amplitude(), p20 = b20.schedule.write().peak_amplitude();
  const auto o30 = optimize_control_amplitude(b30, 0.5 * p30, 1.5 * p30, default_thread_count());
  const auto o20 = optimize_control_amplitude(b20, 0.5 * p20, 1.5 * p20, default_thread_count());
  const double a30 = scan_best_area(b30, 41), a20 = scan_best_area(b20, 41);
  const double oracle_ratio = (a20 / a30) * (p20 / p30);
  CHECK(o20.peak_rabi / o30.peak_rabi == doctest::Approx(oracle_ratio).epsilon(0.06));
  CHECK(o20.peak_rabi > o30.peak_rabi);
}

TEST_CASE("degenerate split equals the standard recall") {
  const ProtocolSetup base;
  const std::vector<double> areas{constants::two_pi};
  const auto split = partial_readout_fractions(base, areas, 200e-9, 150e-9);
  REQUIRE(split.fractions.size() == 1);
  CHECK(split.fractions[0] == doctest::Approx(simulate_protocol(base).total_efficiency()).epsilon(1e-12));
}

TEST_CASE("three readouts give three nonzero bins") {
  const ProtocolSetup base;
  const std::vector<double> areas{0.5 * constants::pi, 0.8 * constants::pi, constants::two_pi};
  const auto split = partial_readout_fractions(base, areas, 200e-9, 150e-9);
  REQUIRE(split.fractions.size() == 3);
  for (double f : split.fractions) CHECK(f > 0.01);
  CHECK(std::abs(split.simulation.bookkeeping_sum() - 1.0) < 1e-3);
  CHECK(split.post_write_spin > 0.0);
  for (std::size_t k = 1; k <= 3; ++k)
    CHECK(std::abs(split.simulation.time[split.simulation.peak_index(k)] - split.simulation.control_centers[k]) <
          30e-9);
}

TEST_CASE("bisection-tuned two-way split") {
  const ProtocolSetup base;
  const auto tuned = tune_two_way_split(base, 200e-9, 150e-9, 0.5);
  CHECK(tuned.ratio == doctest::Approx(0.5).epsilon(0.02));
  // Oracle: rerun the full simulation at the reported area.
  const std::vector<double> areas{tuned.first_area, constants::two_pi};
  const auto check = partial_readout_fractions(base, areas, 200e-9, 150e-9);
  const double ratio = check.fractions[0] / (check.fractions[0] + check.fractions[1]);
  CHECK(std::abs(ratio - 0.5) < 0.01);
}

TEST_CASE("efficiency versus depth is thread independent") {
  const ProtocolSetup base;
  const std::vector<double> depths{2, 6, 10};
  const auto a = efficiency_vs_depth(base, depths, 1);
  const auto b = efficiency_vs_depth(base, depths, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].optical_depth == depths[i]);
    CHECK(a[i].efficiency == b[i].efficiency);
  }
  CHECK(a[2].efficiency == doctest::Approx(simulate_protocol(base).total_efficiency()).epsilon(1e-12));
}
