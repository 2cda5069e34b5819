#include "atsmem/protocol_tasks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atsmem/errors.hpp"
#include "atsmem/parallel.hpp"

namespace atsmem {

ProtocolSetup with_peak_rabi(const ProtocolSetup& base, double peak_rabi) {
  ProtocolSetup s = base;
  const double current = base.schedule.write().peak_amplitude();
  if (!(current > 0.0)) throw ConfigError("base schedule has a zero write amplitude");
  s.schedule = base.schedule.amplitude_scaled(peak_rabi / current);
  return s;
}

ControlOptimum optimize_control_amplitude(const ProtocolSetup& base, double lo, double hi,
                                          unsigned threads) {
  require_finite(lo, "search lower bound");
  require_finite(hi, "search upper bound");
  if (!(lo > 0.0) || hi < lo) throw ConfigError("search range must satisfy 0 < lo <= hi");

  ControlOptimum best;
  auto evaluate = [&](double peak) { return simulate_protocol(with_peak_rabi(base, peak)).total_efficiency(); };
  auto consider = [&](double peak, double eff) {
    ++best.evaluations;
    if (eff > best.efficiency || best.evaluations == 1) {
      best.efficiency = eff;
      best.peak_rabi = peak;
    }
  };

  if (hi == lo) {
    consider(lo, evaluate(lo));
  } else {
    constexpr int kCoarse = 9;
    std::vector<double> xs(kCoarse);
    for (int i = 0; i < kCoarse; ++i) xs[i] = lo + (hi - lo) * i / (kCoarse - 1);
    const auto ys = parallel_map(xs.size(), threads, [&](std::size_t i) { return evaluate(xs[i]); });
    for (int i = 0; i < kCoarse; ++i) consider(xs[i], ys[i]);

    int maxima = 0;
    for (int i = 0; i < kCoarse; ++i) {
      const bool left_ok = i == 0 || ys[i] > ys[i - 1];
      const bool right_ok = i == kCoarse - 1 || ys[i] >= ys[i + 1];
      if (left_ok && right_ok) ++maxima;
    }
    best.multimodal = maxima > 1;

    if (!best.multimodal) {
      const auto i_best = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
      double a = xs[std::max(i_best - 1, 0)];
      double b = xs[std::min(i_best + 1, kCoarse - 1)];
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - inv_phi * (b - a);
      double d = a + inv_phi * (b - a);
      double fc = evaluate(c), fd = evaluate(d);
      consider(c, fc);
      consider(d, fd);
      while (b - a > 1e-3 * 0.5 * (a + b)) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - inv_phi * (b - a);
          fc = evaluate(c);
          consider(c, fc);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + inv_phi * (b - a);
          fd = evaluate(d);
          consider(d, fd);
        }
      }
    }
  }
  best.pulse_area = pulse_area(base.schedule.write().with_peak(best.peak_rabi));
  return best;
}

SplitResult partial_readout_fractions(const ProtocolSetup& base, std::span<const double> areas,
                                      double first_delay, double spacing) {
  if (areas.empty()) throw ConfigError("beam splitter needs at least one readout area");
  if (!(first_delay > 0.0) || !(spacing > 0.0)) throw ConfigError("readout delays must be > 0");
  const auto& w = base.schedule.write();
  std::vector<double> centers;
  for (std::size_t k = 0; k < areas.size(); ++k)
    centers.push_back(w.center_time() + first_delay + spacing * static_cast<double>(k));

  ProtocolSetup s = base;
  s.schedule = ControlSchedule::from_areas(w.shape(), w.fwhm(), w.center_time(), pulse_area(w), centers,
                                           std::vector<double>(areas.begin(), areas.end()));
  SplitResult out;
  out.simulation = simulate_protocol(s);
  out.fractions = out.simulation.efficiency_per_readout;
  out.transmitted = out.simulation.transmitted_fraction;
  out.residual_spin = out.simulation.residual_spin_norm;
  out.post_write_spin = out.simulation.post_write_spin_norm;
  return out;
}

SplitTuning tune_two_way_split(const ProtocolSetup& base, double first_delay, double spacing,
                               double target_ratio, double tolerance) {
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) throw ConfigError("target_ratio must lie in (0, 1)");
  auto run = [&](double area) {
    const double areas[] = {area, constants::two_pi};
    auto r = partial_readout_fractions(base, areas, first_delay, spacing);
    const double total = r.fractions[0] + r.fractions[1];
    const double ratio = total > 0.0 ? r.fractions[0] / total : 0.0;
    return std::pair{ratio, std::move(r)};
  };

  double lo = 1e-3 * constants::two_pi;
  double hi = constants::two_pi;
  auto [r_lo, res_lo] = run(lo);
  auto [r_hi, res_hi] = run(hi);
  if (!((r_lo - target_ratio) * (r_hi - target_ratio) <= 0.0))
    throw ConfigError("split ratio " + std::to_string(target_ratio) + " is not bracketed by first areas in (0, 2pi]");

  SplitTuning t;
  t.first_area = hi;
  t.ratio = r_hi;
  t.result = std::move(res_hi);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [r_mid, res_mid] = run(mid);
    t.iterations = it + 1;
    t.first_area = mid;
    t.ratio = r_mid;
    t.result = std::move(res_mid);
    if (std::abs(r_mid - target_ratio) <= tolerance) break;
    if ((r_lo - target_ratio) * (r_mid - target_ratio) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      r_lo = r_mid;
    }
  }
  return t;
}

std::vector<DepthPoint> efficiency_vs_depth(const ProtocolSetup& base, std::span<const double> depths,
                                            unsigned threads) {
  return parallel_map(depths.size(), threads, [&](std::size_t i) {
    ProtocolSetup s = base;
    s.ensemble = base.ensemble.with_optical_depth(depths[i]);
    const auto r = simulate_protocol(s);
    return DepthPoint{depths[i], r.total_efficiency(), r.transmitted_fraction};
  });
}

}  // namespace atsmem
