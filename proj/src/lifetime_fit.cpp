#include <cmath>
#include <string>

#include "atsmem/decoherence.hpp"
#include "atsmem/errors.hpp"

namespace atsmem {

LifetimeFit fit_exponential_lifetime(std::span<const LifetimeSample> samples) {
  if (samples.size() < 3) throw FitError("lifetime fit needs at least 3 samples");

  bool weighted = true;
  for (const auto& s : samples) {
    require_finite(s.time, "sample time");
    require_finite(s.efficiency, "sample efficiency");
    if (s.efficiency <= 0.0)
      throw DomainError("lifetime fit needs efficiencies > 0 (got " + std::to_string(s.efficiency) + ")");
    if (!s.sigma || !(*s.sigma > 0.0)) weighted = false;
  }

  // Linear model y = a + b t with y = ln η, a = ln η₀, b = -1/τ.
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& s : samples) {
    const double y = std::log(s.efficiency);
    // d(ln η) = dη / η
    const double w = weighted ? std::pow(s.efficiency / *s.sigma, 2) : 1.0;
    sw += w;
    st += w * s.time;
    sy += w * y;
    stt += w * s.time * s.time;
    sty += w * s.time * y;
  }
  const double det = sw * stt - st * st;
  if (!(std::abs(det) > 1e-12 * sw * stt)) throw FitError("degenerate design: sample times coincide");

  const double a = (stt * sy - st * sty) / det;
  const double b = (sw * sty - st * sy) / det;
  if (!(b < 0.0)) throw FitError("efficiency does not decay over the samples");

  double chi2 = 0.0;
  for (const auto& s : samples) {
    const double w = weighted ? std::pow(s.efficiency / *s.sigma, 2) : 1.0;
    const double r = std::log(s.efficiency) - (a + b * s.time);
    chi2 += w * r * r;
  }
  const int dof = static_cast<int>(samples.size()) - 2;
  // Unweighted: scale the covariance by the residual variance.
  const double scale = weighted ? 1.0 : chi2 / dof;
  const double var_a = scale * stt / det;
  const double var_b = scale * sw / det;

  LifetimeFit fit;
  fit.eta0 = std::exp(a);
  fit.tau = -1.0 / b;
  fit.eta0_stderr = fit.eta0 * std::sqrt(var_a);
  fit.tau_stderr = std::sqrt(var_b) / (b * b);
  fit.chi2 = chi2;
  fit.dof = dof;
  fit.weighted = weighted;
  return fit;
}

double two_point_lifetime(const LifetimeSample& a, const LifetimeSample& b) {
  if (a.efficiency <= 0.0 || b.efficiency <= 0.0) throw DomainError("efficiencies must be > 0");
  if (a.time == b.time) throw FitError("two-point lifetime needs distinct times");
  const double ratio = std::log(a.efficiency / b.efficiency);
  if (ratio == 0.0) throw FitError("no decay between the two samples");
  return (b.time - a.time) / ratio;
}

}  // namespace atsmem
