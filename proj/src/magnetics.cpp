#include "spindimer/magnetics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spindimer/constants.hpp"

namespace spindimer {

using constants::na_mub2_over_kb;

void validate(const ClusterSpec& spec) {
  if (spec.n < 1) throw std::domain_error("ClusterSpec: n must be >= 1");
  const double twice_s = 2.0 * spec.s;
  if (!(spec.s > 0.0) ||
      std::abs(twice_s - std::round(twice_s)) > 1e-9)
    throw std::domain_error("ClusterSpec: s must be a positive half-integer");
  if (!(spec.g > 0.0) || !std::isfinite(spec.g))
    throw std::domain_error("ClusterSpec: g must be > 0");
}

double bleaney_bowers_chi(const DimerParams& params, double t_kelvin) {
  validate(params);
  if (!(t_kelvin > 0.0))
    throw std::domain_error("bleaney_bowers_chi: temperature must be > 0");
  const double arg =
      std::clamp(-2.0 * params.j_over_kb / t_kelvin, -700.0, 700.0);
  return 2.0 * na_mub2_over_kb * params.g * params.g /
         (t_kelvin * (3.0 + std::exp(arg)));
}

double powder_g(double gx, double gy, double gz) {
  if (!(gx > 0.0) || !(gy > 0.0) || !(gz > 0.0))
    throw std::domain_error("powder_g: all components must be > 0");
  return std::sqrt((gx * gx + gy * gy + gz * gz) / 3.0);
}

double curie_chi_dimer(double g, double t_kelvin) {
  if (!(t_kelvin > 0.0))
    throw std::domain_error("curie_chi_dimer: temperature must be > 0");
  if (!std::isfinite(g) || g < 0.0)
    throw std::domain_error("curie_chi_dimer: g must be >= 0");
  return na_mub2_over_kb * g * g / (2.0 * t_kelvin);
}

double curie_chi_cluster(const ClusterSpec& spec, double t_kelvin) {
  validate(spec);
  if (!(t_kelvin > 0.0))
    throw std::domain_error("curie_chi_cluster: temperature must be > 0");
  return spec.n * na_mub2_over_kb * spec.g * spec.g * spec.s * (spec.s + 1.0) /
         (3.0 * t_kelvin);
}

double lambert_w(double x) {
  const double min_x = -std::exp(-1.0);
  if (std::isnan(x) || x < min_x)
    throw std::domain_error("lambert_w: x must be >= -1/e");
  if (x == 0.0) return 0.0;

  double w;
  if (x < 0.0) {
    // Series about the branch point W(-1/e) = -1.
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    w = std::log1p(x);
  }

  for (int i = 0; i < 50; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;  // branch point
    const double denom = ew * wp1 - 0.5 * (w + 2.0) * f / wp1;
    const double step = f / denom;
    if (!std::isfinite(step)) break;
    w -= step;
    if (std::abs(step) <= 1e-14 * std::max(std::abs(w), 1e-300)) break;
  }
  return w;
}

PeakCoordinates chi_peak(const DimerParams& params) {
  validate(params);
  if (!(params.j_over_kb < 0.0))
    throw std::domain_error(
        "chi_peak: susceptibility has no maximum unless J < 0");
  static const double w3e = lambert_w(3.0 / std::exp(1.0));
  const double abs_j = -params.j_over_kb;
  PeakCoordinates peak;
  peak.t_max = 2.0 * abs_j / (1.0 + w3e);
  peak.chi_max = (w3e / 3.0) * na_mub2_over_kb * params.g * params.g / abs_j;
  return peak;
}

double te_from_tmax(double t_max_kelvin) {
  if (!(t_max_kelvin > 0.0))
    throw std::domain_error("te_from_tmax: t_max must be > 0");
  static const double ratio =
      (1.0 + lambert_w(3.0 / std::exp(1.0))) / constants::ln3;
  return ratio * t_max_kelvin;
}

ChiConcurrence concurrence_from_chi(double chi, double t_kelvin, double g) {
  if (!(t_kelvin > 0.0))
    throw std::domain_error("concurrence_from_chi: temperature must be > 0");
  const double raw = 1.0 - 1.5 * chi / curie_chi_dimer(g, t_kelvin);
  const double clamped = std::clamp(raw, 0.0, 1.0);
  return {Concurrence::from_raw(clamped), clamped != raw};
}

WitnessResult witness_chi(double chi_p, double t_kelvin,
                          const ClusterSpec& spec) {
  if (!(t_kelvin > 0.0))
    throw std::domain_error("witness_chi: temperature must be > 0");
  const double threshold =
      curie_chi_cluster(spec, t_kelvin) / (1.0 + spec.s);
  return {chi_p < threshold, threshold};
}

double mu_eff(double chi, double t_kelvin) {
  if (!(t_kelvin > 0.0))
    throw std::domain_error("mu_eff: temperature must be > 0");
  if (!(chi >= 0.0))
    throw std::domain_error("mu_eff: susceptibility must be >= 0");
  return std::sqrt(3.0 * t_kelvin * chi / na_mub2_over_kb);
}

double mu_eff_threshold(const ClusterSpec& spec) {
  validate(spec);
  return spec.g * std::sqrt(spec.n * spec.s);
}

}  // namespace spindimer
