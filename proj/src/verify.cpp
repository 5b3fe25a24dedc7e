#include "spindimer/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "spindimer/constants.hpp"
#include "spindimer/entanglement.hpp"
#include "spindimer/magnetics.hpp"
#include "spindimer/separability.hpp"
#include "spindimer/spin_core.hpp"

namespace spindimer {

namespace {

// Printed reference constants truncate rather than round, so compare the
// truncation.
bool truncated_matches(double value, double printed, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::floor(value * scale) / scale == printed;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = (rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

CheckResult check_peak_constants() {
  CheckResult res{"lambert-w peak constants", false, ""};
  const double w = lambert_w(3.0 / std::exp(1.0));
  const double tmax_ratio = 2.0 / (1.0 + w);
  const double chimax_ratio = w / 3.0;
  const double te_ratio = (1.0 + w) / constants::ln3;
  std::ostringstream detail;
  detail << tmax_ratio << " / " << chimax_ratio << " / " << te_ratio;
  res.detail = detail.str();
  res.pass = truncated_matches(tmax_ratio, 1.2472, 4) &&
             truncated_matches(chimax_ratio, 0.2011, 4) &&
             truncated_matches(te_ratio, 1.4596, 4);
  return res;
}

CheckResult check_lambert_w_property(bool fine) {
  CheckResult res{"lambert-w defining property", false, ""};
  const int n = fine ? 2000 : 200;
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    // log-spaced positives plus a linear band just above the branch point
    const double x_pos = std::pow(10.0, -6.0 + 12.0 * i / n);
    const double x_neg =
        -std::exp(-1.0) + 1e-6 + (std::exp(-1.0) - 1e-6) * i / n;
    for (double x : {x_pos, x_neg}) {
      const double w = lambert_w(x);
      const double rel =
          std::abs(w * std::exp(w) - x) / std::max(std::abs(x), 1e-300);
      worst = std::max(worst, rel);
    }
  }
  std::ostringstream detail;
  detail << "max relative residual " << worst;
  res.detail = detail.str();
  res.pass = worst < 1e-12;
  return res;
}

CheckResult check_crossing_identity() {
  CheckResult res{"curie crossing identity at T_E", false, ""};
  std::mt19937_64 rng(0x5eedc0de);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    DimerParams params{uniform(rng, -300.0, -0.5), uniform(rng, 1.5, 2.5)};
    const double te = *entanglement_temperature(params);
    const double lhs = bleaney_bowers_chi(params, te);
    const double rhs = (2.0 / 3.0) * curie_chi_dimer(params.g, te);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  std::ostringstream detail;
  detail << "max relative mismatch " << worst << " over 100 draws";
  res.detail = detail.str();
  res.pass = worst < 1e-10;
  return res;
}

CheckResult check_decomposition(CanonicalDecomposition kind, LimitState state,
                                const char* name,
                                std::optional<int> perturb_term) {
  CheckResult res{name, false, ""};
  ProductDecomposition decomp = canonical_decomposition(kind);
  if (perturb_term) {
    const int term = *perturb_term;
    if (term < 0 || term >= static_cast<int>(decomp.terms.size())) {
      res.detail = "perturbation index out of range";
      return res;
    }
    decomp.terms[term].weight -= 0.2;
  }
  const DecompositionReport report =
      verify_decomposition(decomp, limit_state(state), 1e-14);
  std::ostringstream detail;
  detail << "max residual " << report.max_abs_residual;
  if (!report.detail.empty()) detail << "; " << report.detail;
  if (report.ok) {
    const double c = concurrence_wootters(reconstruct(decomp)).value();
    detail << "; concurrence " << c;
    res.pass = c <= 1e-12;
  }
  res.detail = detail.str();
  return res;
}

CheckResult check_zeeman_oracle(bool fine) {
  CheckResult res{"zeeman oracle vs bleaney-bowers", false, ""};
  const int nj = fine ? 41 : 11;
  const int nt = fine ? 40 : 12;
  double worst = 0.0;
  for (int a = 0; a < nj; ++a) {
    const double j = -200.0 + 400.0 * a / (nj - 1);
    const DimerParams params{j, 2.0};
    for (int b = 0; b < nt; ++b) {
      const double t = std::pow(10.0, -1.0 + 4.0 * b / (nt - 1));
      const double closed = bleaney_bowers_chi(params, t);
      const double numeric = susceptibility_numeric(params, t, 1.0);
      worst = std::max(worst, std::abs(numeric - closed) /
                                  std::max(std::abs(closed), 1e-30));
    }
  }
  std::ostringstream detail;
  detail << "max relative mismatch " << worst << " on " << nj << "x" << nt
         << " grid";
  res.detail = detail.str();
  res.pass = worst < 1e-6;
  return res;
}

CheckResult check_wootters_oracle(bool fine) {
  CheckResult res{"wootters vs block-form concurrence", false, ""};
  const int n = fine ? 5000 : 500;
  std::mt19937_64 rng(0xab5c0ffe);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    // Random block-form state: floored exponential diagonal weights, center
    // coherence bounded by the PSD condition |w| <= sqrt(x1 x2).
    double d[4];
    double sum = 0.0;
    for (double& v : d) {
      v = -std::log(std::max(uniform(rng, 0.0, 1.0), 1e-16)) + 1e-3;
      sum += v;
    }
    for (double& v : d) v /= sum;
    const double mag = uniform(rng, 0.0, 1.0) * std::sqrt(d[1] * d[2]);
    const double phase = uniform(rng, 0.0, 2.0 * 3.141592653589793);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = d[0];
    m(1, 1) = d[1];
    m(2, 2) = d[2];
    m(3, 3) = d[3];
    m(1, 2) = std::polar(mag, phase);
    m(2, 1) = std::conj(m(1, 2));
    const DensityMatrix4 rho = DensityMatrix4::checked(m);
    const double diff = std::abs(concurrence_x_form(rho).value() -
                                 concurrence_wootters(rho).value());
    worst = std::max(worst, diff);
  }
  std::ostringstream detail;
  detail << "max |difference| " << worst << " on " << n << " states";
  res.detail = detail.str();
  res.pass = worst < 1e-10;
  return res;
}

CheckResult check_thermal_limits() {
  CheckResult res{"thermal-state limits", false, ""};
  const DimerParams afm{-68.0, 2.0};
  const DimerParams fm{68.0, 2.0};
  const double te = *entanglement_temperature(afm);
  auto residual = [](const DensityMatrix4& a, const DensityMatrix4& b) {
    return (a.mat() - b.mat()).cwiseAbs().maxCoeff();
  };
  const double r0 = residual(thermal_state(afm, 1e-3),
                             limit_state(LimitState::zero_temp_afm));
  const double rinf = residual(thermal_state(afm, 1e12),
                               limit_state(LimitState::infinite_temp));
  const double rte =
      residual(thermal_state(afm, te), limit_state(LimitState::at_te));
  const double rtrip = residual(thermal_state(fm, 1e-3),
                                limit_state(LimitState::triplet_mixed));
  std::ostringstream detail;
  detail << "residuals " << r0 << " / " << rinf << " / " << rte << " / "
         << rtrip;
  res.detail = detail.str();
  res.pass = r0 < 1e-9 && rinf < 1e-9 && rte < 1e-10 && rtrip < 1e-9;
  return res;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  std::vector<CheckResult> results;
  results.push_back(check_peak_constants());
  results.push_back(check_lambert_w_property(options.fine_grid));
  results.push_back(check_crossing_identity());
  results.push_back(check_decomposition(CanonicalDecomposition::at_te,
                                        LimitState::at_te,
                                        "product decomposition (T_E state)",
                                        options.perturb_term));
  results.push_back(check_decomposition(
      CanonicalDecomposition::triplet_mixed, LimitState::triplet_mixed,
      "product decomposition (mixed triplet)", std::nullopt));
  results.push_back(check_zeeman_oracle(options.fine_grid));
  results.push_back(check_wootters_oracle(options.fine_grid));
  results.push_back(check_thermal_limits());
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace spindimer
