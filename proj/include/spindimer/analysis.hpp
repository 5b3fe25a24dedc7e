#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spindimer/magnetics.hpp"

// The measurement pipeline: chi(T) curves, the dimer + Curie-Weiss impurity
// composite model, damped least-squares fitting, empirical peak location,
// the three entanglement-temperature estimators, and C(T)/E(T) profiles.

namespace spindimer {

struct CurvePoint {
  double t = 0.0;    // K
  double chi = 0.0;  // cm^3/mol (may be negative after subtraction)
  std::optional<double> sigma;
};

struct SusceptibilityCurve {
  std::vector<CurvePoint> points;  // strictly increasing t > 0
  std::string label;

  void validate() const;  // throws std::invalid_argument
  bool has_sigma() const;
};

// chi(T) = (1-p) chi_BleaneyBowers(T) + p C_imp/(T - theta), where C_imp is
// the Curie constant of the impurity cluster (mononuclear S = 1/2 sharing
// the dimer g by default). p is the fraction of the molar susceptibility
// carried by the impurity.
struct CompositeModel {
  DimerParams dimer;
  double impurity_fraction = 0.0;  // in [0, 1)
  ClusterSpec impurity{1, 0.5, 2.0};
  bool impurity_g_follows_dimer = true;
  double weiss_theta = 0.0;  // K; must stay below the data range

  ClusterSpec effective_impurity() const;
  void validate() const;
};

struct FitConfig {
  double tol = 1e-8;  // relative parameter change counted as a null step
  // Stationarity gauge: the relative parameter motion the undamped
  // Gauss-Newton step still proposes. Zero at an exact optimum; the fit
  // converges once it drops below this.
  double gradient_tol = 1e-6;
  int max_iter = 200;
  double initial_damping = 1e-3;  // x10 on rejected steps, /10 on accepted
};

// Free parameters are named "j", "g", "p", "theta".
struct FitResult {
  CompositeModel model;
  std::map<std::string, double> standard_errors;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;      // implies gradient_norm < config.gradient_tol
  double gradient_norm = 0.0;  // final Gauss-Newton relative motion
  std::string message;
};

struct TeEstimates {
  std::optional<double> from_crossing;  // chi crosses (2/3) chi_Curie
  std::optional<double> from_fit;       // Eq.-of-state T_E of the fitted J
  std::optional<double> from_peak;      // 1.4596 * empirical t_max
};

struct ProfileRow {
  double t = 0.0;
  double chi = 0.0;
  double concurrence = 0.0;
  double entanglement = 0.0;
  bool clamped = false;
};

struct EntanglementProfile {
  std::vector<ProfileRow> rows;
};

struct SubtractionResult {
  SusceptibilityCurve curve;
  int negative_points = 0;  // points driven below zero by the subtraction
};

double model_chi(const CompositeModel& model, double t_kelvin);

// Weighted Levenberg-Marquardt over the named free parameters; p is fitted
// through a logit transform so it stays in (0, 1). Non-convergence is
// reported in the result, not thrown; genuinely unusable inputs (too few
// points, theta inside the data range, unknown names) throw.
FitResult fit_curve(const SusceptibilityCurve& curve,
                    const std::set<std::string>& free,
                    const CompositeModel& init, const FitConfig& config = {});

// (chi_i - p C_imp/(t_i - theta)) / (1 - p) per point; uncertainties are
// rescaled by the same 1/(1-p).
SubtractionResult subtract_impurity(const SusceptibilityCurve& curve,
                                    const CompositeModel& model);

// Argmax sample refined by quadratic interpolation through its neighbors;
// nullopt when the maximum sits on either end of the range. Needs >= 5
// points.
std::optional<PeakCoordinates> find_peak(const SusceptibilityCurve& curve);

// The three T_E estimators. The crossing scan runs from the high-temperature
// end so the low-T impurity tail re-crossing the witness line is never
// mistaken for T_E.
TeEstimates estimate_te(const SusceptibilityCurve& curve, double g,
                        const FitResult* fitted = nullptr);

EntanglementProfile entanglement_profile(const SusceptibilityCurve& curve,
                                         double g);

// model_chi on the grid plus seeded Gaussian noise. The noise stream is a
// fixed Box-Muller over mt19937_64, so identical inputs give byte-identical
// curves on any platform. Points carry sigma = noise_sigma when it is > 0.
SusceptibilityCurve synthesize_curve(const CompositeModel& model,
                                     const std::vector<double>& grid,
                                     double noise_sigma, std::uint64_t seed);

// Default starting point when the caller has none: g = 2, J read off the
// empirical peak through t_max = 1.2472 |J|, p = 0.02, theta = 0.
CompositeModel default_initial_model(const SusceptibilityCurve& curve);

}  // namespace spindimer
