#include "spindimer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "spindimer/constants.hpp"

namespace spindimer {

void SusceptibilityCurve::validate() const {
  if (points.empty())
    throw std::invalid_argument("SusceptibilityCurve: no points");
  double prev_t = 0.0;
  std::size_t with_sigma = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CurvePoint& p = points[i];
    if (!(p.t > prev_t) || !std::isfinite(p.t))
      throw std::invalid_argument(
          "SusceptibilityCurve: temperatures must be strictly increasing "
          "and > 0");
    if (!std::isfinite(p.chi))
      throw std::invalid_argument("SusceptibilityCurve: non-finite chi");
    if (p.sigma) {
      if (!(*p.sigma > 0.0))
        throw std::invalid_argument("SusceptibilityCurve: sigma must be > 0");
      ++with_sigma;
    }
    prev_t = p.t;
  }
  if (with_sigma != 0 && with_sigma != points.size())
    throw std::invalid_argument(
        "SusceptibilityCurve: sigma must be given for all points or none");
}

bool SusceptibilityCurve::has_sigma() const {
  return !points.empty() && points.front().sigma.has_value();
}

ClusterSpec CompositeModel::effective_impurity() const {
  ClusterSpec spec = impurity;
  if (impurity_g_follows_dimer) spec.g = dimer.g;
  return spec;
}

void CompositeModel::validate() const {
  spindimer::validate(dimer);
  if (!(impurity_fraction >= 0.0) || !(impurity_fraction < 1.0))
    throw std::domain_error("CompositeModel: impurity fraction must be in [0, 1)");
  if (!std::isfinite(weiss_theta))
    throw std::domain_error("CompositeModel: Weiss theta must be finite");
  if (impurity_fraction > 0.0) spindimer::validate(effective_impurity());
}

double model_chi(const CompositeModel& model, double t_kelvin) {
  if (!(t_kelvin > 0.0))
    throw std::domain_error("model_chi: temperature must be > 0");
  if (t_kelvin == model.weiss_theta)
    throw std::domain_error("model_chi: temperature hits the Weiss pole");
  const double p = model.impurity_fraction;
  double chi = (1.0 - p) * bleaney_bowers_chi(model.dimer, t_kelvin);
  if (p > 0.0) {
    const double curie_const = curie_chi_cluster(model.effective_impurity(), 1.0);
    chi += p * curie_const / (t_kelvin - model.weiss_theta);
  }
  return chi;
}

namespace {

const std::vector<std::string> kParamOrder = {"j", "g", "p", "theta"};

double logit(double p) {
  const double clamped = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(clamped / (1.0 - clamped));
}

double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double get_internal(const CompositeModel& m, const std::string& name) {
  if (name == "j") return m.dimer.j_over_kb;
  if (name == "g") return m.dimer.g;
  if (name == "p") return logit(m.impurity_fraction);
  return m.weiss_theta;  // "theta"
}

void set_internal(CompositeModel& m, const std::string& name, double x) {
  if (name == "j")
    m.dimer.j_over_kb = x;
  else if (name == "g")
    m.dimer.g = x;
  else if (name == "p")
    m.impurity_fraction = inv_logit(x);
  else
    m.weiss_theta = x;
}

// Derivative of the external parameter w.r.t. its internal coordinate, for
// converting standard errors back.
double external_scale(const CompositeModel& m, const std::string& name) {
  if (name == "p")
    return m.impurity_fraction * (1.0 - m.impurity_fraction);
  return 1.0;
}

// Deterministic Gaussian stream: Box-Muller over raw mt19937_64 bits. The
// standard normal_distribution sequence is implementation-defined, which
// would break the byte-identical-fixture contract.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

FitResult fit_curve(const SusceptibilityCurve& curve,
                    const std::set<std::string>& free,
                    const CompositeModel& init, const FitConfig& config) {
  curve.validate();
  init.validate();
  for (const std::string& name : free)
    if (std::find(kParamOrder.begin(), kParamOrder.end(), name) ==
        kParamOrder.end())
      throw std::invalid_argument("fit_curve: unknown parameter '" + name +
                                  "'");

  std::vector<std::string> names;
  for (const std::string& name : kParamOrder)
    if (free.count(name)) names.push_back(name);

  const int n = static_cast<int>(curve.points.size());
  const int k = static_cast<int>(names.size());
  const double t_min = curve.points.front().t;
  if (!(init.weiss_theta < t_min))
    throw std::invalid_argument(
        "fit_curve: Weiss theta must lie below the data range");

  FitResult result;
  result.model = init;

  // Weighted residuals; false when the trial model is unusable.
  auto residuals = [&](const CompositeModel& m, Eigen::VectorXd& r) -> bool {
    if (!(m.weiss_theta < t_min)) return false;
    try {
      for (int i = 0; i < n; ++i) {
        const CurvePoint& pt = curve.points[i];
        const double sigma = pt.sigma.value_or(1.0);
        r[i] = (pt.chi - model_chi(m, pt.t)) / sigma;
        if (!std::isfinite(r[i])) return false;
      }
    } catch (const std::exception&) {
      return false;
    }
    return true;
  };

  Eigen::VectorXd r(n);
  if (!residuals(init, r))
    throw std::invalid_argument("fit_curve: initial model cannot be evaluated");
  double cost = r.squaredNorm();

  if (k == 0) {
    result.rss = cost;
    result.converged = true;
    result.message = "no free parameters";
    return result;
  }
  if (n < k + 1) throw std::invalid_argument("fit_curve: insufficient points");

  Eigen::VectorXd x(k);
  for (int a = 0; a < k; ++a) x[a] = get_internal(init, names[a]);

  const CompositeModel base = init;  // holds the frozen parameters
  auto to_model = [&](const Eigen::VectorXd& xs) {
    CompositeModel m = base;
    for (int a = 0; a < k; ++a) set_internal(m, names[a], xs[a]);
    return m;
  };

  // Central-difference Jacobian of the weighted residuals.
  auto jacobian = [&](const Eigen::VectorXd& xs, Eigen::MatrixXd& jac) -> bool {
    Eigen::VectorXd rp(n), rm(n);
    for (int a = 0; a < k; ++a) {
      double h = 1e-6 * std::max(1.0, std::abs(xs[a]));
      bool ok = false;
      for (int shrink = 0; shrink < 4 && !ok; ++shrink, h *= 0.1) {
        Eigen::VectorXd xp = xs, xm = xs;
        xp[a] += h;
        xm[a] -= h;
        ok = residuals(to_model(xp), rp) && residuals(to_model(xm), rm);
        if (ok) jac.col(a) = (rp - rm) / (2.0 * h);
      }
      if (!ok) return false;
    }
    return true;
  };

  // Stationarity gauge: the undamped Gauss-Newton step, expressed as the
  // largest relative parameter motion it proposes. Dimensionless, scale
  // free, and zero exactly at a least-squares stationary point.
  auto newton_motion = [&](const Eigen::MatrixXd& jtj,
                           const Eigen::VectorXd& gradient,
                           const Eigen::VectorXd& at,
                           Eigen::VectorXd& step) {
    step = jtj.ldlt().solve(-gradient);
    if (!step.allFinite()) return std::numeric_limits<double>::infinity();
    double rel = 0.0;
    for (int a = 0; a < k; ++a)
      rel = std::max(rel, std::abs(step[a]) / std::max(1.0, std::abs(at[a])));
    return rel;
  };

  double damping = config.initial_damping;
  bool converged = false;
  int iter = 0;
  int small_steps = 0;  // consecutive accepted steps below tol
  std::string message;
  Eigen::MatrixXd jac(n, k);
  double remaining = std::numeric_limits<double>::infinity();

  for (iter = 0; iter < config.max_iter; ++iter) {
    if (!jacobian(x, jac)) {
      message = "Jacobian evaluation failed";
      break;
    }
    const Eigen::VectorXd gradient = jac.transpose() * r;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd newton_step(k);
    remaining = newton_motion(jtj, gradient, x, newton_step);
    if (remaining < config.gradient_tol) {
      // Stationary. Take the measured Newton step as a final polish when it
      // still helps, so the answer sits at the quadratic floor rather than
      // gradient_tol away from it.
      Eigen::VectorXd r_polish(n);
      if (residuals(to_model(x + newton_step), r_polish) &&
          r_polish.squaredNorm() <= cost) {
        x += newton_step;
        r = r_polish;
        cost = r_polish.squaredNorm();
      }
      converged = true;
      break;
    }
    if (small_steps >= 3) {
      message =
          "stalled: parameter changes below tol away from a stationary point";
      break;
    }
    const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    for (int escalation = 0; escalation < 60; ++escalation) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += damping * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      const Eigen::VectorXd x_try = x + step;
      Eigen::VectorXd r_try(n);
      if (!residuals(to_model(x_try), r_try)) {
        damping *= 10.0;
        continue;
      }
      const double cost_try = r_try.squaredNorm();
      if (cost_try <= cost) {
        double rel_change = 0.0;
        for (int a2 = 0; a2 < k; ++a2)
          rel_change = std::max(
              rel_change, std::abs(step[a2]) / std::max(1.0, std::abs(x[a2])));
        x = x_try;
        r = r_try;
        cost = cost_try;
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        small_steps = (rel_change < config.tol) ? small_steps + 1 : 0;
        break;
      }
      damping *= 10.0;
      if (damping > 1e14) break;
    }
    if (!accepted) {
      message = "step rejected through the whole damping escalation";
      break;
    }
  }
  if (iter == config.max_iter && !converged)
    message = "maximum iterations reached";

  result.model = to_model(x);
  result.rss = cost;
  result.iterations = iter;
  result.converged = converged;
  result.gradient_norm = remaining;
  result.message = message;

  // Standard errors from the local quadratic model at the solution.
  if (jacobian(x, jac)) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition()
                                    .pseudoInverse();
    const double s2 =
        curve.has_sigma() ? 1.0 : cost / std::max(1, n - k);
    for (int a = 0; a < k; ++a) {
      const double var = std::max(0.0, s2 * cov(a, a));
      result.standard_errors[names[a]] =
          std::sqrt(var) * external_scale(result.model, names[a]);
    }
  }
  return result;
}

SubtractionResult subtract_impurity(const SusceptibilityCurve& curve,
                                    const CompositeModel& model) {
  curve.validate();
  model.validate();
  const double p = model.impurity_fraction;
  if (!(p < 1.0)) throw std::domain_error("subtract_impurity: p must be < 1");
  if (!(model.weiss_theta < curve.points.front().t))
    throw std::domain_error(
        "subtract_impurity: Weiss theta must lie below the data range");

  SubtractionResult out;
  out.curve = curve;
  if (p == 0.0) return out;

  const double curie_const = curie_chi_cluster(model.effective_impurity(), 1.0);
  for (CurvePoint& pt : out.curve.points) {
    const double impurity = p * curie_const / (pt.t - model.weiss_theta);
    pt.chi = (pt.chi - impurity) / (1.0 - p);
    if (pt.sigma) pt.sigma = *pt.sigma / (1.0 - p);
    if (pt.chi < 0.0) ++out.negative_points;
  }
  return out;
}

std::optional<PeakCoordinates> find_peak(const SusceptibilityCurve& curve) {
  curve.validate();
  const auto& pts = curve.points;
  if (pts.size() < 5)
    throw std::domain_error("find_peak: need at least 5 points");

  std::size_t im = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].chi > pts[im].chi) im = i;
  if (im == 0 || im + 1 == pts.size()) return std::nullopt;

  // Local polynomial refinement around the argmax sample. Measured grids
  // are coarse and noisy: a raw argmax quantizes t_max and a bare 3-point
  // parabola chases single-point noise, while a wide parabola inherits the
  // peak's skew. A cubic over a +-30% temperature window handles both.
  const double t0 = pts[im].t;
  const double window = 0.3 * t0;
  std::size_t lo = im, hi = im;
  while (lo > 0 && pts[lo - 1].t >= t0 - window) --lo;
  while (hi + 1 < pts.size() && pts[hi + 1].t <= t0 + window) ++hi;
  lo = std::min(lo, im - 1);
  hi = std::max(hi, im + 1);

  const int m = static_cast<int>(hi - lo + 1);
  const int degree = m >= 5 ? 3 : 2;
  Eigen::MatrixXd design(m, degree + 1);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double dt = pts[lo + i].t - t0;
    double pw = 1.0;
    for (int d = 0; d <= degree; ++d) {
      design(i, d) = pw;
      pw *= dt;
    }
    y[i] = pts[lo + i].chi;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c.head(degree + 1) = design.colPivHouseholderQr().solve(y);

  // Local maximum of the fitted polynomial nearest the argmax sample.
  double dt_star = 0.0;
  bool have_root = false;
  const double qa = 3.0 * c[3], qb = 2.0 * c[2], qc = c[1];
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (double cand : {(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)})
        if (2.0 * c[2] + 6.0 * c[3] * cand < 0.0 &&
            (!have_root || std::abs(cand) < std::abs(dt_star))) {
          dt_star = cand;
          have_root = true;
        }
    }
  } else if (c[2] < 0.0) {
    dt_star = -c[1] / (2.0 * c[2]);
    have_root = true;
  }
  if (!have_root) return PeakCoordinates{pts[im].t, pts[im].chi};

  dt_star = std::clamp(dt_star, pts[lo].t - t0, pts[hi].t - t0);
  double chi_star = 0.0, pw = 1.0;
  for (int d = 0; d <= degree; ++d) {
    chi_star += c[d] * pw;
    pw *= dt_star;
  }
  return PeakCoordinates{t0 + dt_star, chi_star};
}

TeEstimates estimate_te(const SusceptibilityCurve& curve, double g,
                        const FitResult* fitted) {
  curve.validate();
  TeEstimates te;

  // Deficit against the (2/3) Curie witness line; scan high T -> low T for
  // the first positive-to-nonpositive sign change.
  const auto& pts = curve.points;
  std::vector<double> deficit(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    deficit[i] = pts[i].chi - (2.0 / 3.0) * curie_chi_dimer(g, pts[i].t);
  for (std::size_t i = pts.size(); i-- > 1;) {
    if (deficit[i] > 0.0 && deficit[i - 1] <= 0.0) {
      const double t0 = pts[i - 1].t, t1 = pts[i].t;
      const double f0 = deficit[i - 1], f1 = deficit[i];
      te.from_crossing = t0 - f0 * (t1 - t0) / (f1 - f0);
      break;
    }
  }

  if (fitted) te.from_fit = entanglement_temperature(fitted->model.dimer);

  if (pts.size() >= 5) {
    if (const auto peak = find_peak(curve))
      te.from_peak = te_from_tmax(peak->t_max);
  }
  return te;
}

EntanglementProfile entanglement_profile(const SusceptibilityCurve& curve,
                                         double g) {
  curve.validate();
  EntanglementProfile profile;
  profile.rows.reserve(curve.points.size());
  for (const CurvePoint& pt : curve.points) {
    const ChiConcurrence c = concurrence_from_chi(pt.chi, pt.t, g);
    ProfileRow row;
    row.t = pt.t;
    row.chi = pt.chi;
    row.concurrence = c.value.value();
    row.entanglement = entanglement_of_formation(c.value);
    row.clamped = c.clamped;
    profile.rows.push_back(row);
  }
  return profile;
}

SusceptibilityCurve synthesize_curve(const CompositeModel& model,
                                     const std::vector<double>& grid,
                                     double noise_sigma, std::uint64_t seed) {
  model.validate();
  if (!(noise_sigma >= 0.0))
    throw std::domain_error("synthesize_curve: noise sigma must be >= 0");

  SusceptibilityCurve curve;
  curve.label = "synthetic";
  GaussianSampler gauss(seed);
  for (double t : grid) {
    CurvePoint pt;
    pt.t = t;
    pt.chi = model_chi(model, t);
    if (noise_sigma > 0.0) {
      pt.chi += noise_sigma * gauss.next();
      pt.sigma = noise_sigma;
    }
    curve.points.push_back(pt);
  }
  curve.validate();  // rejects invalid grids
  return curve;
}

CompositeModel default_initial_model(const SusceptibilityCurve& curve) {
  curve.validate();
  CompositeModel init;
  init.dimer.g = 2.0;
  init.impurity_fraction = 0.02;
  init.weiss_theta = 0.0;

  static const double t_max_over_abs_j =
      2.0 / (1.0 + lambert_w(3.0 / std::exp(1.0)));
  std::optional<PeakCoordinates> peak;
  if (curve.points.size() >= 5) peak = find_peak(curve);
  if (peak)
    init.dimer.j_over_kb = -peak->t_max / t_max_over_abs_j;
  else  // no interior maximum to anchor on; start from the range midpoint
    init.dimer.j_over_kb = -0.5 * curve.points.back().t / t_max_over_abs_j;
  return init;
}

}  // namespace spindimer
