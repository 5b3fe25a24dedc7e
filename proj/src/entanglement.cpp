#include "spindimer/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "spindimer/constants.hpp"

namespace spindimer {

namespace {

constexpr double kXFormTol = 1e-10;
constexpr double kOvershootWarn = 1e-9;

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

}  // namespace

Concurrence Concurrence::from_raw(double value) {
  if (value < -kOvershootWarn || value > 1.0 + kOvershootWarn)
    std::cerr << "spindimer: concurrence " << value
              << " outside [0, 1] beyond rounding noise; clamping\n";
  return Concurrence(std::clamp(value, 0.0, 1.0));
}

Concurrence concurrence_x_form(const DensityMatrix4& rho) {
  const Eigen::Matrix4cd& m = rho.mat();
  // Forbidden entries of the block form (upper triangle; hermiticity covers
  // the conjugates).
  const std::pair<int, int> forbidden[] = {
      {0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}};
  for (const auto& [r, c] : forbidden) {
    if (std::abs(m(r, c)) > kXFormTol || std::abs(m(c, r)) > kXFormTol)
      throw std::invalid_argument(
          "concurrence_x_form: density matrix is not in block (X) form");
  }
  const double u = std::max(0.0, m(0, 0).real());
  const double v = std::max(0.0, m(3, 3).real());
  const double w = std::abs(m(1, 2));
  return Concurrence::from_raw(2.0 * std::max(w - std::sqrt(u * v), 0.0));
}

Concurrence concurrence_wootters(const DensityMatrix4& rho) {
  const Eigen::Matrix4cd& m = rho.mat();
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();  // sigma_y (x) sigma_y
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Eigen::Matrix4cd spin_flipped = yy * m.conjugate() * yy;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m * spin_flipped, false);
  // ||rho rho~|| <= 1, so eigenvalues below ~1e-15 are indistinguishable
  // from the solver's rounding noise; sqrt would amplify that noise to the
  // 1e-8 scale (visible on pure product states, where the true spectrum is
  // identically zero). Treat them as exact zeros.
  constexpr double noise_floor = 1e-15;
  std::array<double, 4> roots{};
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) > 1e-8)
      throw std::runtime_error(
          "concurrence_wootters: eigenvalue of rho*rho~ has a large "
          "imaginary part");
    roots[i] = ev.real() > noise_floor ? std::sqrt(ev.real()) : 0.0;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  const double c = roots[0] - roots[1] - roots[2] - roots[3];
  return Concurrence::from_raw(std::max(0.0, c));
}

double entanglement_of_formation(Concurrence c) {
  const double cc = c.value();
  const double p = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - cc * cc)));
  return binary_entropy(p);
}

Concurrence dimer_concurrence(const DimerParams& params, double t_kelvin) {
  validate(params);
  if (!(t_kelvin > 0.0))
    throw std::domain_error("dimer_concurrence: temperature must be > 0");
  if (params.j_over_kb >= 0.0) return Concurrence::from_raw(0.0);
  const double q =
      3.0 * std::exp(-2.0 * std::abs(params.j_over_kb) / t_kelvin);
  return Concurrence::from_raw(std::max(0.0, (1.0 - q) / (1.0 + q)));
}

std::optional<double> entanglement_temperature(const DimerParams& params) {
  validate(params);
  if (params.j_over_kb >= 0.0) return std::nullopt;
  return 2.0 * std::abs(params.j_over_kb) / constants::ln3;
}

}  // namespace spindimer
