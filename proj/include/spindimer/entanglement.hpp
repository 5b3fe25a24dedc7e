#pragma once

#include <optional>

#include "spindimer/spin_core.hpp"

// Two-qubit entanglement measures: the block-form concurrence shortcut, the
// general Wootters spectrum as an independent oracle, the entanglement of
// formation, and the dimer's analytic C(T) and entanglement temperature.

namespace spindimer {

// Dimensionless concurrence, clamped to [0, 1]. from_raw warns on stderr
// when the overshoot exceeds 1e-9 (anything larger than rounding noise
// indicates a non-physical input).
class Concurrence {
 public:
  static Concurrence from_raw(double value);
  double value() const { return value_; }

 private:
  explicit Concurrence(double v) : value_(v) {}
  double value_;
};

// C = 2 max{|w| - sqrt(u v), 0} for density matrices with the block
// structure diag{u, [[x1, w], [w*, x2]], v}. Off-block entries beyond 1e-10
// raise std::invalid_argument (use concurrence_wootters for general states).
Concurrence concurrence_x_form(const DensityMatrix4& rho);

// Wootters formula: C = max{0, l1 - l2 - l3 - l4} with l_i the decreasing
// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy). The
// eigenvalues of the non-Hermitian product must be real up to 1e-8 residue.
Concurrence concurrence_wootters(const DensityMatrix4& rho);

// E(C) = h((1 + sqrt(1 - C^2))/2) in bits, h the binary entropy with the
// 0 log 0 = 0 convention. E(0) = 0 and E(1) = 1 exactly.
double entanglement_of_formation(Concurrence c);

// Closed-form thermal concurrence of the dimer: 0 for J >= 0, otherwise
// max{0, (1 - 3 e^{-2|J|/k_B T}) / (1 + 3 e^{-2|J|/k_B T})}. Independent of g.
Concurrence dimer_concurrence(const DimerParams& params, double t_kelvin);

// T_E = 2|J| / (k_B ln 3) for J < 0; no entanglement temperature otherwise.
std::optional<double> entanglement_temperature(const DimerParams& params);

}  // namespace spindimer
