#pragma once

#include <Eigen/Dense>

#include <array>

// Exact quantum mechanics of the two-spin-1/2 Heisenberg dimer
// H = -(J/2) sigma_1 . sigma_2: spectrum, Gibbs state, limit states, and a
// numerical Zeeman-response oracle for the molar susceptibility.

namespace spindimer {

// Exchange-coupled pair of S = 1/2 centers. j_over_kb is J/k_B in kelvin
// (negative = antiferromagnetic); g is the isotropic or powder-averaged
// g-factor.
struct DimerParams {
  double j_over_kb = 0.0;
  double g = 2.0;
};

// Throws std::domain_error on non-finite J/k_B or g < 0.
void validate(const DimerParams& params);

// 4x4 density matrix in the fixed product basis ordered
// |up,up>, |up,down>, |down,up>, |down,down>.
class DensityMatrix4 {
 public:
  // Validates hermiticity and unit trace to 1e-12 and positive
  // semidefiniteness to -1e-10 eigenvalue slack; throws std::invalid_argument.
  static DensityMatrix4 checked(const Eigen::Matrix4cd& m);

  const Eigen::Matrix4cd& mat() const { return m_; }
  std::complex<double> operator()(int r, int c) const { return m_(r, c); }

 private:
  explicit DensityMatrix4(const Eigen::Matrix4cd& m) : m_(m) {}
  Eigen::Matrix4cd m_;
};

// Energies carry 1/k_B (kelvin). The singlet sits at 3J/2, the threefold
// degenerate triplet at -J/2; the gap is 2|J|.
struct DimerSpectrum {
  double singlet_energy = 0.0;
  double triplet_energy = 0.0;
  Eigen::Vector4cd singlet;
  std::array<Eigen::Vector4cd, 3> triplet;
};

enum class LimitState {
  zero_temp_afm,   // T -> 0+ for J < 0: pure singlet projector
  infinite_temp,   // T -> inf: maximally mixed I/4
  at_te,           // T = T_E for J < 0: singlet weight exactly 1/2
  triplet_mixed,   // T -> 0+ for J > 0: equal mixture of the triplet
};

// -(J/2) sigma_1 . sigma_2 in the product basis, kelvin units. Symmetric,
// traceless; eigenvalues {3J/2, -J/2, -J/2, -J/2}.
Eigen::Matrix4d hamiltonian_matrix(const DimerParams& params);

DimerSpectrum spectrum(const DimerParams& params);

// Gibbs state exp(-H/k_B T)/Z. Boltzmann weights are shifted by the ground
// energy so Z stays in [1, 4]; safe for |J|/(k_B T) well beyond 1e4.
DensityMatrix4 thermal_state(const DimerParams& params, double t_kelvin);

DensityMatrix4 limit_state(LimitState kind);

// Molar magnetization N_A <M_z> in erg G^-1 mol^-1 of the field-dressed
// dimer H - B*M_z with M_z = (g/2) mu_B (sigma_1^z + sigma_2^z), computed by
// numerical diagonalization. Deliberately independent of the Bleaney-Bowers
// closed form; serves as the susceptibility oracle. Odd in b.
double magnetization_z(const DimerParams& params, double t_kelvin,
                       double b_gauss);

// Central-difference susceptibility [M(+db) - M(-db)] / (2 db) in cm^3/mol.
double susceptibility_numeric(const DimerParams& params, double t_kelvin,
                              double db_gauss = 1.0);

}  // namespace spindimer
