#include "spindimer/spin_core.hpp"

#include <cmath>
#include <stdexcept>

#include "spindimer/constants.hpp"

namespace spindimer {

namespace {
constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdSlack = 1e-10;
}  // namespace

void validate(const DimerParams& params) {
  if (!std::isfinite(params.j_over_kb))
    throw std::domain_error("DimerParams: J/k_B must be finite");
  if (!std::isfinite(params.g) || params.g < 0.0)
    throw std::domain_error("DimerParams: g must be finite and >= 0");
}

DensityMatrix4 DensityMatrix4::checked(const Eigen::Matrix4cd& m) {
  const Eigen::Matrix4cd herm_residual = m - m.adjoint();
  if (herm_residual.cwiseAbs().maxCoeff() > kHermitianTol)
    throw std::invalid_argument("DensityMatrix4: not Hermitian");
  if (std::abs(m.trace() - std::complex<double>(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument("DensityMatrix4: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdSlack)
    throw std::invalid_argument("DensityMatrix4: not positive semidefinite");
  return DensityMatrix4(m);
}

Eigen::Matrix4d hamiltonian_matrix(const DimerParams& params) {
  validate(params);
  Eigen::Matrix4d dot;  // sigma_1 . sigma_2 in the product basis
  dot << 1, 0, 0, 0,    //
      0, -1, 2, 0,      //
      0, 2, -1, 0,      //
      0, 0, 0, 1;
  return -0.5 * params.j_over_kb * dot;
}

DimerSpectrum spectrum(const DimerParams& params) {
  validate(params);
  DimerSpectrum s;
  s.singlet_energy = 1.5 * params.j_over_kb;
  s.triplet_energy = -0.5 * params.j_over_kb;
  const double r = 1.0 / std::sqrt(2.0);
  s.singlet = Eigen::Vector4cd(0.0, r, -r, 0.0);
  s.triplet[0] = Eigen::Vector4cd(1.0, 0.0, 0.0, 0.0);
  s.triplet[1] = Eigen::Vector4cd(0.0, 0.0, 0.0, 1.0);
  s.triplet[2] = Eigen::Vector4cd(0.0, r, r, 0.0);
  return s;
}

DensityMatrix4 thermal_state(const DimerParams& params, double t_kelvin) {
  validate(params);
  if (!(t_kelvin > 0.0))
    throw std::domain_error("thermal_state: temperature must be > 0");
  const double e_singlet = 1.5 * params.j_over_kb;
  const double e_triplet = -0.5 * params.j_over_kb;
  // Weights relative to the ground level keep Z in [1, 4] for any J/T.
  const double e_min = std::min(e_singlet, e_triplet);
  const double ws = std::exp(-(e_singlet - e_min) / t_kelvin);
  const double wt = std::exp(-(e_triplet - e_min) / t_kelvin);
  const double z = ws + 3.0 * wt;

  const double corner = wt / z;
  const double center = 0.5 * (ws + wt) / z;
  const double cross = 0.5 * (wt - ws) / z;
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = corner;
  m(3, 3) = corner;
  m(1, 1) = center;
  m(2, 2) = center;
  m(1, 2) = cross;
  m(2, 1) = cross;
  return DensityMatrix4::checked(m);
}

DensityMatrix4 limit_state(LimitState kind) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  switch (kind) {
    case LimitState::zero_temp_afm:
      m(1, 1) = 0.5;
      m(2, 2) = 0.5;
      m(1, 2) = -0.5;
      m(2, 1) = -0.5;
      break;
    case LimitState::infinite_temp:
      m = 0.25 * Eigen::Matrix4cd::Identity();
      break;
    case LimitState::at_te:
      m(0, 0) = 1.0 / 6.0;
      m(3, 3) = 1.0 / 6.0;
      m(1, 1) = 2.0 / 6.0;
      m(2, 2) = 2.0 / 6.0;
      m(1, 2) = -1.0 / 6.0;
      m(2, 1) = -1.0 / 6.0;
      break;
    case LimitState::triplet_mixed:
      m(0, 0) = 2.0 / 6.0;
      m(3, 3) = 2.0 / 6.0;
      m(1, 1) = 1.0 / 6.0;
      m(2, 2) = 1.0 / 6.0;
      m(1, 2) = 1.0 / 6.0;
      m(2, 1) = 1.0 / 6.0;
      break;
  }
  return DensityMatrix4::checked(m);
}

double magnetization_z(const DimerParams& params, double t_kelvin,
                       double b_gauss) {
  validate(params);
  if (!(t_kelvin > 0.0))
    throw std::domain_error("magnetization_z: temperature must be > 0");

  // M_z/k_B = (g/2)(mu_B/k_B)(sigma_1^z + sigma_2^z), diagonal in the
  // product basis with entries (g m, 0, 0, -g m) in K/G.
  const double gm = params.g * constants::mub_over_kb;
  const Eigen::Vector4d mz_diag(gm, 0.0, 0.0, -gm);

  Eigen::Matrix4d h = hamiltonian_matrix(params);
  h -= b_gauss * Eigen::Matrix4d(mz_diag.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
  const Eigen::Vector4d& energies = es.eigenvalues();
  const Eigen::Matrix4d& vectors = es.eigenvectors();

  const double e_min = energies.minCoeff();
  double z = 0.0;
  double moment = 0.0;  // thermal <M_z/k_B>, K/G
  for (int i = 0; i < 4; ++i) {
    const double w = std::exp(-(energies[i] - e_min) / t_kelvin);
    const Eigen::Vector4d v = vectors.col(i);
    z += w;
    moment += w * v.dot(mz_diag.cwiseProduct(v));
  }
  moment /= z;

  // N_A k_B = C1 / (mu_B/k_B)^2 turns the K/G expectation into erg/(G mol).
  const double na_kb = constants::na_mub2_over_kb /
                       (constants::mub_over_kb * constants::mub_over_kb);
  return na_kb * moment;
}

double susceptibility_numeric(const DimerParams& params, double t_kelvin,
                              double db_gauss) {
  if (!(db_gauss > 0.0))
    throw std::domain_error("susceptibility_numeric: field step must be > 0");
  const double m_plus = magnetization_z(params, t_kelvin, db_gauss);
  const double m_minus = magnetization_z(params, t_kelvin, -db_gauss);
  return (m_plus - m_minus) / (2.0 * db_gauss);
}

}  // namespace spindimer
