#include "spindimer/separability.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spindimer {

namespace {

constexpr double kTermTol = 1e-12;

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

Eigen::Matrix4cd weighted_sum(const ProductDecomposition& decomp) {
  Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
  for (const ProductTerm& term : decomp.terms)
    sum += term.weight * kron2(term.rho_a, term.rho_b);
  return sum;
}

// Empty string when valid, otherwise a description naming offending terms.
std::string validate_decomposition(const ProductDecomposition& decomp) {
  std::ostringstream problems;
  auto check_factor = [&](const Eigen::Matrix2cd& rho, int index,
                          const char* side) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTermTol)
      problems << "term " << index << ": " << side << " not Hermitian; ";
    if (std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) > kTermTol)
      problems << "term " << index << ": " << side << " trace != 1; ";
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTermTol)
      problems << "term " << index << ": " << side << " not PSD; ";
  };

  double weight_sum = 0.0;
  for (std::size_t i = 0; i < decomp.terms.size(); ++i) {
    const ProductTerm& term = decomp.terms[i];
    if (!(term.weight >= 0.0))
      problems << "term " << i << ": negative weight " << term.weight << "; ";
    weight_sum += term.weight;
    check_factor(term.rho_a, static_cast<int>(i), "rho_a");
    check_factor(term.rho_b, static_cast<int>(i), "rho_b");
  }
  if (std::abs(weight_sum - 1.0) > kTermTol)
    problems << "weights sum to " << weight_sum << " instead of 1; ";
  return problems.str();
}

}  // namespace

DensityMatrix4 reconstruct(const ProductDecomposition& decomp) {
  const std::string problems = validate_decomposition(decomp);
  if (!problems.empty())
    throw std::invalid_argument("reconstruct: invalid decomposition: " +
                                problems);
  return DensityMatrix4::checked(weighted_sum(decomp));
}

DecompositionReport verify_decomposition(const ProductDecomposition& decomp,
                                         const DensityMatrix4& target,
                                         double tol) {
  if (!(tol > 0.0)) throw std::domain_error("verify_decomposition: tol <= 0");
  DecompositionReport report;
  report.detail = validate_decomposition(decomp);
  report.max_abs_residual =
      (weighted_sum(decomp) - target.mat()).cwiseAbs().maxCoeff();
  report.ok = report.detail.empty() && report.max_abs_residual <= tol;
  return report;
}

ProductDecomposition canonical_decomposition(CanonicalDecomposition kind) {
  using cd = std::complex<double>;
  Eigen::Matrix2cd k0, k1, plus, minus, plus_i, minus_i;
  k0 << 1, 0, 0, 0;
  k1 << 0, 0, 0, 1;
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  plus_i << cd(0.5, 0), cd(0, -0.5), cd(0, 0.5), cd(0.5, 0);
  minus_i << cd(0.5, 0), cd(0, 0.5), cd(0, -0.5), cd(0.5, 0);

  const double w = 1.0 / 6.0;
  ProductDecomposition decomp;
  if (kind == CanonicalDecomposition::at_te) {
    // Each Bloch-sphere state on qubit 1 paired with its antipode on qubit 2.
    decomp.terms = {{w, k0, k1},       {w, k1, k0},      {w, plus, minus},
                    {w, minus, plus},  {w, plus_i, minus_i},
                    {w, minus_i, plus_i}};
  } else {
    decomp.terms = {{w, k0, k0},       {w, k1, k1},      {w, plus, plus},
                    {w, minus, minus}, {w, plus_i, plus_i},
                    {w, minus_i, minus_i}};
  }
  return decomp;
}

}  // namespace spindimer
