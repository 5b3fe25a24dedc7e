#pragma once

#include <string>
#include <vector>

#include "spindimer/spin_core.hpp"

// Explicit product-state decompositions rho = sum_i w_i rho_a,i (x) rho_b,i.
// Reconstructing a state from such a decomposition is a constructive
// separability certificate; the two canonical decompositions below certify
// the dimer states at T = T_E and in the mixed-triplet limit.

namespace spindimer {

struct ProductTerm {
  double weight = 0.0;
  Eigen::Matrix2cd rho_a;
  Eigen::Matrix2cd rho_b;
};

struct ProductDecomposition {
  std::vector<ProductTerm> terms;
};

struct DecompositionReport {
  bool ok = false;
  double max_abs_residual = 0.0;
  std::string detail;  // offending terms on validation failure
};

enum class CanonicalDecomposition { at_te, triplet_mixed };

// sum_i w_i rho_a,i (x) rho_b,i. Throws std::invalid_argument listing the
// offending terms when the decomposition is not a valid convex mixture of
// single-qubit density matrices.
DensityMatrix4 reconstruct(const ProductDecomposition& decomp);

// ok iff the decomposition is valid and the elementwise reconstruction
// residual against target is within tol. Never throws; failures land in the
// report.
DecompositionReport verify_decomposition(const ProductDecomposition& decomp,
                                         const DensityMatrix4& target,
                                         double tol);

// Six equal-weight product terms over |0>, |1>, |+>, |->, |i>, |-i>:
// at_te pairs each state with its antipode and reconstructs the T = T_E
// state exactly; triplet_mixed pairs each state with itself and reconstructs
// the mixed-triplet limit exactly.
ProductDecomposition canonical_decomposition(CanonicalDecomposition kind);

}  // namespace spindimer
