#pragma once

#include "gramsos/types.hpp"

namespace gramsos {

// Orthonormal eigenvectors and eigenvalues of a symmetric matrix, sorted by
// algebraically non-increasing eigenvalue. complete marks a full (k == n)
// decomposition.
struct EigenDecomposition {
  Matrix q;       // n x k
  Vector lambda;  // k entries, non-increasing
  bool complete = false;

  int count() const { return static_cast<int>(lambda.size()); }
};

// Full symmetric eigendecomposition. Eigenvector signs are normalized so
// the first non-negligible component is positive.
EigenDecomposition schur_sym(const Matrix& w);

// Top s_k algebraically largest eigenpairs. Falls back to the dense solver
// for small matrices or large s_k; otherwise runs Lanczos with full
// reorthogonalization.
EigenDecomposition partial_schur(const Matrix& w, int s_k);

// The Lanczos path itself, exposed so it can be validated against the
// dense solver regardless of the fallback rule.
EigenDecomposition lanczos_topk(const Matrix& w, int k);

// Eigenvalue soft-thresholding: Q diag((lambda_i - nu)+) Q^T. The overload
// taking a decomposition avoids refactorizing inside solver loops; with a
// partial decomposition only the captured spectrum is thresholded.
Matrix threshold(const EigenDecomposition& ed, double nu);
Matrix threshold(const Matrix& w, double nu);

// Sum of absolute eigenvalues (trace for positive semidefinite input).
double nuclear_norm(const Matrix& w);

}  // namespace gramsos
