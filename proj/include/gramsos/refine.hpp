#pragma once

#include "gramsos/basis.hpp"
#include "gramsos/polynomial.hpp"
#include "gramsos/types.hpp"

namespace gramsos {

// Numerical square factors: row i of coeffs holds the coefficients of
// factor i over the basis monomials, so the represented polynomial is
// sum_i (sum_j coeffs(i,j) basis_j)^2.
struct SosFactors {
  MonomialBasis basis;
  Matrix coeffs;  // r x n

  int r() const { return static_cast<int>(coeffs.rows()); }
};

struct RefineResult {
  SosFactors factors;
  double theta = 0;  // coefficient-space backward error
  bool converged = false;
  int gn_iterations = 0;
};

// Seeds r factors from the top-r eigenpairs of w: factor i gets
// sqrt(lambda_i) q_i. Requires r between 1 and the count of positive
// eigenvalues.
SosFactors truncated_factor(const Matrix& w, int r,
                            const MonomialBasis& basis);

// Damped Gauss-Newton on the coefficient residual of f - sum_i factor_i^2.
// Each step solves the linearized least-squares problem; a step that fails
// to reduce theta is halved up to 20 times before giving up.
RefineResult gauss_newton_refine(const Polynomial& f, const SosFactors& init,
                                 double tol = 1e-12, int max_gn = 50);

// Euclidean norm of the coefficient vector of f - sum_i factor_i^2.
double backward_error(const Polynomial& f, const SosFactors& factors);

// Same for the quadratic-form residual f - basis^T w basis.
double backward_error(const Polynomial& f, const Matrix& w,
                      const MonomialBasis& basis);

// Gram matrix C^T C of the factor coefficient matrix.
Matrix gram_from_factors(const SosFactors& factors);

// Residual coefficient vector and its Jacobian with respect to the factor
// coefficients (flattened factor-major), over the monomial index set
// spanned by basis products and the support of f. Exposed for testing the
// derivative against finite differences.
void residual_and_jacobian(const Polynomial& f, const SosFactors& factors,
                           Vector* residual, Matrix* jacobian);

}  // namespace gramsos
