#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gramsos/basis.hpp"
#include "gramsos/rational.hpp"
#include "gramsos/types.hpp"

namespace gramsos {

// One stored entry of a sparse symmetric constraint matrix. Only the lower
// wedge (row <= col) is stored; an off-diagonal entry stands for the
// symmetric pair, so its contribution to <A, W> is coef * (W_ij + W_ji).
struct ConstraintEntry {
  int row = 0;
  int col = 0;  // row <= col
  double coef = 0.0;
};

// Linear map A : S^n -> R^p given by p sparse symmetric matrices, with the
// right-hand side kept both in floating point (for the iterative solver)
// and exactly (for certificate recovery).
struct ConstraintSystem {
  int n = 0;
  std::vector<std::vector<ConstraintEntry>> rows;
  Vector b;
  std::vector<Rational> b_exact;
  // For systems built from a polynomial: the product monomial matched by
  // each row, in canonical order. Empty for raw systems loaded from JSON.
  std::vector<Monomial> row_monomials;

  int p() const { return static_cast<int>(rows.size()); }
};

// Coefficient matching of f against basis^T * W * basis. Generates one row
// per product monomial realizable from the basis (zero coefficients in f
// included); b is the raw coefficient vector of f.
ConstraintSystem build_constraints(const Polynomial& f,
                                   const MonomialBasis& basis);

// y_i = <A_i, W>.
Vector apply_map(const ConstraintSystem& cs, const Matrix& w);

// A* y = sum_i y_i A_i.
Matrix apply_adjoint(const ConstraintSystem& cs, const Vector& y);

// Power iteration estimate of ||A||_2^2 = lambda_max(A* o A), inflated by a
// 1.01 safety factor so it upper-bounds the true value in practice.
double op_norm_sq(const ConstraintSystem& cs);

std::string constraints_to_json(const ConstraintSystem& cs);
ConstraintSystem constraints_from_json(const std::string& text);

}  // namespace gramsos
