#pragma once

#include <string>
#include <vector>

#include "gramsos/basis.hpp"
#include "gramsos/constraints.hpp"
#include "gramsos/polynomial.hpp"
#include "gramsos/rational.hpp"
#include "gramsos/types.hpp"

namespace gramsos {

// Dense symmetric matrix of rationals.
struct RationalMatrix {
  int n = 0;
  std::vector<Rational> a;  // row-major n*n, kept exactly symmetric

  RationalMatrix() = default;
  explicit RationalMatrix(int dim) : n(dim), a(std::size_t(dim) * dim, 0) {}

  Rational& at(int i, int j) { return a[std::size_t(i) * n + j]; }
  const Rational& at(int i, int j) const { return a[std::size_t(i) * n + j]; }
  void set(int i, int j, const Rational& v) {
    at(i, j) = v;
    at(j, i) = v;
  }

  Matrix to_double() const;
  static RationalMatrix from_double(const Matrix& w);  // exact dyadic entries
};

// Best rational approximation of x with denominator at most denom_bound,
// via continued fractions (exact integer arithmetic throughout).
Rational best_rational(double x, const Integer& denom_bound);

// Entrywise best approximation of the lower triangle, mirrored to keep the
// result exactly symmetric.
RationalMatrix rationalize(const Matrix& w, const Integer& denom_bound);

std::vector<Rational> apply_map_exact(const ConstraintSystem& cs,
                                      const RationalMatrix& w);
RationalMatrix apply_adjoint_exact(const ConstraintSystem& cs,
                                   const std::vector<Rational>& y);

// Orthogonal projection of w onto {W : A(W) = b} in the Frobenius inner
// product, computed exactly: W* = w - A*(M^-1 (A(w) - b)) with M the Gram
// matrix M_ij = <A_i, A_j>. Rank-deficient but consistent systems are
// handled by elimination; throws InfeasibleError when b is not in the
// range of the map.
RationalMatrix project_affine_exact(const RationalMatrix& w,
                                    const ConstraintSystem& cs);

// Outcome of the exact pivoted LDL^T factorization: on success all pivots
// are non-negative and w = P L D L^T P^T; otherwise witness demonstrates
// witness^T w witness < 0.
struct LdlResult {
  bool psd = false;
  std::vector<int> perm;               // pivot order, original indices
  std::vector<std::vector<Rational>> l;  // unit lower triangular, n x n
  std::vector<Rational> d;
  int rank = 0;  // number of positive pivots
  std::vector<Rational> witness;
  Rational witness_value;
};

// Symmetric-pivoted LDL^T over the rationals; pivots on the largest
// remaining diagonal entry (ties to the lowest index).
LdlResult exact_psd_check(const RationalMatrix& w);

// Exact weighted-square representation f = sum_i d_i q_i^2 with d_i > 0.
struct SosCertificate {
  RationalMatrix gram;
  std::vector<Rational> weights;
  std::vector<Polynomial> squares;
  MonomialBasis basis;
  bool exact = false;
  // Failure diagnostics: nonzero residual when the quadratic-form identity
  // fails, or a negativity witness when the PSD check fails.
  Polynomial residual;
  std::vector<Rational> psd_witness;
  Rational psd_witness_value;
};

// basis^T w basis expanded exactly.
Polynomial gram_polynomial_exact(const RationalMatrix& w,
                                 const MonomialBasis& basis);

// Verifies f == basis^T w basis exactly, runs the PSD check, extracts the
// weighted squares from the LDL^T factors, and re-expands them against f.
// exact is set only when every check passes.
SosCertificate certify(const Polynomial& f, const RationalMatrix& w,
                       const MonomialBasis& basis);

// Re-runs all certificate checks from scratch. Returns true when the
// certificate exactly represents f; fills diagnostic otherwise.
bool verify_certificate(const Polynomial& f, const SosCertificate& cert,
                        std::string* diagnostic = nullptr);

std::string certificate_to_json(const SosCertificate& cert);
SosCertificate certificate_from_json(const std::string& text);

}  // namespace gramsos
