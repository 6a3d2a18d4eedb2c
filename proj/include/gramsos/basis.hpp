#pragma once

#include <vector>

#include "gramsos/polynomial.hpp"

namespace gramsos {

// Ordered monomial vector indexing the rows/columns of a Gram matrix.
struct MonomialBasis {
  int nvars = 0;
  int max_degree = 0;
  std::vector<Monomial> monomials;  // distinct, graded-lex order

  int size() const { return static_cast<int>(monomials.size()); }
};

enum class BasisKind {
  Degree,       // all monomials of degree <= d
  Homogeneous,  // degree exactly d; requires a homogeneous input
};

// All monomials of degree <= max_degree (or exactly max_degree) in
// canonical order. The full count is C(nvars + d, d).
MonomialBasis all_monomials(int nvars, int max_degree,
                            bool homogeneous = false);

// Basis for representing f as a quadratic form. f must have even degree 2d;
// the default basis holds every monomial of degree <= d.
MonomialBasis build_basis(const Polynomial& f,
                          BasisKind kind = BasisKind::Degree);

// Caller-supplied monomials; validated for distinctness and consistent
// variable counts, then sorted canonically.
MonomialBasis build_basis_custom(int nvars, std::vector<Monomial> monomials);

}  // namespace gramsos
