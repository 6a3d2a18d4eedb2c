#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gramsos/rational.hpp"

namespace gramsos {

// Exponent vector of a power product. Length equals the variable count of
// the polynomial that owns it.
struct Monomial {
  std::vector<int> exponents;

  Monomial() = default;
  explicit Monomial(std::vector<int> e) : exponents(std::move(e)) {}

  int degree() const;
  int nvars() const { return static_cast<int>(exponents.size()); }
  bool is_constant() const { return degree() == 0; }

  // Componentwise product (concatenating power products).
  Monomial operator*(const Monomial& other) const;
  // Componentwise difference; nullopt if any exponent would go negative.
  std::optional<Monomial> divide(const Monomial& other) const;

  bool operator==(const Monomial& other) const {
    return exponents == other.exponents;
  }
};

// Canonical term order: total degree first, then ascending lexicographic on
// the exponent vector. Gives [1, x2, x1, x2^2, x1*x2, x1^2] for two
// variables up to degree 2.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

std::string to_string(const Monomial& m);

// Sparse multivariate polynomial over the rationals. Immutable in spirit:
// operations return new values. Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Rational& c);
  // x_index as a polynomial (index is 1-based, matching the text grammar).
  static Polynomial variable(int nvars, int index);

  int nvars() const { return nvars_; }
  // Maximum total degree; 0 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;
  std::size_t term_count() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  Rational coeff(const Monomial& m) const;
  // Stores c as the coefficient of m, erasing the term when c == 0.
  void set_coeff(const Monomial& m, const Rational& c);
  void add_term(const Monomial& m, const Rational& c);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator-() const;
  bool operator==(const Polynomial& other) const;

  Rational eval(const std::vector<Rational>& point) const;

 private:
  void check_same_vars(const Polynomial& other) const;

  int nvars_ = 0;
  TermMap terms_;
};

// Grammar: poly := ['+'|'-'] term (('+'|'-') term)*
//          term := coef | [coef '*'] factor ('*' factor)*
//          factor := 'x' int ['^' int]
//          coef := int ['/' int]
// Whitespace is insignificant. The variable count is inferred from the
// largest index present unless nvars is given (which must cover all
// indices seen).
Polynomial parse_polynomial(const std::string& text,
                            std::optional<int> nvars = std::nullopt);

// Canonical text form; parse(to_string(f)) == f.
std::string to_string(const Polynomial& f);

// Sum of the squares of the given polynomials, expanded exactly.
Polynomial expand_square_sum(const std::vector<Polynomial>& factors);

Rational eval_poly(const Polynomial& f, const std::vector<Rational>& point);

}  // namespace gramsos
