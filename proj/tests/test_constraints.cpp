#include <doctest.h>

#include <random>

#include "gramsos/constraints.hpp"
#include "gramsos/error.hpp"
#include "gramsos/exact.hpp"
#include "test_helpers.hpp"

using namespace gramsos;

namespace {

ConstraintSystem single_identity_constraint(int n) {
  ConstraintSystem cs;
  cs.n = n;
  std::vector<ConstraintEntry> row;
  for (int i = 0; i < n; ++i) row.push_back(ConstraintEntry{i, i, 1.0});
  cs.rows.push_back(row);
  cs.b = Vector::Zero(1);
  cs.b_exact = {Rational(0)};
  return cs;
}

}  // namespace

TEST_CASE("basis for a univariate quadratic") {
  MonomialBasis basis = build_basis(parse_polynomial("x1^2 + 2*x1 + 1"));
  CHECK(basis.size() == 2);
  CHECK(to_string(basis.monomials[0]) == "1");
  CHECK(to_string(basis.monomials[1]) == "x1");
}

TEST_CASE("basis sizes follow the binomial count") {
  MonomialBasis b22 = all_monomials(2, 2);
  CHECK(b22.size() == 6);
  std::vector<std::string> names;
  for (const auto& m : b22.monomials) names.push_back(to_string(m));
  CHECK(names == std::vector<std::string>{"1", "x2", "x1", "x2^2", "x1*x2",
                                          "x1^2"});
  CHECK(all_monomials(3, 2).size() == 10);
}

TEST_CASE("basis options") {
  CHECK_THROWS_AS(build_basis(parse_polynomial("x1^3")), Error);
  Polynomial h = parse_polynomial("x1^2 + x2^2");
  CHECK(build_basis(h, BasisKind::Homogeneous).size() == 2);
  CHECK_THROWS_AS(
      build_basis(parse_polynomial("x1^2 + 1"), BasisKind::Homogeneous),
      Error);
  CHECK_THROWS_AS(
      build_basis_custom(1, {Monomial({1}), Monomial({1})}), Error);
}

TEST_CASE("constraints for a perfect square force the Gram matrix") {
  Polynomial f = parse_polynomial("x1^2 + 2*x1 + 1");
  MonomialBasis basis = build_basis(f);
  ConstraintSystem cs = build_constraints(f, basis);
  CHECK(cs.p() == 3);
  CHECK(cs.b(0) == 1.0);  // constant
  CHECK(cs.b(1) == 2.0);  // x1
  CHECK(cs.b(2) == 1.0);  // x1^2
  Matrix w(2, 2);
  w << 1, 1, 1, 1;
  Vector y = apply_map(cs, w);
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(2.0));
  CHECK(y(2) == doctest::Approx(1.0));
}

TEST_CASE("constraint rows cover zero-coefficient products") {
  Polynomial f = parse_polynomial("x1^2 + 2*x1*x2 + x2^2 + 1");
  MonomialBasis basis = build_basis(f);  // [1, x2, x1]
  ConstraintSystem cs = build_constraints(f, basis);
  CHECK(cs.p() == 6);  // 1, x2, x1, x2^2, x1*x2, x1^2
  Vector expected(6);
  expected << 1, 0, 0, 1, 2, 1;
  for (int i = 0; i < 6; ++i) CHECK(cs.b(i) == expected(i));
}

TEST_CASE("zero polynomial yields a zero right-hand side") {
  Polynomial f(2);
  MonomialBasis basis = build_basis_custom(2, {Monomial({0, 0}),
                                               Monomial({1, 0}),
                                               Monomial({0, 1})});
  ConstraintSystem cs = build_constraints(f, basis);
  CHECK(cs.b.norm() == 0.0);
  Matrix w = Matrix::Zero(3, 3);
  CHECK(apply_map(cs, w).norm() == 0.0);
}

TEST_CASE("unrepresentable monomials are rejected by name") {
  Polynomial f = parse_polynomial("x1^2 + x2^6");
  MonomialBasis basis = build_basis_custom(
      2, {Monomial({0, 0}), Monomial({1, 0}), Monomial({0, 1})});
  try {
    build_constraints(f, basis);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x2^6") != std::string::npos);
  }
}

TEST_CASE("apply_map and apply_adjoint basics") {
  ConstraintSystem cs = single_identity_constraint(4);
  Matrix id = Matrix::Identity(4, 4);
  CHECK(apply_map(cs, id)(0) == doctest::Approx(4.0));
  Vector e1 = Vector::Zero(1);
  e1(0) = 1.0;
  Matrix a1 = apply_adjoint(cs, e1);
  CHECK((a1 - id).norm() == doctest::Approx(0.0));
  CHECK(apply_adjoint(cs, Vector::Zero(1)).norm() == 0.0);
  CHECK_THROWS_AS(apply_map(cs, Matrix::Zero(3, 3)), Error);
  CHECK_THROWS_AS(apply_adjoint(cs, Vector::Zero(2)), Error);
}

TEST_CASE("adjoint identity <A(W), y> == <W, A*(y)>") {
  std::mt19937_64 rng(2024);
  Polynomial f = expand_square_sum({testing::random_polynomial(2, 2, 5, rng),
                                    testing::random_polynomial(2, 2, 5, rng)});
  MonomialBasis basis = build_basis(f);
  ConstraintSystem cs = build_constraints(f, basis);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    Matrix w = testing::random_symmetric(cs.n, rng);
    Vector y(cs.p());
    for (int i = 0; i < cs.p(); ++i) y(i) = unit(rng);
    const double lhs = apply_map(cs, w).dot(y);
    const double rhs = (w.array() * apply_adjoint(cs, y).array()).sum();
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * std::max(1.0, std::max(std::abs(lhs), std::abs(rhs))));
  }
}

TEST_CASE("planted Gram matrices satisfy their constraints exactly") {
  std::mt19937_64 rng(5);
  MonomialBasis basis = all_monomials(2, 2);
  RationalMatrix w0(basis.size());
  for (int i = 0; i < w0.n; ++i)
    for (int j = 0; j <= i; ++j) w0.set(i, j, testing::random_rational(rng));
  // Make it a Gram matrix of something: W0 = V V^T keeps it PSD, but
  // exact feasibility holds for any symmetric W0.
  Polynomial f = gram_polynomial_exact(w0, basis);
  ConstraintSystem cs = build_constraints(f, basis);
  std::vector<Rational> y = apply_map_exact(cs, w0);
  for (int i = 0; i < cs.p(); ++i) CHECK(y[i] == cs.b_exact[i]);
}

TEST_CASE("operator norm estimates") {
  SUBCASE("identity constraint has norm-squared n") {
    ConstraintSystem cs = single_identity_constraint(6);
    const double est = op_norm_sq(cs);
    CHECK(est >= 6.0 - 1e-6);
    CHECK(est <= 6.0 * 1.011);
  }
  SUBCASE("single unit entry has norm-squared 1") {
    ConstraintSystem cs;
    cs.n = 3;
    cs.rows.push_back({ConstraintEntry{0, 0, 1.0}});
    cs.b = Vector::Zero(1);
    const double est = op_norm_sq(cs);
    CHECK(est >= 1.0 - 1e-6);
    CHECK(est <= 1.011);
  }
  SUBCASE("perfect-square system has norm-squared 2") {
    // The Gram matrix of the rows is diag(1, 2, 1).
    Polynomial f = parse_polynomial("x1^2 + 2*x1 + 1");
    ConstraintSystem cs = build_constraints(f, build_basis(f));
    const double est = op_norm_sq(cs);
    CHECK(est >= 2.0 - 1e-5);
    CHECK(est <= 2.0 * 1.011);
  }
  SUBCASE("empty system") {
    ConstraintSystem cs;
    cs.n = 2;
    CHECK(op_norm_sq(cs) == 0.0);
  }
}

TEST_CASE("norm estimate upper-bounds the map on random matrices") {
  std::mt19937_64 rng(77);
  Polynomial f = expand_square_sum({testing::random_polynomial(2, 2, 5, rng)});
  ConstraintSystem cs = build_constraints(f, build_basis(f));
  const double bound = std::sqrt(op_norm_sq(cs));
  for (int trial = 0; trial < 200; ++trial) {
    Matrix w = testing::random_symmetric(cs.n, rng);
    CHECK(apply_map(cs, w).norm() <= bound * w.norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("constraint JSON round trip") {
  Polynomial f = parse_polynomial("x1^2 + 2*x1 + 1");
  ConstraintSystem cs = build_constraints(f, build_basis(f));
  ConstraintSystem back = constraints_from_json(constraints_to_json(cs));
  CHECK(back.n == cs.n);
  CHECK(back.p() == cs.p());
  CHECK((back.b - cs.b).norm() == 0.0);
  for (int i = 0; i < cs.p(); ++i) CHECK(back.b_exact[i] == cs.b_exact[i]);
  std::mt19937_64 rng(3);
  Matrix w = testing::random_symmetric(cs.n, rng);
  CHECK((apply_map(back, w) - apply_map(cs, w)).norm() == 0.0);

  CHECK_THROWS_AS(constraints_from_json("{"), ParseError);
  CHECK_THROWS_AS(constraints_from_json(R"({"n":2,"rows":[],"b":[1]})"),
                  ParseError);
  CHECK_THROWS_AS(
      constraints_from_json(
          R"({"n":1,"rows":[[[0,5,1.0]]],"b":["1"]})"),
      ParseError);
}
