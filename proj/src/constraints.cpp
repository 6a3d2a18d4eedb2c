#include "gramsos/constraints.hpp"

#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "gramsos/error.hpp"

namespace gramsos {

ConstraintSystem build_constraints(const Polynomial& f,
                                   const MonomialBasis& basis) {
  if (f.nvars() != basis.nvars)
    throw Error("polynomial and basis have different variable counts");
  const int n = basis.size();

  // Every unordered basis pair lands in exactly one product monomial.
  std::map<Monomial, std::vector<ConstraintEntry>, GradedLexLess> products;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      products[basis.monomials[i] * basis.monomials[j]].push_back(
          ConstraintEntry{i, j, 1.0});

  for (const auto& [m, c] : f.terms())
    if (products.find(m) == products.end())
      throw Error("monomial " + to_string(m) +
                  " of the input is not a product of two basis monomials");

  ConstraintSystem cs;
  cs.n = n;
  cs.rows.reserve(products.size());
  cs.row_monomials.reserve(products.size());
  cs.b_exact.reserve(products.size());
  cs.b.resize(static_cast<Eigen::Index>(products.size()));
  Eigen::Index k = 0;
  for (auto& [m, entries] : products) {
    cs.rows.push_back(std::move(entries));
    cs.row_monomials.push_back(m);
    Rational c = f.coeff(m);
    cs.b_exact.push_back(c);
    cs.b(k++) = to_double(c);
  }
  return cs;
}

Vector apply_map(const ConstraintSystem& cs, const Matrix& w) {
  if (w.rows() != cs.n || w.cols() != cs.n)
    throw Error("matrix dimension does not match constraint system");
  Vector y(cs.p());
  for (int i = 0; i < cs.p(); ++i) {
    double acc = 0.0;
    for (const auto& e : cs.rows[i]) {
      if (e.row == e.col)
        acc += e.coef * w(e.row, e.col);
      else
        acc += e.coef * (w(e.row, e.col) + w(e.col, e.row));
    }
    y(i) = acc;
  }
  return y;
}

Matrix apply_adjoint(const ConstraintSystem& cs, const Vector& y) {
  if (y.size() != cs.p())
    throw Error("vector length does not match constraint count");
  Matrix m = Matrix::Zero(cs.n, cs.n);
  for (int i = 0; i < cs.p(); ++i) {
    const double yi = y(i);
    if (yi == 0.0) continue;
    for (const auto& e : cs.rows[i]) {
      m(e.row, e.col) += yi * e.coef;
      if (e.row != e.col) m(e.col, e.row) += yi * e.coef;
    }
  }
  return m;
}

double op_norm_sq(const ConstraintSystem& cs) {
  if (cs.n == 0 || cs.p() == 0) return 0.0;
  // Power iteration on W -> A*(A(W)) from a fixed seeded start.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix w(cs.n, cs.n);
  for (int i = 0; i < cs.n; ++i)
    for (int j = i; j < cs.n; ++j) {
      w(i, j) = unit(rng);
      w(j, i) = w(i, j);
    }
  double norm = w.norm();
  if (norm == 0.0) return 0.0;
  w /= norm;
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Matrix tw = apply_adjoint(cs, apply_map(cs, w));
    const double next = (w.array() * tw.array()).sum();  // Rayleigh quotient
    const double tw_norm = tw.norm();
    if (tw_norm == 0.0) return 0.0;  // start vector in the kernel
    w = tw / tw_norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda * 1.01;
}

std::string constraints_to_json(const ConstraintSystem& cs) {
  nlohmann::json j;
  j["n"] = cs.n;
  j["p"] = cs.p();
  auto rows = nlohmann::json::array();
  for (const auto& row : cs.rows) {
    auto entries = nlohmann::json::array();
    for (const auto& e : row)
      entries.push_back(nlohmann::json::array({e.row, e.col, e.coef}));
    rows.push_back(std::move(entries));
  }
  j["rows"] = std::move(rows);
  auto b = nlohmann::json::array();
  if (!cs.b_exact.empty()) {
    for (const auto& q : cs.b_exact) b.push_back(to_string(q));
  } else {
    for (Eigen::Index i = 0; i < cs.b.size(); ++i)
      b.push_back(to_string(rational_from_double(cs.b(i))));
  }
  j["b"] = std::move(b);
  return j.dump();
}

ConstraintSystem constraints_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid constraint JSON: ") + e.what());
  }
  ConstraintSystem cs;
  try {
    cs.n = j.at("n").get<int>();
    const auto& rows = j.at("rows");
    const auto& b = j.at("b");
    if (j.contains("p") && j.at("p").get<std::size_t>() != rows.size())
      throw ParseError("declared p does not match number of rows");
    if (rows.size() != b.size())
      throw ParseError("rows and b have different lengths");
    if (cs.n < 0) throw ParseError("negative dimension");
    for (const auto& row : rows) {
      std::vector<ConstraintEntry> entries;
      for (const auto& e : row) {
        ConstraintEntry entry{e.at(0).get<int>(), e.at(1).get<int>(),
                              e.at(2).get<double>()};
        if (entry.row < 0 || entry.col < 0 || entry.row >= cs.n ||
            entry.col >= cs.n)
          throw ParseError("entry index out of range");
        if (entry.row > entry.col) std::swap(entry.row, entry.col);
        entries.push_back(entry);
      }
      cs.rows.push_back(std::move(entries));
    }
    cs.b.resize(static_cast<Eigen::Index>(b.size()));
    Eigen::Index k = 0;
    for (const auto& v : b) {
      Rational q = v.is_string() ? rational_from_string(v.get<std::string>())
                                 : rational_from_double(v.get<double>());
      cs.b_exact.push_back(q);
      cs.b(k++) = to_double(q);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid constraint JSON: ") + e.what());
  }
  return cs;
}

}  // namespace gramsos
