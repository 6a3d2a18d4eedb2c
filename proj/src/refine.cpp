#include "gramsos/refine.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>

#include "gramsos/error.hpp"
#include "gramsos/spectral.hpp"

namespace gramsos {

namespace {

// Index of every monomial reachable by basis products, plus the support of
// f. The residual lives in this coefficient space.
std::map<Monomial, int, GradedLexLess> product_index(
    const Polynomial& f, const MonomialBasis& basis) {
  std::map<Monomial, int, GradedLexLess> index;
  const int n = basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      index.emplace(basis.monomials[i] * basis.monomials[j], 0);
  for (const auto& [m, c] : f.terms()) index.emplace(m, 0);
  int k = 0;
  for (auto& [m, pos] : index) pos = k++;
  return index;
}

Vector f_coefficients(const Polynomial& f,
                      const std::map<Monomial, int, GradedLexLess>& index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(index.size()));
  for (const auto& [m, c] : f.terms()) v(index.at(m)) = to_double(c);
  return v;
}

// Coefficients of sum_i factor_i^2 in the index space.
Vector square_sum_coefficients(
    const SosFactors& factors,
    const std::map<Monomial, int, GradedLexLess>& index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(index.size()));
  const int n = factors.basis.size();
  const auto& mons = factors.basis.monomials;
  for (int i = 0; i < factors.r(); ++i)
    for (int a = 0; a < n; ++a) {
      const double ca = factors.coeffs(i, a);
      if (ca == 0.0) continue;
      for (int b = a; b < n; ++b) {
        const double cb = factors.coeffs(i, b);
        if (cb == 0.0) continue;
        v(index.at(mons[a] * mons[b])) += (a == b ? 1.0 : 2.0) * ca * cb;
      }
    }
  return v;
}

}  // namespace

SosFactors truncated_factor(const Matrix& w, int r,
                            const MonomialBasis& basis) {
  if (w.rows() != basis.size() || w.cols() != basis.size())
    throw Error("matrix dimension does not match basis size");
  if (r < 1) throw Error("factor count must be at least 1");
  EigenDecomposition ed = schur_sym(w);
  const double top = std::max(ed.lambda.maxCoeff(), 0.0);
  int positive = 0;
  while (positive < ed.count() &&
         ed.lambda(positive) > 1e-10 * std::max(1.0, top))
    ++positive;
  if (r > positive)
    throw Error("requested " + std::to_string(r) +
                " factors but the matrix has only " +
                std::to_string(positive) + " positive eigenvalues");
  SosFactors out;
  out.basis = basis;
  out.coeffs.resize(r, basis.size());
  for (int i = 0; i < r; ++i)
    out.coeffs.row(i) = std::sqrt(ed.lambda(i)) * ed.q.col(i).transpose();
  return out;
}

Matrix gram_from_factors(const SosFactors& factors) {
  return factors.coeffs.transpose() * factors.coeffs;
}

double backward_error(const Polynomial& f, const SosFactors& factors) {
  auto index = product_index(f, factors.basis);
  return (f_coefficients(f, index) - square_sum_coefficients(factors, index))
      .norm();
}

double backward_error(const Polynomial& f, const Matrix& w,
                      const MonomialBasis& basis) {
  if (w.rows() != basis.size() || w.cols() != basis.size())
    throw Error("matrix dimension does not match basis size");
  auto index = product_index(f, basis);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(index.size()));
  const int n = basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double wij = i == j ? w(i, i) : w(i, j) + w(j, i);
      v(index.at(basis.monomials[i] * basis.monomials[j])) += wij;
    }
  return (f_coefficients(f, index) - v).norm();
}

void residual_and_jacobian(const Polynomial& f, const SosFactors& factors,
                           Vector* residual, Matrix* jacobian) {
  auto index = product_index(f, factors.basis);
  const int p = static_cast<int>(index.size());
  const int n = factors.basis.size();
  const int r = factors.r();
  if (residual)
    *residual =
        f_coefficients(f, index) - square_sum_coefficients(factors, index);
  if (jacobian) {
    // d/dc_{i,beta} of sum (factor_i)^2 at monomial alpha is
    // 2 * c_{i, alpha - beta}; the residual carries a minus sign.
    jacobian->setZero(p, r * n);
    const auto& mons = factors.basis.monomials;
    for (int i = 0; i < r; ++i)
      for (int beta = 0; beta < n; ++beta)
        for (int gamma = 0; gamma < n; ++gamma) {
          const double c = factors.coeffs(i, gamma);
          if (c == 0.0) continue;
          (*jacobian)(index.at(mons[beta] * mons[gamma]), i * n + beta) -=
              2.0 * c;
        }
  }
}

RefineResult gauss_newton_refine(const Polynomial& f, const SosFactors& init,
                                 double tol, int max_gn) {
  if (f.nvars() != init.basis.nvars)
    throw Error("polynomial and factor basis have different variable counts");
  if (!init.coeffs.allFinite())
    throw Error("factor coefficients must be finite");

  RefineResult res;
  res.factors = init;
  auto index = product_index(f, init.basis);
  const Vector target = f_coefficients(f, index);
  const int n = init.basis.size();
  const int r = init.r();

  auto theta_of = [&](const SosFactors& fac) {
    return (target - square_sum_coefficients(fac, index)).norm();
  };

  res.theta = theta_of(res.factors);
  while (res.gn_iterations < max_gn && res.theta > tol) {
    Vector residual;
    Matrix jac;
    residual_and_jacobian(f, res.factors, &residual, &jac);
    // Least-norm solution handles the rank deficiency from the rotational
    // gauge freedom of the factors.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac);
    cod.setThreshold(1e-12);
    Vector delta = cod.solve(-residual);

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 20; ++halving) {
      SosFactors trial = res.factors;
      for (int i = 0; i < r; ++i)
        trial.coeffs.row(i) +=
            scale * delta.segment(i * n, n).transpose();
      const double trial_theta = theta_of(trial);
      if (trial_theta < res.theta) {
        res.factors = std::move(trial);
        res.theta = trial_theta;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++res.gn_iterations;
    if (!accepted) break;  // no descent direction left
  }
  res.converged = res.theta <= tol;
  return res;
}

}  // namespace gramsos
