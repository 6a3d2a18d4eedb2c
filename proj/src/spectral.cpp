#include "gramsos/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gramsos/error.hpp"

namespace gramsos {

namespace {

void normalize_column_signs(Matrix& q) {
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const double colmax = q.col(c).cwiseAbs().maxCoeff();
    if (colmax == 0.0) continue;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      if (std::abs(q(i, c)) > 1e-10 * colmax) {
        if (q(i, c) < 0) q.col(c) *= -1.0;
        break;
      }
    }
  }
}

void sort_non_increasing(Matrix& q, Vector& lambda) {
  const int k = static_cast<int>(lambda.size());
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lambda(a) > lambda(b); });
  Matrix q2(q.rows(), k);
  Vector l2(k);
  for (int i = 0; i < k; ++i) {
    q2.col(i) = q.col(order[i]);
    l2(i) = lambda(order[i]);
  }
  q = std::move(q2);
  lambda = std::move(l2);
}

}  // namespace

EigenDecomposition schur_sym(const Matrix& w) {
  if (w.rows() != w.cols()) throw Error("matrix is not square");
  if (!w.allFinite()) throw Error("matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success)
    throw Error("symmetric eigendecomposition failed");
  EigenDecomposition ed;
  ed.q = es.eigenvectors();
  ed.lambda = es.eigenvalues();
  sort_non_increasing(ed.q, ed.lambda);
  normalize_column_signs(ed.q);
  ed.complete = true;
  return ed;
}

EigenDecomposition lanczos_topk(const Matrix& w, int k) {
  const int n = static_cast<int>(w.rows());
  if (k < 1 || k > n) throw Error("requested eigenpair count out of range");
  if (!w.allFinite()) throw Error("matrix has non-finite entries");

  const double scale = std::max(1.0, w.norm());
  std::mt19937_64 rng(0x1a2b3c4d5e6f7081ull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_unit = [&](int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = unit(rng);
    v.normalize();
    return v;
  };

  int m = std::min(n, std::max(2 * k + 20, 40));
  while (true) {
    Matrix v(n, m);
    Vector alpha = Vector::Zero(m);
    // beta(j) is the residual coupling out of column j; zero where the
    // recurrence was restarted after hitting an invariant subspace.
    Vector beta = Vector::Zero(m);
    v.col(0) = random_unit(n);
    int built = 0;
    bool exhausted = false;
    for (int j = 0; j < m; ++j) {
      Vector u = w * v.col(j);
      alpha(j) = v.col(j).dot(u);
      u -= alpha(j) * v.col(j);
      if (j > 0 && beta(j - 1) != 0.0) u -= beta(j - 1) * v.col(j - 1);
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass)
        u -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * u);
      built = j + 1;
      beta(j) = u.norm();
      if (j + 1 == m) break;
      if (beta(j) < 1e-13 * scale) {
        // Invariant subspace found; restart with a fresh direction and
        // leave the block decoupled.
        Vector fresh = random_unit(n);
        for (int pass = 0; pass < 2; ++pass)
          fresh -=
              v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * fresh);
        const double fn = fresh.norm();
        if (fn < 1e-10) {
          exhausted = true;  // basis spans everything reachable
          break;
        }
        beta(j) = 0.0;
        v.col(j + 1) = fresh / fn;
      } else {
        v.col(j + 1) = u / beta(j);
      }
    }

    Matrix t = Matrix::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      t(j, j) = alpha(j);
      if (j + 1 < built) {
        t(j, j + 1) = beta(j);
        t(j + 1, j) = beta(j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    Vector ritz = es.eigenvalues();
    Matrix s = es.eigenvectors();

    std::vector<int> order(built);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ritz(a) > ritz(b); });

    const int avail = std::min(k, built);
    // Ritz residual ||W x - theta x|| = |beta_last * s(last, i)|.
    bool converged = true;
    const double last_beta = exhausted ? 0.0 : beta(built - 1);
    for (int i = 0; i < avail && converged; ++i)
      if (std::abs(last_beta * s(built - 1, order[i])) > 1e-11 * scale)
        converged = false;
    if (converged || exhausted || built >= n || m >= n) {
      EigenDecomposition ed;
      ed.q.resize(n, avail);
      ed.lambda.resize(avail);
      for (int i = 0; i < avail; ++i) {
        ed.q.col(i) = v.leftCols(built) * s.col(order[i]);
        ed.q.col(i).normalize();
        ed.lambda(i) = ritz(order[i]);
      }
      normalize_column_signs(ed.q);
      ed.complete = (avail == n);
      return ed;
    }
    m = std::min(n, 2 * m);
  }
}

EigenDecomposition partial_schur(const Matrix& w, int s_k) {
  const int n = static_cast<int>(w.rows());
  if (s_k < 1 || s_k > n)
    throw Error("s_k = " + std::to_string(s_k) + " out of range [1, " +
                std::to_string(n) + "]");
  if (n <= 200 || s_k > n / 4) {
    EigenDecomposition full = schur_sym(w);
    if (s_k == n) return full;
    EigenDecomposition ed;
    ed.q = full.q.leftCols(s_k);
    ed.lambda = full.lambda.head(s_k);
    ed.complete = false;
    return ed;
  }
  return lanczos_topk(w, s_k);
}

Matrix threshold(const EigenDecomposition& ed, double nu) {
  if (nu < 0) throw Error("threshold level must be non-negative");
  const int n = static_cast<int>(ed.q.rows());
  int keep = 0;
  while (keep < ed.count() && ed.lambda(keep) - nu > 0.0) ++keep;
  if (keep == 0) return Matrix::Zero(n, n);
  Matrix qk = ed.q.leftCols(keep);
  Vector shifted = ed.lambda.head(keep).array() - nu;
  Matrix out = qk * shifted.asDiagonal() * qk.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

Matrix threshold(const Matrix& w, double nu) {
  return threshold(schur_sym(w), nu);
}

double nuclear_norm(const Matrix& w) {
  return schur_sym(w).lambda.cwiseAbs().sum();
}

}  // namespace gramsos
