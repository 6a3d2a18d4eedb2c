#include "gramsos/exact.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "gramsos/error.hpp"

namespace gramsos {

Matrix RationalMatrix::to_double() const {
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = gramsos::to_double(at(i, j));
  return out;
}

RationalMatrix RationalMatrix::from_double(const Matrix& w) {
  if (w.rows() != w.cols()) throw Error("matrix is not square");
  RationalMatrix out(static_cast<int>(w.rows()));
  for (int i = 0; i < out.n; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, rational_from_double(w(i, j)));
  return out;
}

Rational best_rational(double x, const Integer& denom_bound) {
  if (denom_bound < 1) throw Error("denominator bound must be at least 1");
  if (!std::isfinite(x)) throw Error("cannot rationalize non-finite value");
  const Rational target = rational_from_double(x);
  if (target.get_den() <= denom_bound) return target;

  // Continued-fraction expansion of the exact dyadic value. Convergents
  // h/k; once k would exceed the bound, the best semiconvergent competes
  // with the last full convergent.
  Integer h_prev = 0, k_prev = 1;  // h_{-2}/k_{-2}
  Integer h = 1, k = 0;            // h_{-1}/k_{-1}
  Rational frac = target;
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), frac.get_num_mpz_t(), frac.get_den_mpz_t());
    Integer k_next = a * k + k_prev;
    if (k_next > denom_bound) {
      // Largest admissible semiconvergent coefficient.
      Integer a_cut = (denom_bound - k_prev) / k;
      Rational best(h, k);
      best.canonicalize();
      if (a_cut >= 1) {
        Rational semi(a_cut * h + h_prev, a_cut * k + k_prev);
        semi.canonicalize();
        if (abs(target - semi) < abs(target - best)) best = semi;
      }
      return best;
    }
    Integer h_next = a * h + h_prev;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    Rational rem = frac - Rational(a);
    if (rem == 0) {
      Rational out(h, k);
      out.canonicalize();
      return out;
    }
    frac = 1 / rem;
  }
}

RationalMatrix rationalize(const Matrix& w, const Integer& denom_bound) {
  if (w.rows() != w.cols()) throw Error("matrix is not square");
  RationalMatrix out(static_cast<int>(w.rows()));
  for (int i = 0; i < out.n; ++i)
    for (int j = 0; j <= i; ++j)
      out.set(i, j, best_rational(w(i, j), denom_bound));
  return out;
}

std::vector<Rational> apply_map_exact(const ConstraintSystem& cs,
                                      const RationalMatrix& w) {
  if (w.n != cs.n) throw Error("matrix dimension does not match system");
  std::vector<Rational> y(cs.p(), Rational(0));
  for (int i = 0; i < cs.p(); ++i)
    for (const auto& e : cs.rows[i]) {
      Rational coef = rational_from_double(e.coef);
      if (e.row == e.col)
        y[i] += coef * w.at(e.row, e.col);
      else
        y[i] += coef * (w.at(e.row, e.col) + w.at(e.col, e.row));
    }
  return y;
}

RationalMatrix apply_adjoint_exact(const ConstraintSystem& cs,
                                   const std::vector<Rational>& y) {
  if (static_cast<int>(y.size()) != cs.p())
    throw Error("vector length does not match constraint count");
  RationalMatrix m(cs.n);
  for (int i = 0; i < cs.p(); ++i) {
    if (y[i] == 0) continue;
    for (const auto& e : cs.rows[i]) {
      Rational v = rational_from_double(e.coef) * y[i];
      m.at(e.row, e.col) += v;
      if (e.row != e.col) m.at(e.col, e.row) += v;
    }
  }
  return m;
}

namespace {

// <A_i, A_j> over the full symmetric matrices: diagonal entries count once,
// off-diagonal stored entries twice.
Rational row_inner(const std::vector<ConstraintEntry>& a,
                   const std::vector<ConstraintEntry>& b) {
  Rational acc(0);
  // Rows are short; quadratic scan is fine.
  for (const auto& ea : a)
    for (const auto& eb : b) {
      if (ea.row != eb.row || ea.col != eb.col) continue;
      Rational prod = rational_from_double(ea.coef) *
                      rational_from_double(eb.coef);
      acc += (ea.row == ea.col) ? prod : 2 * prod;
    }
  return acc;
}

}  // namespace

RationalMatrix project_affine_exact(const RationalMatrix& w,
                                    const ConstraintSystem& cs) {
  if (w.n != cs.n) throw Error("matrix dimension does not match system");
  if (cs.b_exact.empty())
    throw Error("constraint system has no exact right-hand side");
  const int p = cs.p();

  std::vector<Rational> rhs = apply_map_exact(cs, w);
  bool feasible = true;
  for (int i = 0; i < p; ++i) {
    rhs[i] -= cs.b_exact[i];
    if (rhs[i] != 0) feasible = false;
  }
  if (feasible) return w;

  // Detect disjoint row supports: each stored (i, j) pair appearing in at
  // most one constraint makes the Gram matrix M diagonal. Systems built
  // from a polynomial basis always have this shape.
  bool disjoint = true;
  {
    std::vector<char> seen(std::size_t(cs.n) * cs.n, 0);
    for (const auto& row : cs.rows) {
      for (const auto& e : row) {
        char& flag = seen[std::size_t(e.row) * cs.n + e.col];
        if (flag) {
          disjoint = false;
          break;
        }
        flag = 1;
      }
      if (!disjoint) break;
    }
  }

  std::vector<Rational> z(p, Rational(0));
  if (disjoint) {
    for (int i = 0; i < p; ++i) {
      Rational mii = row_inner(cs.rows[i], cs.rows[i]);
      if (mii == 0) {
        if (rhs[i] != 0)
          throw InfeasibleError(
              "constraint system is inconsistent: b is not in the range of "
              "the map");
        continue;
      }
      z[i] = rhs[i] / mii;
    }
  } else {
    if (p > 600)
      throw Error(
          "exact projection with overlapping constraint rows is limited to "
          "600 constraints");
    std::vector<std::vector<Rational>> m(p,
                                         std::vector<Rational>(p, Rational(0)));
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        Rational v = row_inner(cs.rows[i], cs.rows[j]);
        m[i][j] = v;
        m[j][i] = v;
      }

    // Exact Gaussian elimination with partial (first-nonzero) pivoting on
    // [M | rhs]; consistent rank-deficient systems get free variables 0.
    std::vector<int> pivot_col(p, -1);
    int rank = 0;
    for (int col = 0; col < p && rank < p; ++col) {
      int piv = -1;
      for (int row = rank; row < p; ++row)
        if (m[row][col] != 0) {
          piv = row;
          break;
        }
      if (piv < 0) continue;
      std::swap(m[piv], m[rank]);
      std::swap(rhs[piv], rhs[rank]);
      Rational inv = 1 / m[rank][col];
      for (int c = col; c < p; ++c) m[rank][c] *= inv;
      rhs[rank] *= inv;
      for (int row = 0; row < p; ++row) {
        if (row == rank || m[row][col] == 0) continue;
        Rational factor = m[row][col];
        for (int c = col; c < p; ++c) m[row][c] -= factor * m[rank][c];
        rhs[row] -= factor * rhs[rank];
      }
      pivot_col[rank] = col;
      ++rank;
    }
    for (int row = rank; row < p; ++row)
      if (rhs[row] != 0)
        throw InfeasibleError(
            "constraint system is inconsistent: b is not in the range of the "
            "map");
    for (int row = 0; row < rank; ++row) z[pivot_col[row]] = rhs[row];
  }

  RationalMatrix correction = apply_adjoint_exact(cs, z);
  RationalMatrix out(w.n);
  for (int i = 0; i < w.n; ++i)
    for (int j = 0; j < w.n; ++j) out.at(i, j) = w.at(i, j) - correction.at(i, j);

  // The projection must land exactly on the affine subspace.
  std::vector<Rational> check = apply_map_exact(cs, out);
  for (int i = 0; i < p; ++i)
    if (check[i] != cs.b_exact[i])
      throw InfeasibleError(
          "constraint system is inconsistent: b is not in the range of the "
          "map");
  return out;
}

LdlResult exact_psd_check(const RationalMatrix& w) {
  const int n = w.n;
  LdlResult res;
  res.perm.resize(n);
  for (int i = 0; i < n; ++i) res.perm[i] = i;
  res.l.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) res.l[i][i] = 1;
  res.d.assign(n, Rational(0));

  // Work on a permuted copy; perm[k] maps working index k to the original.
  std::vector<std::vector<Rational>> s(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s[i][j] = w.at(i, j);

  auto build_witness = [&](const std::vector<Rational>& u, int k) {
    // u lives in the Schur-complement coordinates k..n-1. Solve
    // L^T y = e_block(u) by back substitution, then undo the permutation.
    std::vector<Rational> y(n, Rational(0));
    for (int i = k; i < n; ++i) y[i] = u[i];
    for (int i = k - 1; i >= 0; --i) {
      Rational acc(0);
      for (int j = i + 1; j < n; ++j) acc += res.l[j][i] * y[j];
      y[i] = -acc;
    }
    res.witness.assign(n, Rational(0));
    for (int i = 0; i < n; ++i) res.witness[res.perm[i]] = y[i];
    // Evaluate v^T w v against the original matrix.
    Rational val(0);
    for (int i = 0; i < n; ++i) {
      if (res.witness[i] == 0) continue;
      for (int j = 0; j < n; ++j)
        if (res.witness[j] != 0)
          val += res.witness[i] * w.at(i, j) * res.witness[j];
    }
    res.witness_value = val;
  };

  for (int k = 0; k < n; ++k) {
    // Largest remaining diagonal entry; ties keep the lowest index.
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (s[i][i] > s[piv][piv]) piv = i;

    if (s[piv][piv] <= 0) {
      // The largest remaining diagonal is non-positive; the block can only
      // be PSD if it is identically zero.
      for (int i = k; i < n; ++i)
        if (s[i][i] < 0) {
          std::vector<Rational> u(n, Rational(0));
          u[i] = 1;
          build_witness(u, k);
          res.psd = false;
          return res;
        }
      for (int i = k; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (s[i][j] != 0) {
            // Zero diagonal with a nonzero coupling: u^T S u = -2|S_ij|.
            std::vector<Rational> u(n, Rational(0));
            u[i] = 1;
            u[j] = s[i][j] > 0 ? Rational(-1) : Rational(1);
            build_witness(u, k);
            res.psd = false;
            return res;
          }
      res.psd = true;
      res.rank = k;
      return res;
    }

    if (piv != k) {
      std::swap(s[piv], s[k]);
      for (int i = 0; i < n; ++i) std::swap(s[i][piv], s[i][k]);
      std::swap(res.perm[piv], res.perm[k]);
      for (int c = 0; c < k; ++c) std::swap(res.l[piv][c], res.l[k][c]);
    }

    const Rational d = s[k][k];
    res.d[k] = d;
    for (int i = k + 1; i < n; ++i) res.l[i][k] = s[i][k] / d;
    for (int i = k + 1; i < n; ++i) {
      if (s[i][k] == 0) continue;
      const Rational factor = s[i][k] / d;
      for (int j = k + 1; j <= i; ++j) {
        s[i][j] -= factor * s[k][j];
        s[j][i] = s[i][j];
      }
    }
    for (int i = k + 1; i < n; ++i) {
      s[i][k] = 0;
      s[k][i] = 0;
    }
  }
  res.psd = true;
  res.rank = 0;
  for (int i = 0; i < n; ++i)
    if (res.d[i] > 0) ++res.rank;
  return res;
}

Polynomial gram_polynomial_exact(const RationalMatrix& w,
                                 const MonomialBasis& basis) {
  if (w.n != basis.size())
    throw Error("matrix dimension does not match basis size");
  Polynomial out(basis.nvars);
  for (int i = 0; i < w.n; ++i)
    for (int j = i; j < w.n; ++j) {
      Rational c = i == j ? w.at(i, i) : w.at(i, j) + w.at(j, i);
      if (c != 0) out.add_term(basis.monomials[i] * basis.monomials[j], c);
    }
  return out;
}

SosCertificate certify(const Polynomial& f, const RationalMatrix& w,
                       const MonomialBasis& basis) {
  SosCertificate cert;
  cert.gram = w;
  cert.basis = basis;
  cert.exact = false;
  cert.residual = Polynomial(f.nvars());

  Polynomial represented = gram_polynomial_exact(w, basis);
  Polynomial residual = f - represented;
  if (!residual.is_zero()) {
    cert.residual = residual;
    return cert;
  }

  LdlResult ldl = exact_psd_check(w);
  if (!ldl.psd) {
    cert.psd_witness = ldl.witness;
    cert.psd_witness_value = ldl.witness_value;
    return cert;
  }

  // f = sum_k d_k q_k^2 with q_k = sum_i L_ik * basis[perm[i]].
  const int n = w.n;
  for (int k = 0; k < n; ++k) {
    if (ldl.d[k] <= 0) continue;
    Polynomial q(basis.nvars);
    for (int i = 0; i < n; ++i)
      if (ldl.l[i][k] != 0)
        q.add_term(basis.monomials[ldl.perm[i]], ldl.l[i][k]);
    cert.weights.push_back(ldl.d[k]);
    cert.squares.push_back(std::move(q));
  }

  // Independent confirmation by re-expansion.
  Polynomial rebuilt(f.nvars());
  for (std::size_t k = 0; k < cert.squares.size(); ++k) {
    Polynomial sq = cert.squares[k] * cert.squares[k];
    for (const auto& [m, c] : sq.terms()) rebuilt.add_term(m, cert.weights[k] * c);
  }
  Polynomial final_residual = f - rebuilt;
  if (!final_residual.is_zero()) {
    cert.residual = final_residual;
    cert.weights.clear();
    cert.squares.clear();
    return cert;
  }
  cert.exact = true;
  return cert;
}

bool verify_certificate(const Polynomial& f, const SosCertificate& cert,
                        std::string* diagnostic) {
  if (cert.gram.n != cert.basis.size()) {
    if (diagnostic) *diagnostic = "gram matrix does not match basis size";
    return false;
  }
  Polynomial represented = gram_polynomial_exact(cert.gram, cert.basis);
  Polynomial residual = f - represented;
  if (!residual.is_zero()) {
    if (diagnostic)
      *diagnostic = "quadratic-form identity fails; residual = " +
                    to_string(residual);
    return false;
  }
  LdlResult ldl = exact_psd_check(cert.gram);
  if (!ldl.psd) {
    if (diagnostic) {
      std::string v = "(";
      for (std::size_t i = 0; i < ldl.witness.size(); ++i) {
        if (i) v += ", ";
        v += to_string(ldl.witness[i]);
      }
      v += ")";
      *diagnostic = "gram matrix is not positive semidefinite; witness v = " +
                    v + " gives v^T W v = " + to_string(ldl.witness_value);
    }
    return false;
  }
  if (cert.weights.size() != cert.squares.size()) {
    if (diagnostic) *diagnostic = "weight/square count mismatch";
    return false;
  }
  Polynomial rebuilt(f.nvars());
  for (std::size_t k = 0; k < cert.squares.size(); ++k) {
    if (cert.weights[k] <= 0) {
      if (diagnostic) *diagnostic = "non-positive weight in certificate";
      return false;
    }
    Polynomial sq = cert.squares[k] * cert.squares[k];
    for (const auto& [m, c] : sq.terms())
      rebuilt.add_term(m, cert.weights[k] * c);
  }
  Polynomial res2 = f - rebuilt;
  if (!res2.is_zero()) {
    if (diagnostic)
      *diagnostic =
          "weighted squares do not reproduce the input; residual = " +
          to_string(res2);
    return false;
  }
  return true;
}

std::string certificate_to_json(const SosCertificate& cert) {
  nlohmann::json j;
  j["exact"] = cert.exact;
  auto weights = nlohmann::json::array();
  for (const auto& d : cert.weights) weights.push_back(to_string(d));
  j["weights"] = std::move(weights);
  auto squares = nlohmann::json::array();
  for (const auto& q : cert.squares) squares.push_back(to_string(q));
  j["squares"] = std::move(squares);
  auto gram = nlohmann::json::array();
  for (int i = 0; i < cert.gram.n; ++i) {
    auto row = nlohmann::json::array();
    for (int jx = 0; jx < cert.gram.n; ++jx)
      row.push_back(to_string(cert.gram.at(i, jx)));
    gram.push_back(std::move(row));
  }
  j["gram"] = std::move(gram);
  auto basis = nlohmann::json::array();
  for (const auto& m : cert.basis.monomials) basis.push_back(to_string(m));
  j["basis"] = std::move(basis);
  j["nvars"] = cert.basis.nvars;
  return j.dump(2);
}

SosCertificate certificate_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid certificate JSON: ") + e.what());
  }
  SosCertificate cert;
  try {
    cert.exact = j.at("exact").get<bool>();
    const int nvars = j.at("nvars").get<int>();
    // File order defines the gram row/column labels, so it is preserved
    // as-is (our writer emits canonical order anyway).
    std::vector<Monomial> mons;
    for (const auto& ms : j.at("basis")) {
      Polynomial pm = parse_polynomial(ms.get<std::string>(), nvars);
      if (pm.term_count() != 1 || pm.terms().begin()->second != 1)
        throw Error("basis entry is not a monomial");
      mons.push_back(pm.terms().begin()->first);
    }
    {
      std::set<Monomial, GradedLexLess> unique(mons.begin(), mons.end());
      if (unique.size() != mons.size())
        throw Error("certificate basis contains duplicates");
    }
    cert.basis.nvars = nvars;
    cert.basis.max_degree = 0;
    for (const auto& m : mons)
      cert.basis.max_degree = std::max(cert.basis.max_degree, m.degree());
    cert.basis.monomials = std::move(mons);
    const auto& gram = j.at("gram");
    const int n = static_cast<int>(gram.size());
    if (n != cert.basis.size())
      throw Error("gram size does not match basis size");
    cert.gram = RationalMatrix(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(gram[i].size()) != n)
        throw Error("gram matrix is not square");
      for (int k = 0; k < n; ++k)
        cert.gram.at(i, k) =
            rational_from_string(gram[i][k].get<std::string>());
    }
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < i; ++k)
        if (cert.gram.at(i, k) != cert.gram.at(k, i))
          throw Error("gram matrix is not symmetric");
    for (const auto& ws : j.at("weights"))
      cert.weights.push_back(rational_from_string(ws.get<std::string>()));
    for (const auto& qs : j.at("squares"))
      cert.squares.push_back(parse_polynomial(qs.get<std::string>(), nvars));
    cert.residual = Polynomial(nvars);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid certificate JSON: ") + e.what());
  }
  return cert;
}

}  // namespace gramsos
