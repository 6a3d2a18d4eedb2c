#pragma once

#include <random>

#include "gramsos/polynomial.hpp"
#include "gramsos/types.hpp"

namespace gramsos::testing {

inline Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      w(i, j) = unit(rng);
      w(j, i) = w(i, j);
    }
  return w;
}

inline Matrix random_psd(int n, int rank, std::mt19937_64& rng,
                         double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Matrix g(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = unit(rng);
  return g * g.transpose();
}

inline Rational random_rational(std::mt19937_64& rng, int num_bound = 20,
                                int den_bound = 10) {
  std::uniform_int_distribution<int> num(-num_bound, num_bound);
  std::uniform_int_distribution<int> den(1, den_bound);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline Polynomial random_polynomial(int nvars, int max_degree, int max_terms,
                                    std::mt19937_64& rng) {
  Polynomial f(nvars);
  std::uniform_int_distribution<int> terms(1, max_terms);
  std::uniform_int_distribution<int> expo(0, max_degree);
  const int count = terms(rng);
  for (int t = 0; t < count; ++t) {
    std::vector<int> e(nvars, 0);
    int budget = max_degree;
    for (int v = 0; v < nvars; ++v) {
      const int x = expo(rng) % (budget + 1);
      e[v] = x;
      budget -= x;
    }
    f.add_term(Monomial(std::move(e)), random_rational(rng));
  }
  return f;
}

}  // namespace gramsos::testing
