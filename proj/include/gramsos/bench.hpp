#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gramsos/constraints.hpp"
#include "gramsos/exact.hpp"
#include "gramsos/solver.hpp"

namespace gramsos {

// A planted low-rank completion problem: W = L L^T for an integer factor L,
// f = basis^T W basis expanded exactly; the generated system is feasible at
// W by construction.
struct BenchInstance {
  int n = 0;
  int r = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<Rational>> factor_l;  // n x r
  RationalMatrix w_true;
  MonomialBasis basis;
  Polynomial f;
  ConstraintSystem cs;
  double fr = 0;  // freedom ratio d_r / p
};

// d_r / p with d_r = r (2n - r + 1) / 2, the degree-of-freedom count of an
// n x n symmetric matrix of rank r.
double freedom_ratio(int n, int r, int p);

// Instance with Gram dimension n and planted rank r. The basis takes the
// first n monomials of degree <= 2 in the fewest variables that provide
// them; sparse_basis instead samples n monomials from a three-times larger
// pool, which raises p and lowers the freedom ratio. Entries of L are
// integers in [-entry_bound, entry_bound].
BenchInstance random_instance(int n, int r, std::uint64_t seed,
                              int entry_bound = 5, bool sparse_basis = false);

struct ExperimentSpec {
  std::vector<std::pair<int, int>> pairs;  // (n, r)
  std::vector<Variant> variants = {Variant::AfpcBb};
  std::vector<std::uint64_t> seeds = {1};
  double epsilon = 1e-3;
  bool continuation = true;
  bool sparse_basis = false;
  int entry_bound = 5;
  int max_iter = 2000;
  SchurMode schur_mode = SchurMode::Auto;
  int workers = 0;        // 0: one per hardware thread, capped by
                          // GRAMSOS_THREADS
  int size_limit = 500;   // refuse larger n unless allow_large is set
  bool allow_large = false;
};

struct BenchRecord {
  std::string variant;
  int n = 0;
  int r = 0;
  int p = 0;
  double fr = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double time_s = 0;
  double rel_err = 0;
  int rank = 0;
  bool converged = false;
  bool failed = false;  // harness-level failure (exception), not recorded
                        // non-convergence
  std::string error;
};

struct Aggregate {
  std::string variant;
  int n = 0;
  int r = 0;
  double median_iterations = 0;
  double median_rel_err = 0;
  double median_time_s = 0;
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<Aggregate> aggregates;
};

// Runs every (pair, variant, seed) combination, independent solves in
// parallel, and aggregates medians per (variant, n, r) group. Individual
// run failures are recorded and the harness continues.
BenchReport run_experiment(const ExperimentSpec& spec);

std::string report_to_csv(const BenchReport& report);
std::string report_to_json(const BenchReport& report);

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);

}  // namespace gramsos
