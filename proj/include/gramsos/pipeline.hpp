#pragma once

#include <optional>
#include <string>

#include "gramsos/exact.hpp"
#include "gramsos/refine.hpp"
#include "gramsos/solver.hpp"

namespace gramsos {

struct SosOptions {
  SolverConfig solver;
  std::optional<int> rank;  // truncation rank; estimated from W if unset
  int rank_retries = 3;     // additional ranks tried after the first
  double gn_tol = 1e-12;
  int max_gn = 50;
  // Denominator ladder for rationalization: a few cheap small bounds (a
  // refined solution near a simple rational matrix snaps exactly), then
  // this bound, then x 2^16 escalations up to 2^128.
  Integer denom_bound = Integer(1) << 32;
  bool approx_ok = false;  // accept a solver-only result at tolerance
};

// Everything the front ends report about one end-to-end run.
struct SosOutcome {
  bool exact = false;
  bool approx_accepted = false;
  SosCertificate certificate;
  SolveResult solve_result;
  RefineResult refine_result;
  MonomialBasis basis;
  int constraint_count = 0;
  std::string denom_bound_used;  // bound that produced the certificate
  std::string failure_stage;     // empty on success
  std::string diagnostic;
};

// Full Gram-completion pipeline: basis and constraints from f, iterative
// solve, truncated factorization, Gauss-Newton refinement, rationalization
// with exact projection, and exact certification.
SosOutcome sos_pipeline(const Polynomial& f, const SosOptions& options = {});

// Refinement + exact recovery from an already-solved Gram matrix; used by
// sos_pipeline and by callers that bring their own solver output.
SosOutcome recover_certificate(const Polynomial& f, const MonomialBasis& basis,
                               const ConstraintSystem& cs, const Matrix& w,
                               const SosOptions& options);

}  // namespace gramsos
