#include "gramsos/pipeline.hpp"

#include <algorithm>
#include <vector>

#include "gramsos/error.hpp"
#include "gramsos/spectral.hpp"

namespace gramsos {

namespace {

std::vector<Integer> denominator_ladder(const Integer& configured) {
  std::vector<Integer> ladder;
  std::vector<Integer> small_bounds;
  small_bounds.emplace_back(1);
  small_bounds.push_back(Integer(1) << 8);
  small_bounds.push_back(Integer(1) << 16);
  for (const Integer& small : small_bounds)
    if (small < configured) ladder.push_back(small);
  Integer bound = configured;
  const Integer cap = Integer(1) << 128;
  while (true) {
    ladder.push_back(bound);
    if (bound >= cap) break;
    bound <<= 16;
    if (bound > cap) bound = cap;
  }
  return ladder;
}

// Rank candidates: the estimate from the spectrum, then a few larger ones.
std::vector<int> rank_ladder(const Matrix& w, std::optional<int> requested,
                             int retries) {
  EigenDecomposition ed = schur_sym(w);
  const double top = std::max(ed.lambda.maxCoeff(), 0.0);
  int positive = 0;
  while (positive < ed.count() &&
         ed.lambda(positive) > 1e-10 * std::max(1.0, top))
    ++positive;
  int first;
  if (requested) {
    first = *requested;
  } else {
    first = 0;
    for (int i = 0; i < ed.count(); ++i)
      if (ed.lambda(i) > 5e-2 * top) ++first;
    first = std::max(first, 1);
  }
  std::vector<int> ranks;
  for (int r = first; r <= first + retries; ++r) {
    if (r < 1) continue;
    if (r > positive) break;
    ranks.push_back(r);
  }
  if (ranks.empty() && positive >= 1) ranks.push_back(std::min(first, positive));
  return ranks;
}

}  // namespace

SosOutcome recover_certificate(const Polynomial& f, const MonomialBasis& basis,
                               const ConstraintSystem& cs, const Matrix& w,
                               const SosOptions& options) {
  SosOutcome out;
  out.basis = basis;
  out.constraint_count = cs.p();

  const std::vector<int> ranks =
      rank_ladder(w, options.rank, options.rank_retries);
  if (ranks.empty()) {
    out.failure_stage = "factorization";
    out.diagnostic = "solver output has no positive spectrum to factor";
    return out;
  }
  const std::vector<Integer> ladder = denominator_ladder(options.denom_bound);

  std::string last_diag;
  bool have_best = false;
  for (int r : ranks) {
    SosFactors seed = truncated_factor(w, r, basis);
    RefineResult refined =
        gauss_newton_refine(f, seed, options.gn_tol, options.max_gn);
    if (!have_best || refined.theta < out.refine_result.theta) {
      out.refine_result = refined;
      have_best = true;
    }
    if (refined.theta > 1e-6) {
      last_diag = "Gauss-Newton stalled at theta = " +
                  std::to_string(refined.theta) + " for rank " +
                  std::to_string(r);
      continue;
    }
    out.refine_result = refined;
    Matrix w_refined = gram_from_factors(refined.factors);

    for (const Integer& bound : ladder) {
      RationalMatrix candidate = rationalize(w_refined, bound);
      RationalMatrix projected;
      try {
        projected = project_affine_exact(candidate, cs);
      } catch (const InfeasibleError& e) {
        last_diag = e.what();
        continue;
      }
      SosCertificate cert = certify(f, projected, basis);
      if (cert.exact) {
        out.certificate = std::move(cert);
        out.exact = true;
        out.denom_bound_used = bound.get_str();
        return out;
      }
      if (!cert.psd_witness.empty())
        last_diag =
            "projected matrix is not PSD at denominator bound " +
            bound.get_str() + " (witness value " +
            to_string(cert.psd_witness_value) +
            "); consider refining to a smaller backward error";
      else
        last_diag = "exact identity check failed at denominator bound " +
                    bound.get_str();
    }
  }
  out.failure_stage = "certification";
  out.diagnostic = last_diag.empty() ? "no certificate found" : last_diag;
  return out;
}

SosOutcome sos_pipeline(const Polynomial& f, const SosOptions& options) {
  SosOutcome out;
  if (f.is_zero()) {
    // Trivially a sum of zero squares.
    out.basis = build_basis(f);
    ConstraintSystem cs = build_constraints(f, out.basis);
    out.constraint_count = cs.p();
    out.certificate =
        certify(f, RationalMatrix(out.basis.size()), out.basis);
    out.exact = out.certificate.exact;
    return out;
  }

  MonomialBasis basis;
  ConstraintSystem cs;
  try {
    basis = build_basis(f);
    cs = build_constraints(f, basis);
  } catch (const Error& e) {
    out.failure_stage = "constraints";
    out.diagnostic = e.what();
    return out;
  }

  SolveResult solved = solve(cs, options.solver);
  out.solve_result = solved;
  out.basis = basis;
  out.constraint_count = cs.p();
  if (!solved.converged && !options.approx_ok) {
    // Keep going: refinement can still rescue a near-feasible iterate, but
    // remember the solver did not meet its tolerance.
    if (solved.rel_err > 0.1) {
      out.failure_stage = "solve";
      out.diagnostic = "solver did not converge (rel_err = " +
                       std::to_string(solved.rel_err) + ")";
      return out;
    }
  }

  SosOutcome rec = recover_certificate(f, basis, cs, solved.w, options);
  rec.solve_result = std::move(out.solve_result);
  if (!rec.exact && options.approx_ok && solved.converged)
    rec.approx_accepted = true;
  return rec;
}

}  // namespace gramsos
