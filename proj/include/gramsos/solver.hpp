#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gramsos/constraints.hpp"
#include "gramsos/spectral.hpp"
#include "gramsos/types.hpp"

namespace gramsos {

enum class Variant { Mfpc, MfpcBb, AfpcBb };
enum class BbRule { Bb1, Bb2 };
enum class SchurMode { Auto, Full, Partial };
enum class MuNorm { Spectral, Frobenius };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

// All schedule parameters. Fields left unset are resolved from the problem
// at solve time: with L = ||A||_2^2 and rho = ||A* b|| the defaults are
//   mu_1 = rho/4, mu_bar = 1e-4 rho, tau_min = 1e-3/L, tau_max = 10/L,
//   tau_0 = 1/L, tau_fixed = 1.99/L.
struct SolverConfig {
  Variant variant = Variant::AfpcBb;
  std::optional<double> mu_bar;
  std::optional<double> mu_1;
  double eta = 0.25;  // mu reduction factor, in (0, 1)
  // Setting continuation = false collapses the schedule to the single
  // stage mu = mu_bar.
  bool continuation = true;
  std::optional<double> tau_fixed;  // plain Mfpc step size
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  std::optional<double> tau_0;  // first step before a BB pair exists
  double epsilon = 1e-3;        // relative-error stopping tolerance
  double eps_rank = 1e-2;       // relative cutoff for the s_k estimate
  int max_iter = 1000;
  double xtol = 1e-8;  // final-stage stagnation tolerance
  // Intermediate stages only warm-start the next one, so they advance as
  // soon as the iterate settles to this looser tolerance.
  double stage_xtol = 1e-3;
  BbRule bb_rule = BbRule::Bb1;
  SchurMode schur_mode = SchurMode::Auto;
  MuNorm mu_norm = MuNorm::Spectral;
  bool collect_history = true;
};

struct ResolvedParams {
  double op_norm_sq = 0;  // L
  double mu_1 = 0;
  double mu_bar = 0;
  double tau_fixed = 0;
  double tau_min = 0;
  double tau_max = 0;
  double tau_0 = 0;
  bool partial = false;  // partial decompositions inside the loop
};

ResolvedParams resolve_params(const ConstraintSystem& cs,
                              const SolverConfig& config);

struct HistoryRow {
  int iter = 0;
  double mu = 0;
  double tau = 0;
  int s_k = 0;
  double rel_err = 0;
  double objective = 0;
  int rank = 0;
};

// Everything one iteration needs from the previous ones.
struct SolverState {
  Matrix x;       // X^k (positive semidefinite after the first step)
  Matrix x_prev;  // X^{k-1}
  Matrix g;       // A*(A(X^k) - b)
  Matrix g_prev;
  Matrix y_prev;  // pre-threshold iterate, for the non-expansivity monitor
  bool has_y_prev = false;
  bool has_bb_pair = false;
  double tau = 0;
  double t = 1, t_prev = 1;  // acceleration scalars
  double mu = 0;
  int s_k = 1;
  // Every eigenvalue computed by the last partial decomposition survived
  // the threshold, so the window may be hiding spectrum.
  bool window_saturated = false;
  // Window floor raised when a saturated window stalls the final stage.
  int s_k_min = 1;
  int violation_count = 0;
  int iter = 0;
  Vector lambda;  // spectrum of x after thresholding
  double rel_err = 0;
  double objective = 0;
  int rank = 0;
};

SolverState make_state(const ConstraintSystem& cs);

// BB1 step <dX,dg>/<dg,dg> (or BB2 <dX,dX>/<dX,dg>) clamped to
// [tau_min, tau_max]. A vanishing denominator keeps prev_tau; a negative
// or non-finite ratio falls back to tau_max before clamping.
double bb_step_size(const Matrix& dx, const Matrix& dg, double tau_min,
                    double tau_max, double prev_tau,
                    BbRule rule = BbRule::Bb1);

// One shrinkage iteration: Y = X - tau A*(A(X)-b), X+ = D_{tau mu}(Y).
void mfpc_step(SolverState& st, const ConstraintSystem& cs, double tau,
               double mu, bool partial = false);

// Accelerated variant: the gradient step is taken at the extrapolated
// point Z = X + ((t_prev - 1)/t)(X - X_prev) and t follows
// t+ = (1 + sqrt(1 + 4 t^2))/2.
void afpc_step(SolverState& st, const ConstraintSystem& cs, double tau,
               double mu, bool partial = false);

// s_k rule: count entries of the previous thresholded spectrum at or above
// eps_rank times its largest entry (floor 1). Ten accumulated
// non-expansivity violations raise s_k by one and reset the counter.
int update_rank_estimate(SolverState& st, const Vector& lambda_prev,
                         double eps_rank, int n);

struct SolveResult {
  Matrix w;
  double rel_err = 0;
  int iterations = 0;
  int rank = 0;
  double fixed_point_residual = 0;
  bool converged = false;
  std::vector<HistoryRow> history;
  ResolvedParams params;
};

// Continuation outer loop over mu with warm starts; the inner loop runs the
// configured variant until rel_err <= epsilon, stagnation, or max_iter.
SolveResult solve(const ConstraintSystem& cs, const SolverConfig& config = {});

// || W - D_{tau mu}(W - tau A*(A(W)-b)) ||_F; zero exactly at the optimum
// of the mu-regularized problem.
double fixed_point_residual(const Matrix& w, const ConstraintSystem& cs,
                            double tau, double mu);

// Numerical rank #{lambda_i > 1e-6 lambda_1} of a PSD matrix spectrum.
int numerical_rank(const Vector& lambda);

void history_to_csv(const std::vector<HistoryRow>& history, std::ostream& out);

}  // namespace gramsos
