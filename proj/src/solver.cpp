#include "gramsos/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gramsos/error.hpp"

namespace gramsos {

Variant variant_from_string(const std::string& name) {
  if (name == "mfpc") return Variant::Mfpc;
  if (name == "mfpc-bb") return Variant::MfpcBb;
  if (name == "afpc-bb") return Variant::AfpcBb;
  throw Error("unknown solver variant '" + name +
              "' (expected mfpc, mfpc-bb or afpc-bb)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Mfpc:
      return "mfpc";
    case Variant::MfpcBb:
      return "mfpc-bb";
    case Variant::AfpcBb:
      return "afpc-bb";
  }
  return "?";
}

ResolvedParams resolve_params(const ConstraintSystem& cs,
                              const SolverConfig& config) {
  if (config.eta <= 0 || config.eta >= 1)
    throw Error("eta must lie in (0, 1)");
  ResolvedParams rp;
  rp.op_norm_sq = op_norm_sq(cs);
  const double l = std::max(rp.op_norm_sq, 1e-300);

  double rho = 0.0;
  if (!config.mu_1 || !config.mu_bar) {
    Matrix astar_b = apply_adjoint(cs, cs.b);
    rho = config.mu_norm == MuNorm::Frobenius
              ? astar_b.norm()
              : schur_sym(astar_b).lambda.cwiseAbs().maxCoeff();
  }
  rp.mu_bar = config.mu_bar.value_or(1e-4 * rho);
  rp.mu_1 = config.mu_1.value_or(0.25 * rho);
  if (!config.continuation) rp.mu_1 = rp.mu_bar;
  if (rp.mu_bar <= 0) rp.mu_bar = 1e-12;
  rp.mu_1 = std::max(rp.mu_1, rp.mu_bar);

  rp.tau_min = config.tau_min.value_or(1e-3 / l);
  rp.tau_max = config.tau_max.value_or(10.0 / l);
  rp.tau_0 = config.tau_0.value_or(1.0 / l);
  rp.tau_fixed = config.tau_fixed.value_or(1.99 / l);
  if (!(rp.tau_min > 0) || !(rp.tau_min < rp.tau_max))
    throw Error("step bounds must satisfy 0 < tau_min < tau_max");
  rp.tau_0 = std::clamp(rp.tau_0, rp.tau_min, rp.tau_max);

  switch (config.schur_mode) {
    case SchurMode::Full:
      rp.partial = false;
      break;
    case SchurMode::Partial:
      rp.partial = true;
      break;
    case SchurMode::Auto:
      rp.partial = true;
      break;
  }
  return rp;
}

SolverState make_state(const ConstraintSystem& cs) {
  SolverState st;
  st.x = Matrix::Zero(cs.n, cs.n);
  st.x_prev = st.x;
  st.g = apply_adjoint(cs, apply_map(cs, st.x) - cs.b);
  st.g_prev = st.g;
  st.s_k = cs.n;
  const double bnorm = cs.b.norm();
  st.rel_err = bnorm > 0 ? 1.0 : 0.0;
  return st;
}

double bb_step_size(const Matrix& dx, const Matrix& dg, double tau_min,
                    double tau_max, double prev_tau, BbRule rule) {
  const double gg = dg.squaredNorm();
  const double xg = (dx.array() * dg.array()).sum();
  double raw;
  if (rule == BbRule::Bb1) {
    if (gg == 0.0) return std::clamp(prev_tau, tau_min, tau_max);
    raw = xg / gg;
  } else {
    if (xg == 0.0) return std::clamp(prev_tau, tau_min, tau_max);
    raw = dx.squaredNorm() / xg;
  }
  if (!std::isfinite(raw) || raw <= 0.0) raw = tau_max;
  return std::clamp(raw, tau_min, tau_max);
}

int numerical_rank(const Vector& lambda) {
  if (lambda.size() == 0) return 0;
  const double top = lambda.maxCoeff();
  if (top <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 1e-6 * top) ++r;
  return r;
}

namespace {

void step_impl(SolverState& st, const ConstraintSystem& cs, double tau,
               double mu, bool accelerate, bool partial) {
  if (!(tau > 0) || !(mu > 0)) throw Error("step requires tau > 0 and mu > 0");
  const double nu = tau * mu;

  Matrix base;
  if (accelerate && st.t > 1.0) {
    const double beta = (st.t_prev - 1.0) / st.t;
    base = st.x + beta * (st.x - st.x_prev);
  } else {
    base = st.x;
  }

  Vector residual = apply_map(cs, base) - cs.b;
  Matrix y = base - tau * apply_adjoint(cs, residual);

  const int n = cs.n;
  const int sk = std::clamp(st.s_k, 1, n);
  EigenDecomposition ed = partial ? partial_schur(y, sk) : schur_sym(y);
  Matrix x_next = threshold(ed, nu);

  if (st.has_y_prev) {
    const double dxn = (x_next - st.x).norm();
    const double dyn = (y - st.y_prev).norm();
    if (dxn > dyn + 1e-12 * std::max(1.0, dyn)) ++st.violation_count;
  }

  Vector residual_next = apply_map(cs, x_next) - cs.b;
  Matrix g_next = apply_adjoint(cs, residual_next);

  st.g_prev = st.g;
  st.g = std::move(g_next);
  st.x_prev = st.x;
  st.x = std::move(x_next);
  st.y_prev = std::move(y);
  st.has_y_prev = true;
  st.has_bb_pair = true;
  st.tau = tau;
  st.mu = mu;

  Vector lam = (ed.lambda.array() - nu).max(0.0);
  st.lambda = std::move(lam);
  st.rank = numerical_rank(st.lambda);
  int kept = 0;
  while (kept < ed.count() && ed.lambda(kept) > nu) ++kept;
  st.window_saturated = partial && !ed.complete && kept == ed.count();

  const double bnorm = cs.b.norm();
  const double rnorm = residual_next.norm();
  st.rel_err = bnorm > 0 ? rnorm / bnorm : rnorm;
  st.objective = mu * st.x.trace() + 0.5 * rnorm * rnorm;

  if (accelerate) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * st.t * st.t));
    st.t_prev = st.t;
    st.t = t_next;
  }
  ++st.iter;
}

}  // namespace

void mfpc_step(SolverState& st, const ConstraintSystem& cs, double tau,
               double mu, bool partial) {
  step_impl(st, cs, tau, mu, /*accelerate=*/false, partial);
}

void afpc_step(SolverState& st, const ConstraintSystem& cs, double tau,
               double mu, bool partial) {
  step_impl(st, cs, tau, mu, /*accelerate=*/true, partial);
}

int update_rank_estimate(SolverState& st, const Vector& lambda_prev,
                         double eps_rank, int n) {
  int count = 0;
  if (lambda_prev.size() > 0) {
    const double top = lambda_prev.maxCoeff();
    if (top > 0.0) {
      const double cut = eps_rank * top;
      for (Eigen::Index i = 0; i < lambda_prev.size(); ++i)
        if (lambda_prev(i) >= cut) ++count;
    }
  }
  int s = std::max(1, count);
  if (st.violation_count >= 10) {
    s = std::max(s, st.s_k) + 1;
    st.violation_count = 0;
  }
  st.s_k = std::min(s, n);
  return st.s_k;
}

SolveResult solve(const ConstraintSystem& cs, const SolverConfig& config) {
  if (cs.n <= 0 || cs.p() == 0) throw Error("empty constraint system");
  ResolvedParams rp = resolve_params(cs, config);
  SolveResult out;
  out.params = rp;

  const double bnorm = cs.b.norm();
  if (bnorm == 0.0) {
    // X = 0 is already the fixed point.
    out.w = Matrix::Zero(cs.n, cs.n);
    out.converged = true;
    return out;
  }

  SolverState st = make_state(cs);
  bool converged = false;
  bool out_of_budget = false;
  double mu = rp.mu_1;

  while (true) {
    // New continuation stage: restart the acceleration ramp.
    st.t = 1.0;
    st.t_prev = 1.0;
    const bool final_stage = mu <= rp.mu_bar;
    const double advance_tol =
        final_stage ? config.xtol : std::max(config.stage_xtol, config.xtol);
    bool stage_stalled = false;
    while (!stage_stalled) {
      if (st.iter >= config.max_iter) {
        out_of_budget = true;
        break;
      }
      double tau;
      if (config.variant == Variant::Mfpc) {
        tau = rp.tau_fixed;
      } else if (st.has_bb_pair) {
        tau = bb_step_size(st.x - st.x_prev, st.g - st.g_prev, rp.tau_min,
                           rp.tau_max, st.tau > 0 ? st.tau : rp.tau_0,
                           config.bb_rule);
      } else {
        tau = rp.tau_0;
      }
      if (st.iter > 0)
        update_rank_estimate(st, st.lambda, config.eps_rank, cs.n);
      st.s_k = std::min(cs.n, std::max(st.s_k, st.s_k_min));

      const Matrix x_before = st.x;
      if (config.variant == Variant::AfpcBb)
        afpc_step(st, cs, tau, mu, rp.partial);
      else
        mfpc_step(st, cs, tau, mu, rp.partial);

      if (config.collect_history)
        out.history.push_back(HistoryRow{st.iter, mu, tau, st.s_k, st.rel_err,
                                         st.objective, st.rank});
      if (st.rel_err <= config.epsilon) {
        converged = true;
        break;
      }
      const double change =
          (st.x - x_before).norm() / std::max(1.0, x_before.norm());
      if (change < advance_tol) stage_stalled = true;
      // A saturated window can lock the iteration into a subspace that is
      // too small; when that stalls the final stage short of the target,
      // widen the window and keep going.
      if (stage_stalled && final_stage && rp.partial &&
          st.window_saturated && st.s_k < cs.n) {
        st.s_k_min = std::min(cs.n, 2 * std::max(1, st.s_k));
        st.s_k = st.s_k_min;
        stage_stalled = false;
      }
    }
    if (converged || out_of_budget) break;
    if (mu <= rp.mu_bar) break;  // final stage stalled
    mu = std::max(config.eta * mu, rp.mu_bar);
  }

  out.w = st.x;
  out.rel_err = st.rel_err;
  out.iterations = st.iter;
  out.converged = converged;
  out.rank = st.rank;
  const double tau_final = st.tau > 0 ? st.tau : rp.tau_0;
  out.fixed_point_residual =
      fixed_point_residual(st.x, cs, tau_final, rp.mu_bar);
  return out;
}

double fixed_point_residual(const Matrix& w, const ConstraintSystem& cs,
                            double tau, double mu) {
  if (!(tau > 0) || !(mu > 0))
    throw Error("fixed-point residual requires tau > 0 and mu > 0");
  Vector residual = apply_map(cs, w) - cs.b;
  Matrix h = w - tau * apply_adjoint(cs, residual);
  return (w - threshold(h, tau * mu)).norm();
}

void history_to_csv(const std::vector<HistoryRow>& history,
                    std::ostream& out) {
  out << "iter,mu,tau,s_k,rel_err,objective,rank\n";
  std::ostringstream line;
  line.precision(12);
  line << std::scientific;
  for (const auto& row : history) {
    line.str("");
    line << row.iter << "," << row.mu << "," << row.tau << "," << row.s_k
         << "," << row.rel_err << "," << row.objective << "," << row.rank
         << "\n";
    out << line.str();
  }
}

}  // namespace gramsos
