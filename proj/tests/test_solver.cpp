#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gramsos/bench.hpp"
#include "gramsos/error.hpp"
#include "gramsos/solver.hpp"
#include "test_helpers.hpp"

using namespace gramsos;

namespace {

// A(W) = w11 on 1x1 matrices.
ConstraintSystem scalar_system(double b) {
  ConstraintSystem cs;
  cs.n = 1;
  cs.rows.push_back({ConstraintEntry{0, 0, 1.0}});
  cs.b = Vector::Constant(1, b);
  cs.b_exact = {rational_from_double(b)};
  return cs;
}

ConstraintSystem perfect_square_system() {
  Polynomial f = parse_polynomial("x1^2 + 2*x1 + 1");
  return build_constraints(f, build_basis(f));
}

}  // namespace

TEST_CASE("one shrinkage step on a scalar problem") {
  ConstraintSystem cs = scalar_system(10.0);
  SolverState st = make_state(cs);
  mfpc_step(st, cs, 0.5, 2.0);
  // Y = 0 - 0.5 * (0 - 10) = 5, then soft-threshold by 1.
  CHECK(st.x(0, 0) == doctest::Approx(4.0));
  CHECK(st.iter == 1);
}

TEST_CASE("zero data is a fixed point") {
  ConstraintSystem cs = scalar_system(0.0);
  SolverState st = make_state(cs);
  mfpc_step(st, cs, 0.5, 2.0);
  CHECK(st.x(0, 0) == 0.0);
}

TEST_CASE("BB step size") {
  Matrix id = Matrix::Identity(3, 3);
  SUBCASE("plain ratio") {
    CHECK(bb_step_size(id, 2.0 * id, 1e-4, 100.0, 1.0) ==
          doctest::Approx(0.5));
  }
  SUBCASE("upper clamp") {
    CHECK(bb_step_size(100.0 * id, id, 1e-4, 10.0, 1.0) ==
          doctest::Approx(10.0));
  }
  SUBCASE("orthogonal pair falls back to tau_max") {
    Matrix dx = Matrix::Zero(2, 2);
    dx(0, 0) = 1.0;
    Matrix dg = Matrix::Zero(2, 2);
    dg(1, 1) = 1.0;
    CHECK(bb_step_size(dx, dg, 1e-4, 7.0, 1.0) == doctest::Approx(7.0));
  }
  SUBCASE("vanishing gradient difference keeps the previous step") {
    CHECK(bb_step_size(id, Matrix::Zero(3, 3), 1e-4, 10.0, 0.37) ==
          doctest::Approx(0.37));
  }
  SUBCASE("BB2 rule") {
    CHECK(bb_step_size(id, 2.0 * id, 1e-4, 100.0, 1.0, BbRule::Bb2) ==
          doctest::Approx(0.5));
    // BB2 = <dx,dx>/<dx,dg> differs from BB1 once dx and dg are not
    // proportional.
    Matrix dx(2, 2), dg(2, 2);
    dx << 1, 0, 0, 2;
    dg << 1, 0, 0, 1;
    dx = 0.5 * (dx + dx.transpose()).eval();
    const double bb1 = bb_step_size(dx, dg, 1e-6, 100.0, 1.0, BbRule::Bb1);
    const double bb2 = bb_step_size(dx, dg, 1e-6, 100.0, 1.0, BbRule::Bb2);
    CHECK(bb1 == doctest::Approx(3.0 / 2.0));
    CHECK(bb2 == doctest::Approx(5.0 / 3.0));
  }
}

TEST_CASE("acceleration scalar recursion") {
  ConstraintSystem cs = scalar_system(10.0);
  SolverState st = make_state(cs);
  CHECK(st.t == 1.0);
  afpc_step(st, cs, 0.5, 2.0);
  // First step has zero momentum weight and matches the plain step.
  CHECK(st.x(0, 0) == doctest::Approx(4.0));
  CHECK(st.t == doctest::Approx(1.6180339887));
  afpc_step(st, cs, 0.5, 2.0);
  CHECK(st.t == doctest::Approx(2.1935270853));  // (1+sqrt(1+4 t^2))/2
}

TEST_CASE("rank estimate rule") {
  ConstraintSystem cs = scalar_system(1.0);
  SolverState st = make_state(cs);
  st.s_k = 2;
  Vector lambda(3);
  lambda << 5.0, 4.0, 0.001;
  SUBCASE("relative cutoff") {
    CHECK(update_rank_estimate(st, lambda, 0.01, 10) == 2);
  }
  SUBCASE("floor at one") {
    Vector tiny = Vector::Zero(3);
    CHECK(update_rank_estimate(st, tiny, 0.01, 10) == 1);
  }
  SUBCASE("ten violations raise the estimate by one") {
    st.violation_count = 10;
    CHECK(update_rank_estimate(st, lambda, 0.01, 10) == 3);
    CHECK(st.violation_count == 0);
  }
  SUBCASE("capped by the dimension") {
    st.violation_count = 10;
    CHECK(update_rank_estimate(st, lambda, 0.01, 2) == 2);
  }
}

TEST_CASE("solve with zero data returns the zero matrix") {
  ConstraintSystem cs = scalar_system(0.0);
  SolveResult res = solve(cs);
  CHECK(res.w.norm() == 0.0);
  CHECK(res.iterations == 0);
  CHECK(res.converged);
}

TEST_CASE("solve recovers the forced perfect-square Gram matrix") {
  ConstraintSystem cs = perfect_square_system();
  SolverConfig config;
  config.epsilon = 5e-3;
  config.max_iter = 5000;
  SolveResult res = solve(cs, config);
  CHECK(res.converged);
  CHECK(res.rel_err <= 5e-3);
  CHECK(res.rank == 1);
  Matrix target(2, 2);
  target << 1, 1, 1, 1;
  CHECK((res.w - target).norm() <= 0.05);
  // rel_err is reproducible from the returned matrix.
  CHECK(std::abs((apply_map(cs, res.w) - cs.b).norm() / cs.b.norm() -
                 res.rel_err) <= 1e-12);
}

TEST_CASE("planted recovery with continuation") {
  BenchInstance inst = random_instance(60, 5, 17);
  SolverConfig config;
  config.epsilon = 1e-3;
  config.max_iter = 2000;
  SolveResult res = solve(inst.cs, config);
  CHECK(res.converged);
  CHECK(res.rel_err < 1e-3);
  CHECK(res.rank <= 10);
}

TEST_CASE("rank-tracked mode escapes a collapsed window") {
  // The first continuation stages keep only one eigendirection of this
  // quartic's Gram matrix; the window must widen again at the target stage
  // instead of stalling at a large residual.
  Polynomial f = parse_polynomial("4*x1^4 + 4*x1^3 + 5*x1^2 + 2*x1 + 2");
  ConstraintSystem cs = build_constraints(f, build_basis(f));
  SolverConfig config;
  config.epsilon = 1e-3;
  config.max_iter = 2000;
  config.schur_mode = SchurMode::Partial;
  SolveResult res = solve(cs, config);
  CHECK(res.converged);
  CHECK(res.rel_err <= 1e-3);
}

TEST_CASE("rank-tracked and full decompositions both recover the plant") {
  BenchInstance inst = random_instance(60, 4, 9);
  for (SchurMode mode : {SchurMode::Partial, SchurMode::Full}) {
    SolverConfig config;
    config.epsilon = 1e-3;
    config.max_iter = 2000;
    config.schur_mode = mode;
    SolveResult res = solve(inst.cs, config);
    CHECK(res.converged);
    CHECK(res.rel_err <= 1e-3);
  }
}

TEST_CASE("iterates stay positive semidefinite") {
  BenchInstance inst = random_instance(20, 3, 4);
  SolverConfig config;
  config.epsilon = 1e-4;
  config.max_iter = 300;
  config.collect_history = true;
  // Drive the state manually to inspect each iterate.
  SolverState st = make_state(inst.cs);
  ResolvedParams rp = resolve_params(inst.cs, config);
  double mu = rp.mu_1;
  for (int k = 0; k < 60; ++k) {
    mfpc_step(st, inst.cs, rp.tau_fixed, mu);
    EigenDecomposition ed = schur_sym(st.x);
    const double top = std::max(1e-30, ed.lambda.cwiseAbs().maxCoeff());
    CHECK(ed.lambda.minCoeff() >= -1e-10 * top);
    mu = std::max(0.25 * mu, rp.mu_bar);
  }
}

TEST_CASE("gradient step operator is non-expansive for tau < 2/L") {
  std::mt19937_64 rng(606);
  BenchInstance inst = random_instance(12, 2, 9);
  const double l = op_norm_sq(inst.cs);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double tau = unit(rng) * 2.0 / l;
    Matrix x1 = testing::random_symmetric(inst.cs.n, rng, 2.0);
    Matrix x2 = testing::random_symmetric(inst.cs.n, rng, 2.0);
    auto h = [&](const Matrix& x) {
      return (x - tau * apply_adjoint(inst.cs, apply_map(inst.cs, x) -
                                                   inst.cs.b))
          .eval();
    };
    CHECK((h(x1) - h(x2)).norm() <= (x1 - x2).norm() + 1e-10);
  }
}

TEST_CASE("plain iteration distance to its limit never increases") {
  BenchInstance inst = random_instance(25, 3, 21);
  SolverConfig config;
  config.variant = Variant::Mfpc;
  config.schur_mode = SchurMode::Full;
  ResolvedParams rp = resolve_params(inst.cs, config);
  const double mu = 1e-3 * rp.mu_1;
  const double tau = rp.tau_fixed;

  // Run far past practical convergence to get the limit point.
  SolverState st = make_state(inst.cs);
  for (int k = 0; k < 1200; ++k) mfpc_step(st, inst.cs, tau, mu);
  Matrix limit = st.x;

  // Replay from scratch; the distance sequence must be non-increasing.
  SolverState replay = make_state(inst.cs);
  double prev = (replay.x - limit).norm();
  for (int k = 0; k < 600; ++k) {
    mfpc_step(replay, inst.cs, tau, mu);
    const double dist = (replay.x - limit).norm();
    CHECK(dist <= prev + 1e-9);
    prev = dist;
  }
}

TEST_CASE("accelerated objective decays like the square of the counter") {
  // (k+1)^2 (F(X^k) - F*) should stay bounded by a fixed multiple of its
  // early value; F* is the best objective seen across the run.
  BenchInstance inst = random_instance(30, 3, 8);
  SolverConfig config;
  config.variant = Variant::AfpcBb;
  config.continuation = false;
  config.epsilon = 0.0;  // run the full budget at fixed mu
  config.max_iter = 400;
  config.xtol = 1e-14;
  SolveResult res = solve(inst.cs, config);
  REQUIRE(res.history.size() >= 100);
  double fstar = res.history.back().objective;
  for (const auto& row : res.history) fstar = std::min(fstar, row.objective);
  auto surrogate = [&](int k) {
    return (k + 1.0) * (k + 1.0) * (res.history[k].objective - fstar);
  };
  const double reference = surrogate(5);
  for (std::size_t k = 6; k < res.history.size(); ++k)
    CHECK(surrogate(int(k)) <= 10.0 * reference + 1e-9);
}

TEST_CASE("identical configuration reproduces the history bit for bit") {
  BenchInstance a = random_instance(25, 3, 5);
  BenchInstance b = random_instance(25, 3, 5);
  SolverConfig config;
  config.epsilon = 1e-4;
  config.max_iter = 400;
  SolveResult ra = solve(a.cs, config);
  SolveResult rb = solve(b.cs, config);
  REQUIRE(ra.history.size() == rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    CHECK(ra.history[i].rel_err == rb.history[i].rel_err);
    CHECK(ra.history[i].objective == rb.history[i].objective);
    CHECK(ra.history[i].tau == rb.history[i].tau);
  }
  CHECK((ra.w - rb.w).norm() == 0.0);
}

TEST_CASE("fixed-point residual") {
  SUBCASE("zero problem") {
    ConstraintSystem cs = scalar_system(0.0);
    CHECK(fixed_point_residual(Matrix::Zero(1, 1), cs, 0.5, 2.0) == 0.0);
  }
  SUBCASE("scalar example away from the fixed point") {
    ConstraintSystem cs = scalar_system(10.0);
    Matrix w = Matrix::Constant(1, 1, 4.0);
    // h(4) = 7, D_1(7) = 6, so the residual is 2.
    CHECK(fixed_point_residual(w, cs, 0.5, 2.0) == doctest::Approx(2.0));
  }
  SUBCASE("small residual after convergence") {
    ConstraintSystem cs = perfect_square_system();
    SolverConfig config;
    config.epsilon = 1e-6;
    config.mu_bar = 1e-8;
    config.max_iter = 20000;
    config.xtol = 1e-14;
    SolveResult res = solve(cs, config);
    REQUIRE(res.converged);
    CHECK(res.fixed_point_residual <=
          10 * config.epsilon * std::max(1.0, res.w.norm()));
  }
}

TEST_CASE("history CSV stream") {
  ConstraintSystem cs = perfect_square_system();
  SolverConfig config;
  config.epsilon = 1e-2;
  SolveResult res = solve(cs, config);
  std::ostringstream out;
  history_to_csv(res.history, out);
  const std::string text = out.str();
  CHECK(text.rfind("iter,mu,tau,s_k,rel_err,objective,rank\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        1 + int(res.history.size()));
}

TEST_CASE("solver configuration validation") {
  ConstraintSystem cs = perfect_square_system();
  SolverConfig config;
  config.eta = 1.5;
  CHECK_THROWS_AS(solve(cs, config), Error);
  SolverConfig config2;
  config2.tau_min = 2.0;
  config2.tau_max = 1.0;
  CHECK_THROWS_AS(solve(cs, config2), Error);
}
