// End-to-end acceptance suite. Each check prints a single PASS/FAIL line;
// the process exit code is the number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gramsos/bench.hpp"
#include "gramsos/pipeline.hpp"
#include "gramsos/solver.hpp"
#include "gramsos/spectral.hpp"

#ifndef GRAMSOS_CLI_PATH
#define GRAMSOS_CLI_PATH "./gramsos"
#endif

using namespace gramsos;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("[%s] %2d. %-34s %s\n", ok ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Shell {
  int exit_code = -1;
  std::string output;
};

Shell run_cli(const std::string& args) {
  Shell result;
  const std::string command =
      std::string(GRAMSOS_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 1024> buffer;
  while (fgets(buffer.data(), int(buffer.size()), pipe))
    result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      w(i, j) = unit(rng);
      w(j, i) = w(i, j);
    }
  return w;
}

// 1. Freedom-ratio values from the reference tables, four decimals.
void criterion_freedom_ratio() {
  struct Row {
    int n, r, p;
    double expected;
  };
  const std::vector<Row> rows = {{100, 10, 579, 1.6494},
                                 {200, 10, 1221, 1.6011},
                                 {500, 10, 5124, 0.9670},
                                 {500, 10, 3309, 1.4974},
                                 {1000, 50, 10621, 4.5923}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    const double fr = freedom_ratio(row.n, row.r, row.p);
    if (std::abs(fr - row.expected) > 5e-5) {
      ok = false;
      detail << " (" << row.n << "," << row.r << "," << row.p << ") -> " << fr;
    }
  }
  report(1, "freedom-ratio table values", ok,
         ok ? "five reference triples to 4 decimals" : detail.str());
}

// 2. Variant ordering without continuation on five seeded instances.
void criterion_variant_ordering() {
  ExperimentSpec spec;
  spec.pairs = {{100, 10}};
  spec.variants = {Variant::Mfpc, Variant::MfpcBb, Variant::AfpcBb};
  spec.seeds = {1, 2, 3, 4, 5};
  spec.epsilon = 5e-3;
  spec.continuation = false;
  spec.schur_mode = SchurMode::Full;
  spec.max_iter = 3000;
  BenchReport rep = run_experiment(spec);

  bool all_converged = true;
  std::vector<double> it_mfpc, it_bb, it_acc;
  for (const auto& rec : rep.records) {
    if (rec.failed || !rec.converged || rec.rel_err > 5e-3)
      all_converged = false;
    if (rec.variant == "mfpc") it_mfpc.push_back(rec.iterations);
    if (rec.variant == "mfpc-bb") it_bb.push_back(rec.iterations);
    if (rec.variant == "afpc-bb") it_acc.push_back(rec.iterations);
  }
  const double m1 = median_of(it_acc), m2 = median_of(it_bb),
               m3 = median_of(it_mfpc);
  const bool ok = all_converged && m1 < m2 && m2 < m3 && m1 <= 120.0;
  std::ostringstream detail;
  detail << "medians afpc-bb " << m1 << " < mfpc-bb " << m2 << " < mfpc "
         << m3 << (all_converged ? "" : "; some run missed 5e-3");
  report(2, "variant ordering, no continuation", ok, detail.str());
}

// 3. Continuation run reaches 1e-3 within 500 iterations at low rank.
void criterion_continuation_recovery() {
  BenchInstance inst = random_instance(100, 10, 1);
  SolverConfig config;
  config.variant = Variant::AfpcBb;
  config.epsilon = 1e-3;
  config.max_iter = 500;
  SolveResult res = solve(inst.cs, config);
  const bool ok = res.converged && res.rel_err <= 1e-3 &&
                  res.iterations <= 500 && res.rank <= 2 * inst.r;
  std::ostringstream detail;
  detail << "rel_err " << res.rel_err << " in " << res.iterations
         << " iterations, rank " << res.rank;
  report(3, "continuation recovery", ok, detail.str());
}

// 4. Exact certificates for five planted instances through the CLI.
void criterion_exact_certificates() {
  bool ok = true;
  std::ostringstream detail;
  int total_squares = 0;
  for (std::uint64_t seed : {101ull, 102ull, 103ull, 104ull, 105ull}) {
    BenchInstance inst = random_instance(50, 5, seed);
    const std::string poly_path =
        "/tmp/gramsos_acc_poly_" + std::to_string(seed) + ".txt";
    const std::string cert_path =
        "/tmp/gramsos_acc_cert_" + std::to_string(seed) + ".json";
    {
      std::ofstream out(poly_path);
      out << to_string(inst.f);
    }
    Shell sos = run_cli("sos @" + poly_path + " --out " + cert_path +
                        " --format json");
    if (sos.exit_code != 0) {
      ok = false;
      detail << " seed " << seed << ": sos exit " << sos.exit_code;
      continue;
    }
    nlohmann::json j = nlohmann::json::parse(sos.output, nullptr, false);
    if (j.is_discarded() || !j.value("exact", false) ||
        j.value("squares", 1000) > 2 * inst.r) {
      ok = false;
      detail << " seed " << seed << ": bad certificate summary";
      continue;
    }
    total_squares += j.value("squares", 0);
    Shell verify = run_cli("verify @" + poly_path + " " + cert_path);
    if (verify.exit_code != 0) {
      ok = false;
      detail << " seed " << seed << ": verify exit " << verify.exit_code;
    }
  }
  if (ok) detail << "five instances exact, squares total " << total_squares;
  report(4, "exact certificate pipeline", ok, detail.str());
}

// 5. Non-expansivity of the thresholding and gradient-step operators.
void criterion_non_expansivity() {
  std::mt19937_64 rng(0xACCE55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool ok = true;

  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int n = 2 + int(rng() % 10);
    Matrix x1 = random_symmetric(n, rng, 2.0);
    Matrix x2 = random_symmetric(n, rng, 2.0);
    const double top = std::max(schur_sym(x1).lambda.cwiseAbs().maxCoeff(),
                                schur_sym(x2).lambda.cwiseAbs().maxCoeff());
    const double nu = unit(rng) * 2.0 * top;
    if ((threshold(x1, nu) - threshold(x2, nu)).norm() >
        (x1 - x2).norm() + 1e-10)
      ok = false;
  }

  BenchInstance inst = random_instance(14, 2, 3);
  const double l = op_norm_sq(inst.cs);
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const double tau = unit(rng) * 2.0 / l;
    Matrix x1 = random_symmetric(inst.cs.n, rng, 2.0);
    Matrix x2 = random_symmetric(inst.cs.n, rng, 2.0);
    auto h = [&](const Matrix& x) {
      return (x - tau * apply_adjoint(inst.cs,
                                      apply_map(inst.cs, x) - inst.cs.b))
          .eval();
    };
    if ((h(x1) - h(x2)).norm() > (x1 - x2).norm() + 1e-10) ok = false;
  }
  report(5, "non-expansivity, 1000 trials each", ok,
         ok ? "thresholding and gradient step" : "inequality violated");
}

// 6. Converged tight-tolerance runs sit near the fixed point.
void criterion_fixed_point() {
  bool ok = true;
  std::ostringstream detail;
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    const int n = 20 + 5 * int(seed % 3);
    BenchInstance inst = random_instance(n, 3, seed);
    Matrix astar_b = apply_adjoint(inst.cs, inst.cs.b);
    const double rho = schur_sym(astar_b).lambda.cwiseAbs().maxCoeff();
    SolverConfig config;
    config.epsilon = 1e-6;
    config.mu_bar = 1e-8 * rho;
    config.max_iter = 30000;
    config.xtol = 1e-14;
    SolveResult res = solve(inst.cs, config);
    const double bound = 1e-4 * std::max(1.0, res.w.norm());
    if (!res.converged || res.fixed_point_residual > bound) {
      ok = false;
      detail << " seed " << seed << ": conv " << res.converged << " fpr "
             << res.fixed_point_residual << " bound " << bound;
    }
  }
  report(6, "fixed-point characterization", ok,
         ok ? "residual within 1e-4 of scale on all runs" : detail.str());
}

// 7. Plain-iteration distance to its own limit is non-increasing.
void criterion_monotone_distance() {
  BenchInstance inst = random_instance(30, 3, 7);
  SolverConfig config;
  config.variant = Variant::Mfpc;
  ResolvedParams rp = resolve_params(inst.cs, config);
  const double mu = 1e-3 * rp.mu_1;
  const double tau = rp.tau_fixed;

  SolverState st = make_state(inst.cs);
  for (int k = 0; k < 1500; ++k) mfpc_step(st, inst.cs, tau, mu);
  const Matrix limit = st.x;

  SolverState replay = make_state(inst.cs);
  double prev = (replay.x - limit).norm();
  double worst = 0.0;
  for (int k = 0; k < 800; ++k) {
    mfpc_step(replay, inst.cs, tau, mu);
    const double dist = (replay.x - limit).norm();
    worst = std::max(worst, dist - prev);
    prev = dist;
  }
  const bool ok = worst <= 1e-9;
  std::ostringstream detail;
  detail << "largest increase " << worst;
  report(7, "monotone distance to the limit", ok, detail.str());
}

// 8. Gauss-Newton refinement speed and Jacobian correctness.
void criterion_gauss_newton() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  std::uniform_int_distribution<int> coef(-4, 4);
  bool ok = true;
  std::ostringstream detail;

  MonomialBasis basis = all_monomials(1, 2);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix exact(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) exact(i, j) = coef(rng);
    if (exact.row(0).norm() == 0 || exact.row(1).norm() == 0) continue;
    SosFactors truth;
    truth.basis = basis;
    truth.coeffs = exact;
    std::vector<Polynomial> polys;
    for (int i = 0; i < 2; ++i) {
      Polynomial g(1);
      for (int j = 0; j < 3; ++j)
        g.add_term(Monomial({j}), rational_from_double(exact(i, j)));
      polys.push_back(g);
    }
    Polynomial f = expand_square_sum(polys);

    SosFactors init = truth;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) init.coeffs(i, j) += noise(rng);
    RefineResult res = gauss_newton_refine(f, init, 1e-12, 10);
    if (!(res.theta < 1e-10 && res.gn_iterations <= 10)) {
      ok = false;
      detail << " trial " << trial << ": theta " << res.theta << " in "
             << res.gn_iterations;
    }

    // Analytic Jacobian against central differences.
    Vector residual;
    Matrix jac;
    residual_and_jacobian(f, init, &residual, &jac);
    const double h = 1e-6;
    for (int col = 0; col < jac.cols() && ok; ++col) {
      SosFactors plus = init, minus = init;
      plus.coeffs(col / 3, col % 3) += h;
      minus.coeffs(col / 3, col % 3) -= h;
      Vector rp2, rm;
      residual_and_jacobian(f, plus, &rp2, nullptr);
      residual_and_jacobian(f, minus, &rm, nullptr);
      if (((rp2 - rm) / (2 * h) - jac.col(col)).norm() >
          1e-6 * std::max(1.0, jac.col(col).norm()))
        ok = false;
    }
  }
  report(8, "Gauss-Newton refinement", ok,
         ok ? "theta < 1e-10 within 10 steps; Jacobian matches" :
              detail.str());
}

// 9. Rank-limited thresholding agrees with the dense route.
void criterion_partial_oracle() {
  std::mt19937_64 rng(0x07ac1e);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool ok = true;
  std::ostringstream detail;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 50;
    const int rank = 3 + int(rng() % 6);
    std::uniform_real_distribution<double> entry(-1.5, 1.5);
    Matrix g(n, rank);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) g(i, j) = entry(rng);
    Matrix w = g * g.transpose();

    EigenDecomposition full = schur_sym(w);
    const double nu = unit(rng) * full.lambda(0);
    Matrix dense = threshold(full, nu);
    Matrix via_partial = threshold(partial_schur(w, rank), nu);
    Matrix via_lanczos = threshold(lanczos_topk(w, rank), nu);
    worst = std::max(worst, (dense - via_partial).norm());
    worst = std::max(worst, (dense - via_lanczos).norm());
  }
  ok = worst <= 1e-8;
  detail << "worst Frobenius gap " << worst
         << " over 100 rank-deficient matrices";
  report(9, "partial/full threshold agreement", ok, detail.str());
}

// 10. Exact projection feasibility and certify round trip.
void criterion_exact_closure() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> den(1, 4);
  bool ok = true;
  std::ostringstream detail;

  MonomialBasis basis = all_monomials(2, 2);  // n = 6
  int projections = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int rank = 1 + int(rng() % 3);
    RationalMatrix w0(basis.size());
    for (int k = 0; k < rank; ++k) {
      std::vector<Rational> v;
      for (int i = 0; i < basis.size(); ++i) {
        Rational q(coef(rng), den(rng));
        q.canonicalize();
        v.push_back(q);
      }
      for (int i = 0; i < basis.size(); ++i)
        for (int j = 0; j < basis.size(); ++j) w0.at(i, j) += v[i] * v[j];
    }
    Polynomial f = gram_polynomial_exact(w0, basis);
    ConstraintSystem cs = build_constraints(f, basis);

    // Perturb off the affine subspace, project back, demand exactness.
    RationalMatrix noisy = w0;
    noisy.set(0, 1, noisy.at(0, 1) + Rational(1, 9));
    RationalMatrix projected = project_affine_exact(noisy, cs);
    std::vector<Rational> y = apply_map_exact(cs, projected);
    for (int i = 0; i < cs.p(); ++i)
      if (y[i] != cs.b_exact[i]) {
        ok = false;
        detail << " projection residual at trial " << trial;
      }
    ++projections;

    SosCertificate cert = certify(f, w0, basis);
    if (!cert.exact) {
      ok = false;
      detail << " certify failed at trial " << trial;
    }
  }
  if (ok)
    detail << projections << " projections exactly feasible, 50 round trips";
  report(10, "exact-arithmetic closure", ok, detail.str());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_freedom_ratio();
  criterion_variant_ordering();
  criterion_continuation_recovery();
  criterion_exact_certificates();
  criterion_non_expansivity();
  criterion_fixed_point();
  criterion_monotone_distance();
  criterion_gauss_newton();
  criterion_partial_oracle();
  criterion_exact_closure();
  const auto stop = std::chrono::steady_clock::now();
  std::printf("%d of 10 criteria passed in %.1f s\n", 10 - failures,
              std::chrono::duration<double>(stop - start).count());
  return failures;
}
