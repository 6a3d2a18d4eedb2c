#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gramsos/bench.hpp"
#include "gramsos/error.hpp"
#include "gramsos/pipeline.hpp"

namespace {

constexpr int kExitFailure = 1;  // a pipeline stage or check failed
constexpr int kExitUsage = 2;    // bad input or bad invocation

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gramsos::Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw gramsos::Error("cannot write file: " + path);
  out << content;
}

// Inline text, or contents of FILE for an @FILE argument.
std::string polynomial_text(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
  return arg;
}

struct SolverFlags {
  std::string variant = "afpc-bb";
  double eps = 1e-3;
  std::optional<double> mu1, mu_bar, tau_min, tau_max;
  double eta = 0.25;
  int max_iter = 1000;
  bool no_continuation = false;
  bool frobenius_mu = false;
  std::string schur = "auto";
  bool bb2 = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--variant", variant, "mfpc, mfpc-bb or afpc-bb")
        ->check(CLI::IsMember({"mfpc", "mfpc-bb", "afpc-bb"}));
    cmd->add_option("--eps", eps, "relative-error stopping tolerance");
    cmd->add_option("--mu1", mu1, "initial regularization (default ||A*b||/4)");
    cmd->add_option("--mu-bar", mu_bar,
                    "target regularization (default 1e-4 ||A*b||)");
    cmd->add_option("--eta", eta, "continuation reduction factor in (0,1)");
    cmd->add_option("--tau-min", tau_min, "BB step lower clamp");
    cmd->add_option("--tau-max", tau_max, "BB step upper clamp");
    cmd->add_option("--max-iter", max_iter, "total iteration budget");
    cmd->add_flag("--no-continuation", no_continuation,
                  "solve the single stage mu = mu-bar");
    cmd->add_flag("--frobenius-mu", frobenius_mu,
                  "use the Frobenius norm of A*b for the mu defaults");
    cmd->add_option("--schur", schur, "decomposition mode: auto, full, partial")
        ->check(CLI::IsMember({"auto", "full", "partial"}));
    cmd->add_flag("--bb2", bb2, "use the BB2 step rule instead of BB1");
  }

  gramsos::SolverConfig to_config() const {
    gramsos::SolverConfig config;
    config.variant = gramsos::variant_from_string(variant);
    config.epsilon = eps;
    config.mu_1 = mu1;
    config.mu_bar = mu_bar;
    config.eta = eta;
    config.tau_min = tau_min;
    config.tau_max = tau_max;
    config.max_iter = max_iter;
    config.continuation = !no_continuation;
    config.mu_norm = frobenius_mu ? gramsos::MuNorm::Frobenius
                                  : gramsos::MuNorm::Spectral;
    config.bb_rule = bb2 ? gramsos::BbRule::Bb2 : gramsos::BbRule::Bb1;
    if (schur == "full") config.schur_mode = gramsos::SchurMode::Full;
    if (schur == "partial") config.schur_mode = gramsos::SchurMode::Partial;
    return config;
  }
};

int cmd_sos(const std::string& poly_arg, const SolverFlags& flags,
            std::optional<int> rank, unsigned denom_bits,
            const std::string& out_path, const std::string& history_path,
            const std::string& format, bool approx_ok) {
  gramsos::Polynomial f;
  try {
    f = gramsos::parse_polynomial(polynomial_text(poly_arg));
  } catch (const gramsos::Error& e) {
    std::cerr << "[parse] " << e.what() << "\n";
    return kExitUsage;
  }

  gramsos::SosOptions options;
  options.solver = flags.to_config();
  options.rank = rank;
  options.denom_bound = gramsos::Integer(1) << denom_bits;
  options.approx_ok = approx_ok;

  gramsos::SosOutcome outcome;
  try {
    outcome = gramsos::sos_pipeline(f, options);
  } catch (const gramsos::Error& e) {
    std::cerr << "[pipeline] " << e.what() << "\n";
    return kExitFailure;
  }

  if (!history_path.empty()) {
    std::ofstream hist(history_path);
    gramsos::history_to_csv(outcome.solve_result.history, hist);
  }

  if (format == "json") {
    nlohmann::json j;
    j["exact"] = outcome.exact;
    j["basis_size"] = outcome.basis.size();
    j["constraints"] = outcome.constraint_count;
    j["solver_rel_err"] = outcome.solve_result.rel_err;
    j["solver_iterations"] = outcome.solve_result.iterations;
    j["solver_rank"] = outcome.solve_result.rank;
    j["theta"] = outcome.refine_result.theta;
    j["gn_iterations"] = outcome.refine_result.gn_iterations;
    if (outcome.exact) {
      j["squares"] = outcome.certificate.squares.size();
      j["denom_bound"] = outcome.denom_bound_used;
    } else {
      j["failure_stage"] = outcome.failure_stage;
      j["diagnostic"] = outcome.diagnostic;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "basis size      " << outcome.basis.size() << "\n"
              << "constraints     " << outcome.constraint_count << "\n"
              << "solver rel_err  " << outcome.solve_result.rel_err << " in "
              << outcome.solve_result.iterations << " iterations\n"
              << "solver rank     " << outcome.solve_result.rank << "\n"
              << "refined theta   " << outcome.refine_result.theta << " ("
              << outcome.refine_result.gn_iterations << " steps)\n";
    if (outcome.exact) {
      std::cout << "certificate     exact, " << outcome.certificate.squares.size()
                << " squares, denominators <= " << outcome.denom_bound_used
                << "\n";
      for (std::size_t i = 0; i < outcome.certificate.squares.size(); ++i)
        std::cout << "  + " << gramsos::to_string(outcome.certificate.weights[i])
                  << " * (" << gramsos::to_string(outcome.certificate.squares[i])
                  << ")^2\n";
    } else {
      std::cout << "certificate     none (" << outcome.failure_stage << ": "
                << outcome.diagnostic << ")\n";
    }
  }

  if (outcome.exact) {
    if (!out_path.empty())
      write_file(out_path, gramsos::certificate_to_json(outcome.certificate));
    return 0;
  }
  if (outcome.approx_accepted) return 0;
  return kExitFailure;
}

int cmd_solve(const std::string& path, const SolverFlags& flags,
              const std::string& out_path, const std::string& history_path,
              const std::string& format) {
  gramsos::ConstraintSystem cs;
  try {
    cs = gramsos::constraints_from_json(read_file(path));
  } catch (const gramsos::Error& e) {
    std::cerr << "[input] " << e.what() << "\n";
    return kExitUsage;
  }

  gramsos::SolveResult res;
  try {
    res = gramsos::solve(cs, flags.to_config());
  } catch (const gramsos::Error& e) {
    std::cerr << "[solve] " << e.what() << "\n";
    return kExitFailure;
  }

  if (!history_path.empty()) {
    std::ofstream hist(history_path);
    gramsos::history_to_csv(res.history, hist);
  }

  nlohmann::json j;
  j["rel_err"] = res.rel_err;
  j["iterations"] = res.iterations;
  j["rank"] = res.rank;
  j["converged"] = res.converged;
  j["fixed_point_residual"] = res.fixed_point_residual;
  auto w = nlohmann::json::array();
  for (int i = 0; i < res.w.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (int jx = 0; jx < res.w.cols(); ++jx) row.push_back(res.w(i, jx));
    w.push_back(std::move(row));
  }
  j["w"] = std::move(w);
  const std::string text = j.dump(2);
  if (!out_path.empty())
    write_file(out_path, text);
  if (format == "json" || out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::cout << "rel_err " << res.rel_err << ", rank " << res.rank << ", "
              << res.iterations << " iterations, converged "
              << (res.converged ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& spec_path, const std::string& preset,
              std::optional<std::uint64_t> seed,
              const std::string& out_prefix) {
  gramsos::ExperimentSpec spec;
  try {
    if (!preset.empty()) {
      if (preset == "table1") {
        spec.pairs = {{100, 10}};
        spec.variants = {gramsos::Variant::Mfpc, gramsos::Variant::MfpcBb,
                         gramsos::Variant::AfpcBb};
        spec.seeds = {1, 2, 3, 4, 5};
        spec.epsilon = 5e-3;
        spec.continuation = false;
        spec.schur_mode = gramsos::SchurMode::Full;
        spec.max_iter = 3000;
      } else if (preset == "table2") {
        spec.pairs = {{100, 10}, {200, 10}};
        spec.variants = {gramsos::Variant::AfpcBb};
        spec.seeds = {1, 2, 3};
        spec.epsilon = 1e-3;
        spec.continuation = true;
      } else if (preset == "table5") {
        spec.pairs = {{50, 5}, {100, 5}};
        spec.variants = {gramsos::Variant::AfpcBb};
        spec.seeds = {1, 2, 3};
        spec.epsilon = 1e-3;
        spec.continuation = true;
        spec.sparse_basis = true;
      } else {
        std::cerr << "[bench] unknown preset '" << preset << "'\n";
        return kExitUsage;
      }
    } else {
      if (spec_path.empty()) {
        std::cerr << "[bench] provide a spec file or --preset\n";
        return kExitUsage;
      }
      spec = gramsos::spec_from_json(read_file(spec_path));
    }
  } catch (const gramsos::Error& e) {
    std::cerr << "[bench] " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed) spec.seeds = {*seed};

  try {
    gramsos::BenchReport report = gramsos::run_experiment(spec);
    write_file(out_prefix + ".csv", gramsos::report_to_csv(report));
    write_file(out_prefix + ".json", gramsos::report_to_json(report));
    int failures = 0;
    for (const auto& rec : report.records)
      if (rec.failed) ++failures;
    std::cout << report.records.size() << " runs, " << failures
              << " harness failures; wrote " << out_prefix << ".csv and "
              << out_prefix << ".json\n";
    for (const auto& agg : report.aggregates)
      std::cout << "  " << agg.variant << " n=" << agg.n << " r=" << agg.r
                << ": median " << agg.median_iterations << " iterations, "
                << agg.median_rel_err << " rel_err\n";
  } catch (const gramsos::Error& e) {
    std::cerr << "[bench] " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}

int cmd_verify(const std::string& poly_arg, const std::string& cert_path) {
  gramsos::Polynomial f;
  gramsos::SosCertificate cert;
  try {
    f = gramsos::parse_polynomial(polynomial_text(poly_arg));
    cert = gramsos::certificate_from_json(read_file(cert_path));
  } catch (const gramsos::Error& e) {
    std::cerr << "[input] " << e.what() << "\n";
    return kExitUsage;
  }
  // Variable counts may differ when the certificate mentions variables the
  // polynomial does not; reparse over the larger space.
  if (f.nvars() < cert.basis.nvars)
    f = gramsos::parse_polynomial(polynomial_text(poly_arg), cert.basis.nvars);
  std::string diagnostic;
  if (gramsos::verify_certificate(f, cert, &diagnostic)) {
    std::cout << "certificate is exact: " << cert.squares.size()
              << " weighted squares reproduce the input\n";
    return 0;
  }
  std::cout << "certificate rejected: " << diagnostic << "\n";
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gramsos: minimum-rank Gram matrix completion and exact rational "
      "sum-of-squares certificates"};
  app.require_subcommand(1);

  // sos
  auto* sos = app.add_subcommand(
      "sos", "compute an exact SOS certificate for a polynomial");
  std::string sos_poly;
  sos->add_option("polynomial", sos_poly,
                  "polynomial text, or @FILE to read from a file")
      ->required();
  SolverFlags sos_flags;
  sos_flags.attach(sos);
  std::optional<int> sos_rank;
  sos->add_option("--rank", sos_rank, "truncation rank for refinement");
  unsigned denom_bits = 32;
  sos->add_option("--denom-bound", denom_bits,
                  "log2 of the rationalization denominator bound");
  std::string sos_out, sos_hist, sos_format = "text";
  bool approx_ok = false;
  sos->add_option("--out", sos_out, "write the certificate JSON here");
  sos->add_option("--history", sos_hist, "write solver history CSV here");
  sos->add_option("--format", sos_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  sos->add_flag("--approx-ok", approx_ok,
                "exit 0 when the solver meets its tolerance even without an "
                "exact certificate");

  // solve
  auto* solve_cmd = app.add_subcommand(
      "solve", "run the completion solver on a constraint-system JSON file");
  std::string solve_path;
  solve_cmd->add_option("constraints", solve_path, "constraint system JSON")
      ->required();
  SolverFlags solve_flags;
  solve_flags.attach(solve_cmd);
  std::string solve_out, solve_hist, solve_format = "json";
  solve_cmd->add_option("--out", solve_out, "write the result JSON here");
  solve_cmd->add_option("--history", solve_hist,
                        "write solver history CSV here");
  solve_cmd->add_option("--format", solve_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  // bench
  auto* bench = app.add_subcommand(
      "bench", "run a batch of planted completion problems");
  std::string bench_spec, bench_preset, bench_out = "bench";
  std::optional<std::uint64_t> bench_seed;
  bench->add_option("spec", bench_spec, "experiment spec JSON");
  bench->add_option("--preset", bench_preset, "table1, table2 or table5");
  bench->add_option("--seed", bench_seed,
                    "run a single seed instead of the spec's list");
  bench->add_option("--out", bench_out, "output prefix for .csv/.json");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "re-check a certificate against a polynomial, exactly");
  std::string verify_poly, verify_cert;
  verify->add_option("polynomial", verify_poly, "polynomial text or @FILE")
      ->required();
  verify->add_option("certificate", verify_cert, "certificate JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (sos->parsed())
      return cmd_sos(sos_poly, sos_flags, sos_rank, denom_bits, sos_out,
                     sos_hist, sos_format, approx_ok);
    if (solve_cmd->parsed())
      return cmd_solve(solve_path, solve_flags, solve_out, solve_hist,
                       solve_format);
    if (bench->parsed())
      return cmd_bench(bench_spec, bench_preset, bench_seed, bench_out);
    if (verify->parsed()) return cmd_verify(verify_poly, verify_cert);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
