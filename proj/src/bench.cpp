#include "gramsos/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gramsos/error.hpp"

namespace gramsos {

double freedom_ratio(int n, int r, int p) {
  if (r < 1 || r > n || p < 1) throw Error("invalid freedom-ratio arguments");
  const double d_r = 0.5 * double(r) * double(2 * n - r + 1);
  return d_r / double(p);
}

namespace {

long long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long long out = 1;
  for (int i = 1; i <= b; ++i) out = out * (a - b + i) / i;
  return out;
}

// Fewest variables whose degree-<=2 monomial count reaches target.
int vars_for_degree2(long long target) {
  int s = 1;
  while (binom(s + 2, 2) < target) ++s;
  return s;
}

}  // namespace

BenchInstance random_instance(int n, int r, std::uint64_t seed,
                              int entry_bound, bool sparse_basis) {
  if (n < 1 || r < 1 || r > n) throw Error("invalid instance dimensions");
  if (entry_bound < 1) throw Error("entry bound must be at least 1");

  std::mt19937_64 rng(seed);

  BenchInstance inst;
  inst.n = n;
  inst.r = r;
  inst.seed = seed;

  if (!sparse_basis) {
    const int s = vars_for_degree2(n);
    MonomialBasis full = all_monomials(s, 2);
    std::vector<Monomial> mons(full.monomials.begin(),
                               full.monomials.begin() + n);
    inst.basis = build_basis_custom(s, std::move(mons));
  } else {
    const int s = vars_for_degree2(3LL * n);
    MonomialBasis pool = all_monomials(s, 2);
    std::vector<int> idx(pool.monomials.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Monomial> mons;
    for (int i = 0; i < n; ++i) mons.push_back(pool.monomials[idx[i]]);
    inst.basis = build_basis_custom(s, std::move(mons));
  }

  std::uniform_int_distribution<int> entry(-entry_bound, entry_bound);
  inst.factor_l.assign(n, std::vector<Rational>(r, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) inst.factor_l[i][j] = entry(rng);

  inst.w_true = RationalMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      Rational acc(0);
      for (int k = 0; k < r; ++k) acc += inst.factor_l[i][k] * inst.factor_l[j][k];
      inst.w_true.set(i, j, acc);
    }

  inst.f = gram_polynomial_exact(inst.w_true, inst.basis);
  inst.cs = build_constraints(inst.f, inst.basis);
  inst.fr = freedom_ratio(n, r, inst.cs.p());
  return inst;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

int worker_count(const ExperimentSpec& spec, std::size_t jobs) {
  int w = spec.workers > 0 ? spec.workers
                           : int(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("GRAMSOS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) w = std::min(w, cap);
  }
  return std::min<int>(w, int(jobs ? jobs : 1));
}

}  // namespace

BenchReport run_experiment(const ExperimentSpec& spec) {
  struct Job {
    int n, r;
    Variant variant;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& [n, r] : spec.pairs)
    for (Variant v : spec.variants)
      for (std::uint64_t seed : spec.seeds) jobs.push_back(Job{n, r, v, seed});

  BenchReport report;
  report.records.resize(jobs.size());
  if (jobs.empty()) return report;

  for (const auto& job : jobs)
    if (job.n > spec.size_limit) {
      if (!spec.allow_large)
        throw Error("instance size n = " + std::to_string(job.n) +
                    " exceeds the desk-scale limit " +
                    std::to_string(spec.size_limit) +
                    "; pass allow_large to override");
      std::fprintf(stderr,
                   "warning: n = %d exceeds the desk-scale limit %d; expect "
                   "long runtimes\n",
                   job.n, spec.size_limit);
    }

  std::atomic<std::size_t> next{0};
  auto run_one = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      BenchRecord rec;
      rec.variant = to_string(job.variant);
      rec.n = job.n;
      rec.r = job.r;
      rec.seed = job.seed;
      try {
        BenchInstance inst = random_instance(job.n, job.r, job.seed,
                                             spec.entry_bound,
                                             spec.sparse_basis);
        rec.p = inst.cs.p();
        rec.fr = inst.fr;
        SolverConfig config;
        config.variant = job.variant;
        config.epsilon = spec.epsilon;
        config.continuation = spec.continuation;
        config.max_iter = spec.max_iter;
        config.schur_mode = spec.schur_mode;
        config.collect_history = false;
        const auto start = std::chrono::steady_clock::now();
        SolveResult res = solve(inst.cs, config);
        const auto stop = std::chrono::steady_clock::now();
        rec.time_s = std::chrono::duration<double>(stop - start).count();
        rec.iterations = res.iterations;
        rec.rel_err = res.rel_err;
        rec.rank = res.rank;
        rec.converged = res.converged;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
      report.records[i] = std::move(rec);
    }
  };

  const int workers = worker_count(spec, jobs.size());
  if (workers <= 1) {
    run_one();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(run_one);
    for (auto& th : pool) th.join();
  }

  // Median aggregates per (variant, n, r), in first-seen order.
  for (const auto& rec : report.records) {
    if (rec.failed) continue;
    bool found = false;
    for (const auto& agg : report.aggregates)
      if (agg.variant == rec.variant && agg.n == rec.n && agg.r == rec.r)
        found = true;
    if (found) continue;
    std::vector<double> iters, errs, times;
    for (const auto& other : report.records)
      if (!other.failed && other.variant == rec.variant && other.n == rec.n &&
          other.r == rec.r) {
        iters.push_back(double(other.iterations));
        errs.push_back(other.rel_err);
        times.push_back(other.time_s);
      }
    report.aggregates.push_back(Aggregate{rec.variant, rec.n, rec.r,
                                          median(iters), median(errs),
                                          median(times)});
  }
  return report;
}

std::string report_to_csv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << std::scientific;
  out << "variant,n,r,p,FR,seed,iterations,time_s,rel_err,rank,converged\n";
  for (const auto& rec : report.records) {
    if (rec.failed) {
      out << rec.variant << "," << rec.n << "," << rec.r << ",,,," << rec.seed
          << ",,,,failed\n";
      continue;
    }
    std::ostringstream fr;
    fr.precision(4);
    fr << std::fixed << rec.fr;
    out << rec.variant << "," << rec.n << "," << rec.r << "," << rec.p << ","
        << fr.str() << "," << rec.seed << "," << rec.iterations << ","
        << rec.time_s << "," << rec.rel_err << "," << rec.rank << ","
        << (rec.converged ? "true" : "false") << "\n";
  }
  return out.str();
}

std::string report_to_json(const BenchReport& report) {
  nlohmann::json j;
  auto records = nlohmann::json::array();
  for (const auto& rec : report.records) {
    nlohmann::json rj;
    rj["variant"] = rec.variant;
    rj["n"] = rec.n;
    rj["r"] = rec.r;
    rj["seed"] = rec.seed;
    if (rec.failed) {
      rj["failed"] = true;
      rj["error"] = rec.error;
    } else {
      rj["p"] = rec.p;
      rj["FR"] = rec.fr;
      rj["iterations"] = rec.iterations;
      rj["time_s"] = rec.time_s;
      rj["rel_err"] = rec.rel_err;
      rj["rank"] = rec.rank;
      rj["converged"] = rec.converged;
    }
    records.push_back(std::move(rj));
  }
  j["records"] = std::move(records);
  auto aggregates = nlohmann::json::array();
  for (const auto& agg : report.aggregates) {
    nlohmann::json aj;
    aj["variant"] = agg.variant;
    aj["n"] = agg.n;
    aj["r"] = agg.r;
    aj["median_iterations"] = agg.median_iterations;
    aj["median_rel_err"] = agg.median_rel_err;
    aj["median_time_s"] = agg.median_time_s;
    aggregates.push_back(std::move(aj));
  }
  j["aggregates"] = std::move(aggregates);
  return j.dump(2);
}

std::string spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  auto pairs = nlohmann::json::array();
  for (const auto& [n, r] : spec.pairs)
    pairs.push_back(nlohmann::json::array({n, r}));
  j["pairs"] = std::move(pairs);
  auto variants = nlohmann::json::array();
  for (Variant v : spec.variants) variants.push_back(to_string(v));
  j["variants"] = std::move(variants);
  j["seeds"] = spec.seeds;
  j["epsilon"] = spec.epsilon;
  j["continuation"] = spec.continuation;
  j["sparse_basis"] = spec.sparse_basis;
  j["entry_bound"] = spec.entry_bound;
  j["max_iter"] = spec.max_iter;
  return j.dump(2);
}

ExperimentSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid experiment JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    for (const auto& pr : j.at("pairs"))
      spec.pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    if (j.contains("variants")) {
      spec.variants.clear();
      for (const auto& v : j.at("variants"))
        spec.variants.push_back(variant_from_string(v.get<std::string>()));
    }
    if (j.contains("seeds"))
      spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("epsilon")) spec.epsilon = j.at("epsilon").get<double>();
    if (j.contains("continuation"))
      spec.continuation = j.at("continuation").get<bool>();
    if (j.contains("sparse_basis"))
      spec.sparse_basis = j.at("sparse_basis").get<bool>();
    if (j.contains("entry_bound"))
      spec.entry_bound = j.at("entry_bound").get<int>();
    if (j.contains("max_iter")) spec.max_iter = j.at("max_iter").get<int>();
    if (j.contains("allow_large"))
      spec.allow_large = j.at("allow_large").get<bool>();
    if (j.contains("workers")) spec.workers = j.at("workers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid experiment JSON: ") + e.what());
  }
  return spec;
}

}  // namespace gramsos
