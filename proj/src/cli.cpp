#include "bala/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "bala/cone.hpp"
#include "bala/error.hpp"
#include "bala/generators.hpp"
#include "bala/io.hpp"
#include "bala/solver.hpp"

namespace bala {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ConicProblem load_problem(const std::string& path, const std::string& format,
                          std::optional<double> trace_bound) {
  const bool sdpa = format == "sdpa" || (format == "auto" && (ends_with(path, ".dat-s") ||
                                                              ends_with(path, ".dat")));
  if (sdpa) {
    if (!trace_bound) {
      throw Error(ErrorCode::invalid_argument, "SDPA input requires --trace-bound");
    }
    return read_sdpa(path, *trace_bound);
  }
  if (trace_bound) {
    throw Error(ErrorCode::invalid_argument, "--trace-bound applies to SDPA input only");
  }
  return read_problem(path);
}

struct SolveOptions {
  std::string bundle = "segment";
  double rho = 1.0;
  double beta = 0.25;
  std::size_t max_iters = 1000;
  std::size_t rp = 3;
  std::size_t rc = 2;
  double tol_affine = 1e-8;
  double tol_gap = 1e-10;
  std::size_t log_every = 0;
  std::uint64_t seed = 0;
  std::vector<double> init_x;
};

SolverConfig make_config(const SolveOptions& o) {
  SolverConfig config;
  config.bundle_policy = parse_bundle_policy(o.bundle);
  config.rho = o.rho;
  config.beta = o.beta;
  config.max_iters = o.max_iters;
  config.r_p = o.rp;
  config.r_c = o.rc;
  config.tol_affine = o.tol_affine;
  config.tol_gap = o.tol_gap;
  config.log_every = o.log_every;
  config.seed = o.seed;
  return config;
}

// --init-x: x1 given explicitly; the initial bundle joins it with the
// extreme point at y1 = 0.
SolverInit make_init(const ConicProblem& prob, const SolverConfig& config,
                     const std::vector<double>& init_x) {
  SolverInit init;
  if (init_x.empty()) return init;
  if (init_x.size() != prob.n()) {
    throw Error(ErrorCode::dimension_mismatch,
                "--init-x has " + std::to_string(init_x.size()) + " entries, expected " +
                    std::to_string(prob.n()));
  }
  if (config.bundle_policy == BundlePolicy::spectral) {
    throw Error(ErrorCode::invalid_argument, "--init-x is not supported with the spectral bundle");
  }
  const Vec x1 = Eigen::Map<const Vec>(init_x.data(), static_cast<Eigen::Index>(init_x.size()));
  if (!membership(prob.cone, x1, 1e-12)) {
    throw Error(ErrorCode::invalid_argument, "--init-x lies outside the cone");
  }
  init.x1 = x1;
  const Vec v1 = extreme_point(prob, Vec::Zero(static_cast<Eigen::Index>(prob.m())));
  init.bundle = Segment{v1, x1};
  return init;
}

void add_solver_flags(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--bundle", o.bundle, "bundle policy")
      ->check(CLI::IsMember({"segment", "hull3", "spectral", "singleton"}));
  cmd->add_option("--rho", o.rho, "penalty parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--beta", o.beta, "descent test fraction in (0,1)")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--max-iters", o.max_iters, "iteration budget");
  cmd->add_option("--rp", o.rp, "spectral: past rank");
  cmd->add_option("--rc", o.rc, "spectral: current rank");
  cmd->add_option("--tol-affine", o.tol_affine, "relative affine residual target");
  cmd->add_option("--tol-gap", o.tol_gap, "relative model gap target");
  cmd->add_option("--log-every", o.log_every, "progress to stderr every N iterations");
  cmd->add_option("--seed", o.seed, "seed");
}

int run_generate(const std::string& kind, std::size_t n, std::size_t m, std::size_t half_dim,
                 double obs_prob, std::uint64_t seed, std::optional<double> bound,
                 const std::string& out_path, std::ostream& out) {
  ConicProblem prob;
  if (kind == "lp2d") {
    prob = gen_2d_lp();
  } else if (kind == "rank1-sdp") {
    prob = gen_rank1_sdp(n, m, seed, bound.value_or(2.0));
  } else {
    prob = gen_matrix_completion(half_dim, obs_prob, seed, bound);
  }
  const std::string text = problem_to_json(prob);
  if (out_path == "-") {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
  return 0;
}

void print_summary(std::ostream& out, const std::string& label, const SolutionFile& sol) {
  out << label << "iterations=" << sol.iterations << " descent=" << sol.descent_steps
      << " null=" << sol.null_steps << " affine=" << format_double(sol.affine);
  if (sol.cost_gap) out << " cost_gap=" << format_double(*sol.cost_gap);
  if (sol.dual_gap) out << " dual_gap=" << format_double(*sol.dual_gap);
  out << " stop=" << sol.stop_reason << '\n';
}

int run_solve(const std::string& problem_path, const std::string& format,
              std::optional<double> trace_bound, const SolveOptions& opts,
              const std::string& trace_path, const std::string& out_path, std::ostream& out) {
  const ConicProblem prob = load_problem(problem_path, format, trace_bound);
  const SolverConfig config = make_config(opts);
  const SolverInit init = make_init(prob, config, opts.init_x);
  std::optional<TraceWriter> writer;
  if (!trace_path.empty()) writer.emplace(trace_path);
  RecordSink sink;
  if (writer) sink = [&](const IterationRecord& rec) { writer->write(rec); };
  SolverConfig run_config = config;
  if (writer) run_config.max_trace_in_memory = 1;
  const SolveResult result = bala_solve(prob, run_config, init, sink);
  const SolutionFile sol = make_solution(prob, result);
  if (!out_path.empty()) write_solution(sol, out_path);
  print_summary(out, "", sol);
  return 0;
}

struct BenchJob {
  std::uint64_t seed = 0;
  std::string summary;
  std::string error;
};

int run_bench(const std::string& suite, const std::vector<std::uint64_t>& seeds,
              std::size_t jobs, std::optional<std::size_t> max_iters,
              const std::string& out_dir, bool timing, std::ostream& out, std::ostream& err) {
  std::vector<BenchJob> work;
  for (auto s : seeds) work.push_back({s, {}, {}});
  std::atomic<std::size_t> next{0};

  auto run_one = [&](BenchJob& job) {
    ConicProblem prob;
    SolverConfig config;
    SolverInit init;
    config.tol_affine = 0.0;
    config.tol_gap = 0.0;
    if (suite == "appendixE") {
      prob = gen_2d_lp();
      config.bundle_policy = BundlePolicy::segment;
      config.rho = 1.5;
      config.beta = 0.25;
      config.max_iters = 2000;
      init = make_init(prob, config, {0.5, 0.5});
    } else if (suite == "rank1") {
      prob = gen_rank1_sdp(20, 20, job.seed);
      config.bundle_policy = BundlePolicy::spectral;
      config.rho = 1.0;
      config.beta = 0.25;
      config.r_p = 3;
      config.r_c = 2;
      config.max_iters = 5000;
    } else {
      prob = gen_matrix_completion(25, 0.2, job.seed);
      config.bundle_policy = BundlePolicy::spectral;
      config.rho = 100.0;
      config.beta = 0.25;
      config.r_p = 2;
      config.r_c = 8;
      config.max_iters = 10000;
    }
    if (max_iters) config.max_iters = *max_iters;
    config.seed = job.seed;
    const std::string trace_path =
        out_dir + "/" + suite + "_seed" + std::to_string(job.seed) + ".csv";
    TraceWriter writer(trace_path, timing);
    config.max_trace_in_memory = 1;
    const SolveResult result =
        bala_solve(prob, config, init, [&](const IterationRecord& rec) { writer.write(rec); });
    std::ostringstream line;
    print_summary(line, suite + " seed=" + std::to_string(job.seed) + " ",
                  make_solution(prob, result));
    job.summary = line.str();
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      try {
        run_one(work[i]);
      } catch (const std::exception& e) {
        work[i].error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, work.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int code = 0;
  for (const auto& job : work) {
    if (!job.error.empty()) {
      err << "error: " << suite << " seed=" << job.seed << ": " << job.error << '\n';
      code = 1;
    } else {
      out << job.summary;
    }
  }
  return code;
}

int run_verify(const std::string& problem_path, const std::string& solution_path,
               const std::string& format, std::optional<double> trace_bound, double tol,
               std::ostream& out) {
  const ConicProblem prob = load_problem(problem_path, format, trace_bound);
  const SolutionFile sol = read_solution(solution_path);
  if (static_cast<std::size_t>(sol.x.size()) != prob.n() ||
      static_cast<std::size_t>(sol.y.size()) != prob.m()) {
    throw Error(ErrorCode::dimension_inconsistent, "solution does not match the problem size");
  }
  bool ok = true;
  const double affine_rel = (prob.a.apply(sol.x) - prob.b).norm() / (1.0 + prob.b.norm());
  const bool in_cone = membership(prob.cone, sol.x, tol);
  out << "affine_rel=" << format_double(affine_rel) << (affine_rel <= tol ? " ok" : " FAIL")
      << '\n';
  out << "cone_membership=" << (in_cone ? "ok" : "FAIL") << '\n';
  ok = ok && affine_rel <= tol && in_cone;
  if (prob.certificate) {
    const double p_star = prob.certificate->p_star;
    const double cost = prob.c.dot(sol.x);
    const double rel = (cost - p_star) / (1.0 + std::abs(p_star));
    const bool cost_ok = prob.certificate->witness_only ? rel <= tol : std::abs(rel) <= tol;
    out << "cost_rel=" << format_double(rel) << (cost_ok ? " ok" : " FAIL") << '\n';
    ok = ok && cost_ok;
  }
  return ok ? 0 : 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bundle-based augmented Lagrangian solver for conic programs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a test problem");
  std::string kind;
  std::size_t gen_n = 20, gen_m = 20, half_dim = 25;
  double obs_prob = 0.2;
  std::uint64_t gen_seed = 0;
  std::optional<double> gen_bound;
  std::string gen_out;
  gen->add_option("--kind", kind, "problem family")
      ->required()
      ->check(CLI::IsMember({"lp2d", "rank1-sdp", "matrix-completion"}));
  gen->add_option("--n", gen_n, "matrix dimension (rank1-sdp)");
  gen->add_option("--m", gen_m, "constraint count (rank1-sdp)");
  gen->add_option("--half-dim", half_dim, "matrix size (matrix-completion)");
  gen->add_option("--obs-prob", obs_prob, "observation rate (matrix-completion)");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--bound", gen_bound,
                  "rank1-sdp: trace bound factor; matrix-completion: trace bound");
  gen->add_option("--out", gen_out, "output path, - for stdout")->required();

  auto* solve = app.add_subcommand("solve", "run the solver on a problem file");
  std::string problem_path, format = "auto", trace_path, out_path;
  std::optional<double> trace_bound;
  SolveOptions opts;
  solve->add_option("problem", problem_path, "problem file")->required();
  solve->add_option("--format", format, "input format")
      ->check(CLI::IsMember({"auto", "json", "sdpa"}));
  solve->add_option("--trace-bound", trace_bound, "trace bound for SDPA input");
  add_solver_flags(solve, opts);
  solve->add_option("--init-x", opts.init_x, "initial primal point, comma separated")
      ->delimiter(',');
  solve->add_option("--trace", trace_path, "trace CSV path");
  solve->add_option("--out", out_path, "solution file path");

  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string suite;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t jobs = 1;
  std::optional<std::size_t> bench_iters;
  std::string out_dir = ".";
  bool timing = false;
  bench->add_option("--suite", suite, "suite")
      ->required()
      ->check(CLI::IsMember({"appendixE", "rank1", "completion"}));
  bench->add_option("--seeds", seeds, "comma separated seeds")->delimiter(',');
  bench->add_option("--jobs", jobs, "parallel solver instances")->check(CLI::PositiveNumber);
  bench->add_option("--max-iters", bench_iters, "override the suite budget");
  bench->add_option("--out-dir", out_dir, "directory for trace files");
  bench->add_flag("--timing", timing, "record wall time in traces");

  auto* verify = app.add_subcommand("verify", "check a solution against a problem");
  std::string verify_problem, verify_solution, verify_format = "auto";
  std::optional<double> verify_bound;
  double tol = 1e-6;
  verify->add_option("problem", verify_problem, "problem file")->required();
  verify->add_option("solution", verify_solution, "solution file")->required();
  verify->add_option("--format", verify_format, "input format")
      ->check(CLI::IsMember({"auto", "json", "sdpa"}));
  verify->add_option("--trace-bound", verify_bound, "trace bound for SDPA input");
  verify->add_option("--tol", tol, "tolerance")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      return run_generate(kind, gen_n, gen_m, half_dim, obs_prob, gen_seed, gen_bound, gen_out,
                          out);
    }
    if (*solve) {
      return run_solve(problem_path, format, trace_bound, opts, trace_path, out_path, out);
    }
    if (*bench) return run_bench(suite, seeds, jobs, bench_iters, out_dir, timing, out, err);
    if (*verify) {
      return run_verify(verify_problem, verify_solution, verify_format, verify_bound, tol, out);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace bala
