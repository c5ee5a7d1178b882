#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "bala/cli.hpp"
#include "bala/error.hpp"
#include "bala/generators.hpp"
#include "bala/io.hpp"
#include "support.hpp"

using namespace bala;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bala_test_" + name + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::solver_failure;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("doubles print with round-trip precision") {
  Rng rng(3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform() * 20 - 10);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("problem JSON round trip") {
  for (const ConicProblem& prob :
       {gen_2d_lp(), gen_rank1_sdp(5, 6, 2), gen_matrix_completion(4, 0.5, 1), test::random_soc_instance(3)}) {
    const std::string text = problem_to_json(prob);
    const ConicProblem back = problem_from_json(text);
    CHECK(back.c == prob.c);
    CHECK(back.b == prob.b);
    CHECK(back.a.to_dense() == prob.a.to_dense());
    CHECK(back.cone.index() == prob.cone.index());
    CHECK(back.certificate.has_value() == prob.certificate.has_value());
    if (prob.certificate) {
      CHECK(back.certificate->p_star == prob.certificate->p_star);
      CHECK(back.certificate->witness_only == prob.certificate->witness_only);
    }
    CHECK(back.metadata == prob.metadata);
    CHECK(problem_to_json(back) == text);
  }
}

TEST_CASE("problem JSON errors") {
  const std::string good = problem_to_json(gen_2d_lp());
  CHECK(code_of([] { problem_from_json("{not json"); }) == ErrorCode::malformed_file);
  std::string v2 = good;
  v2.replace(v2.find("\"1\""), 3, "\"2\"");
  CHECK(code_of([&] { problem_from_json(v2); }) == ErrorCode::version_mismatch);
  CHECK(code_of([] {
          problem_from_json(R"({"format_version":"1","cone":{"type":"nonneg_l1","n":2,"a":1},"c":[1,1],"b":[1]})");
        }) == ErrorCode::schema_error);
  CHECK(code_of([] {
          problem_from_json(
              R"({"format_version":"1","cone":{"type":"nonneg_l1","n":2,"a":1},"c":[1,1],"b":[1],"A":[[1,3,1]]})");
        }) == ErrorCode::dimension_inconsistent);
  CHECK(code_of([] {
          problem_from_json(
              R"({"format_version":"1","cone":{"type":"nonneg_l1","n":2,"a":1},"c":[1,1],"b":[1],"A":[],"extra":1})");
        }) == ErrorCode::schema_error);
  CHECK(code_of([] {
          problem_from_json(
              R"({"format_version":"1","cone":{"type":"cube","n":2,"a":1},"c":[1,1],"b":[1],"A":[]})");
        }) == ErrorCode::schema_error);
  CHECK(code_of([] { read_problem("/nonexistent/problem.json"); }) == ErrorCode::io_failure);
}

TEST_CASE("SDPA single block") {
  // max 2*y(1,1) + y(2,2) over <F1, Y> = 1 with F1 = [[1, .5], [.5, 1]]
  const std::string text =
      "\"comment line\n"
      "1 = m\n"
      "1\n"
      "2\n"
      "{1.0}\n"
      "0 1 1 1 2.0\n"
      "0 1 2 2 1.0\n"
      "1 1 1 1 1.0\n"
      "1 1 1 2 0.5\n"
      "1 1 2 2 1.0\n";
  const ConicProblem prob = sdpa_from_string(text, 5.0);
  CHECK(std::get<PsdTrace>(prob.cone).nbar == 2);
  CHECK(std::get<PsdTrace>(prob.cone).gamma == 5.0);
  CHECK(prob.b(0) == 1.0);
  Mat c(2, 2);
  c << -2, 0, 0, -1;
  CHECK((svec_decode(prob.c) - c).norm() < 1e-15);
  Mat f1(2, 2);
  f1 << 1, 0.5, 0.5, 1;
  CHECK((svec_decode(prob.a.to_dense().row(0).transpose()) - f1).norm() < 1e-15);
  // off-diagonal stored with the sqrt(2) scaling
  CHECK(prob.a.to_dense()(0, static_cast<Eigen::Index>(svec_index(0, 1))) == doctest::Approx(0.5 * std::numbers::sqrt2));

  CHECK(code_of([] { sdpa_from_string("1\n2\n2 3\n1.0\n", 1.0); }) == ErrorCode::unsupported_format);
  CHECK(code_of([] { sdpa_from_string("1\n1\n-2\n1.0\n", 1.0); }) == ErrorCode::unsupported_format);
  CHECK(code_of([] { sdpa_from_string("1\n1\n2\n1.0\n1 1 1\n", 1.0); }) == ErrorCode::malformed_file);
  CHECK(code_of([] { sdpa_from_string("1\n1\n2\n1.0\n1 1 3 1 1.0\n", 1.0); }) == ErrorCode::dimension_inconsistent);
  CHECK_THROWS_AS(sdpa_from_string(text, 0.0), Error);
}

TEST_CASE("trace rows") {
  IterationRecord rec;
  rec.k = 12;
  rec.step = StepType::null;
  rec.g_y = -0.1;
  rec.g_z = 1.0 / 3.0;
  rec.gk_z = -1e-300;
  rec.affine = 2.5e-7;
  rec.cost_gap = -1.0 / 7.0;
  rec.wall_ms = 3.25;
  const IterationRecord back = parse_trace_row(format_trace_row(rec));
  CHECK(back.k == 12);
  CHECK(back.step == StepType::null);
  CHECK(back.g_z == rec.g_z);
  CHECK(back.gk_z == rec.gk_z);
  CHECK(back.affine == rec.affine);
  CHECK(*back.cost_gap == *rec.cost_gap);
  CHECK_FALSE(back.dual_gap.has_value());
  CHECK(back.wall_ms == 3.25);
  CHECK(format_trace_row(rec, false).back() == ',');
  CHECK_THROWS_AS(parse_trace_row("1,X,0,0,0,0,,,"), Error);
  CHECK_THROWS_AS(parse_trace_row("1,D,0,0"), Error);
  CHECK(std::string(kTraceHeader) == "k,step,g_y,g_z,gk_z,affine,cost_gap,dual_gap,wall_ms");
}

TEST_CASE("solution JSON round trip") {
  SolutionFile sol;
  sol.x = Vec::Constant(3, 0.1);
  sol.y = Vec::Constant(1, -2.0 / 3.0);
  sol.x_average = Vec::Constant(3, 1e-20);
  sol.iterations = 7;
  sol.descent_steps = 3;
  sol.null_steps = 4;
  sol.affine = 1.0 / 9.0;
  sol.dual_gap = 1e-12;
  sol.stop_reason = "max_iters";
  const SolutionFile back = solution_from_json(solution_to_json(sol));
  CHECK(back.x == sol.x);
  CHECK(back.y == sol.y);
  CHECK(back.x_average == sol.x_average);
  CHECK(back.affine == sol.affine);
  CHECK_FALSE(back.cost_gap.has_value());
  CHECK(*back.dual_gap == 1e-12);
  CHECK(back.stop_reason == "max_iters");
  CHECK(back.null_steps == 4);
}

TEST_CASE("command line: generate, solve, verify") {
  const fs::path dir = scratch_dir("cli");
  const std::string p1 = (dir / "a.json").string(), p2 = (dir / "b.json").string();
  CHECK(run_cli({"generate", "--kind", "rank1-sdp", "--n", "6", "--m", "6", "--seed", "4", "--out", p1}).code == 0);
  CHECK(run_cli({"generate", "--kind", "rank1-sdp", "--n", "6", "--m", "6", "--seed", "4", "--out", p2}).code == 0);
  CHECK(read_text_file(p1) == read_text_file(p2));

  const std::string lp = (dir / "lp.json").string(), sol = (dir / "sol.json").string(),
                    trace = (dir / "trace.csv").string();
  REQUIRE(run_cli({"generate", "--kind", "lp2d", "--out", lp}).code == 0);
  const CliRun solved = run_cli({"solve", lp, "--bundle", "hull3", "--rho", "1.5", "--max-iters", "500",
                                 "--tol-affine", "1e-10", "--out", sol, "--trace", trace});
  CHECK(solved.code == 0);
  CHECK(solved.out.find("stop=converged") != std::string::npos);
  const CliRun verified = run_cli({"verify", lp, sol});
  CHECK(verified.code == 0);
  CHECK(verified.out.find("cone_membership=ok") != std::string::npos);

  // last trace row agrees with the solution file
  const auto rows = read_trace(trace);
  const SolutionFile s = read_solution(sol);
  REQUIRE(!rows.empty());
  CHECK(rows.size() == s.iterations);
  CHECK(rows.back().affine == doctest::Approx(s.affine).epsilon(1e-12));

  // a tampered solution fails verification
  SolutionFile bad = s;
  bad.x(0) += 0.1;
  write_solution(bad, sol);
  CHECK(run_cli({"verify", lp, sol}).code == 2);

  // init-x seeds the primal start
  CHECK(run_cli({"solve", lp, "--init-x", "0.5,0.5", "--rho", "1.5", "--max-iters", "5"}).code == 0);
  CHECK(run_cli({"solve", lp, "--init-x", "0.9,0.9", "--max-iters", "5"}).code == 1);

  CHECK(run_cli({"solve", lp, "--no-such-flag"}).code == 1);
  CHECK(run_cli({"solve", lp, "--beta", "1.5"}).code == 1);
  CHECK(run_cli({"solve", (dir / "missing.json").string()}).code == 1);
  CHECK(run_cli({"generate", "--kind", "unknown", "--out", p1}).code == 1);
  CHECK(run_cli({}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("command line: bench output is independent of the job count") {
  const fs::path d1 = scratch_dir("bench1"), d2 = scratch_dir("bench2");
  const CliRun serial = run_cli({"bench", "--suite", "rank1", "--seeds", "1,2,3", "--max-iters", "15",
                                 "--jobs", "1", "--out-dir", d1.string()});
  const CliRun parallel = run_cli({"bench", "--suite", "rank1", "--seeds", "1,2,3", "--max-iters", "15",
                                   "--jobs", "3", "--out-dir", d2.string()});
  CHECK(serial.code == 0);
  CHECK(parallel.code == 0);
  CHECK(serial.out == parallel.out);
  for (const char* f : {"rank1_seed1.csv", "rank1_seed2.csv", "rank1_seed3.csv"}) {
    CHECK(read_text_file((d1 / f).string()) == read_text_file((d2 / f).string()));
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}
