#include <doctest.h>

#include <cmath>
#include <set>

#include "bala/cone.hpp"
#include "bala/eigen_utils.hpp"
#include "bala/error.hpp"
#include "bala/generators.hpp"
#include "bala/io.hpp"

using namespace bala;

TEST_CASE("random streams are deterministic and independent") {
  Rng a(5, 1), b(5, 1), c(5, 2), d(6, 1);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs_stream = differs_stream || x != c.uniform();
    differs_seed = differs_seed || x != d.uniform();
  }
  CHECK(differs_stream);
  CHECK(differs_seed);
  // normals: rough moments
  Rng n(1, 1);
  double sum = 0, sq = 0;
  for (int i = 0; i < 20000; ++i) {
    const double v = n.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / 20000) < 0.05);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
}

TEST_CASE("two-dimensional LP") {
  const ConicProblem lp = gen_2d_lp();
  REQUIRE(lp.certificate);
  const Vec& x = *lp.certificate->x_star;
  CHECK(x(0) == 0.5);
  CHECK(x(1) == 0.0);
  CHECK(lp.a.apply(x)(0) == 1.0);
  CHECK(*lp.certificate->g_star == -0.5);
  CHECK(lp.certificate->p_star == 0.5);
  CHECK(check_certificate(lp).empty());
}

TEST_CASE("rank-one SDP certificate") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ConicProblem prob = gen_rank1_sdp(10, 10, seed);
    const Certificate& cert = *prob.certificate;
    CHECK(check_certificate(prob).empty());
    // <C, X*> = <b, y*>
    CHECK(std::abs(prob.c.dot(*cert.x_star) - prob.b.dot(*cert.y_star)) <= 1e-9 * (1 + std::abs(cert.p_star)));
    // C - A*y* psd
    CHECK(lambda_min(svec_decode(prob.c - prob.a.apply_adjoint(*cert.y_star))) >= -1e-10);
    // rank one
    const EigenPairs e = sym_eig(svec_decode(*cert.x_star));
    CHECK(std::abs(e.values(1)) <= 1e-12 * e.values(0));
    CHECK(e.values(0) == doctest::Approx(prob.metadata.at("lambda1")));
    // zero diagonals in every A_i
    const Mat dense = prob.a.to_dense();
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      const Mat ai = svec_decode(dense.row(i).transpose());
      CHECK(ai.diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
    // bound inactive at the optimum
    CHECK(std::get<PsdTrace>(prob.cone).gamma == doctest::Approx(2.0 * svec_decode(*cert.x_star).trace()));
    // g* equals the dual value at y*
    CHECK(dual_value(prob, *cert.y_star) == doctest::Approx(*cert.g_star).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gen_rank1_sdp(0, 3, 1), Error);
  CHECK_THROWS_AS(gen_rank1_sdp(3, 3, 1, 1.0), Error);
}

TEST_CASE("matrix completion instance") {
  const ConicProblem prob = gen_matrix_completion(6, 0.4, 3);
  const Certificate& cert = *prob.certificate;
  CHECK(cert.witness_only);
  CHECK_FALSE(cert.g_star.has_value());
  // witness feasibility
  CHECK((prob.a.apply(*cert.x_star) - prob.b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(membership(prob.cone, *cert.x_star, 1e-9));
  CHECK(prob.c.dot(*cert.x_star) == doctest::Approx(cert.p_star));
  CHECK(prob.m() == static_cast<std::size_t>(prob.metadata.at("observed")));
  // every row and column observed
  std::set<std::size_t> rows, cols;
  for (const Triplet& t : prob.a.entries()) {
    std::size_t j = 0;
    while ((j + 1) * (j + 2) / 2 <= t.col) ++j;
    rows.insert(t.col - j * (j + 1) / 2);
    cols.insert(j - 6);
  }
  CHECK(rows.size() == 6);
  CHECK(cols.size() == 6);

  const ConicProblem full = gen_matrix_completion(4, 1.0, 1);
  CHECK(full.m() == 16);
  CHECK_THROWS_AS(gen_matrix_completion(4, 0.0, 1), Error);
  CHECK_THROWS_AS(gen_matrix_completion(4, 0.5, 1, 0.1), Error);
}

TEST_CASE("generators are deterministic") {
  CHECK(problem_to_json(gen_rank1_sdp(7, 7, 7)) == problem_to_json(gen_rank1_sdp(7, 7, 7)));
  CHECK(problem_to_json(gen_rank1_sdp(7, 7, 7)) != problem_to_json(gen_rank1_sdp(7, 7, 8)));
  CHECK(problem_to_json(gen_matrix_completion(5, 0.3, 2)) == problem_to_json(gen_matrix_completion(5, 0.3, 2)));
}
