#include <doctest.h>

#include <cmath>
#include <limits>

#include "bala/cone.hpp"
#include "bala/error.hpp"
#include "bala/generators.hpp"
#include "bala/reference.hpp"
#include "bala/solver.hpp"
#include "support.hpp"

using namespace bala;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// min of L_rho over the LP cone {x >= 0, x1 + x2 <= 1} on a grid
double lp_grid_min(const ConicProblem& lp, double rho, const Vec& y, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      best = std::min(best, aug_lagrangian_value(lp, rho, vec2(double(i) / steps, double(j) / steps), y));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("prox of plane models") {
  CuttingPlane p{0.3, vec2(1.0, -2.0), vec2(0.5, 0.5)};
  const Vec center = vec2(1.0, 1.0);
  const ProxResult one = prox_plane_model({p}, center, 0.7);
  CHECK((one.z - (center - 0.7 * p.slope)).norm() < 1e-14);
  const ProxResult twice = prox_plane_model({p, p}, center, 0.7);
  CHECK((twice.z - one.z).norm() < 1e-14);
  CHECK_THROWS_AS(prox_plane_model({}, center, 1.0), Error);
  CHECK_THROWS_AS(prox_plane_model({p}, center, 0.0), Error);

  // two planes: compare with a fine grid of the prox objective in 1D
  CuttingPlane a{0.0, Vec::Constant(1, -1.0), Vec::Zero(1)};
  CuttingPlane b{0.0, Vec::Constant(1, 1.0), Vec::Constant(1, 0.2)};
  const ProxResult r = prox_plane_model({a, b}, Vec::Constant(1, 2.0), 0.5);
  double best_z = 0, best = 1e300;
  for (int i = 0; i <= 400000; ++i) {
    const double z = -1.0 + 4.0 * i / 400000;
    const double f = std::max(a(Vec::Constant(1, z)), b(Vec::Constant(1, z))) + (z - 2.0) * (z - 2.0) / 1.0;
    if (f < best) {
      best = f;
      best_z = z;
    }
  }
  CHECK(r.z(0) == doctest::Approx(best_z).epsilon(1e-4));
}

TEST_CASE("plane from a primal point is a lower plane of g") {
  const ConicProblem prob = gen_rank1_sdp(5, 5, 2);
  Rng rng(2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const CuttingPlane p = plane_from_primal(prob, test::random_cone_point(rng, prob.cone));
    const Vec y = test::random_vec(rng, 5);
    CHECK(p(y) <= dual_value(prob, y) + 1e-9 * (1 + std::abs(dual_value(prob, y))));
  }
}

TEST_CASE("proximal bundle method on the two-dimensional LP dual") {
  const ConicProblem lp = gen_2d_lp();
  PbmConfig cfg;
  cfg.rho = 1.5;
  cfg.max_iters = 200;
  const PbmResult r = pbm_solve(lp, cfg);
  CHECK(dual_value(lp, r.y_final) == doctest::Approx(-0.5).epsilon(1e-6));
  REQUIRE(r.z_sequence.size() == 200);
  for (const auto& rec : r.trace) CHECK(rec.gk_z <= rec.g_z + 1e-12);
}

TEST_CASE("proximal bundle with an exact model always descends") {
  // g is a single affine piece near the start: c = (1,1) with large bound,
  // model contains the only active plane
  const ConicProblem lp = gen_2d_lp();
  PbmConfig cfg;
  cfg.rho = 0.1;
  cfg.max_iters = 3;
  cfg.y1 = Vec::Constant(1, 2.0);
  const PbmResult r = pbm_solve(lp, cfg);
  for (const auto& rec : r.trace) {
    if (std::abs(rec.gk_z - rec.g_z) < 1e-14) CHECK(rec.step == StepType::descent);
  }
}

TEST_CASE("Frank-Wolfe inner solver on the two-dimensional LP") {
  const ConicProblem lp = gen_2d_lp();
  const InnerResult r = frank_wolfe_inner(lp, 1.5, Vec::Zero(1), 1e-6);
  CHECK(r.gap <= 1e-6);
  const double grid = lp_grid_min(lp, 1.5, Vec::Zero(1), 1000);
  CHECK(r.value == doctest::Approx(grid).epsilon(1e-5));
  // certificate bounds the true suboptimality
  CHECK(r.value - grid <= r.gap + 1e-9);

  const InnerResult loose = frank_wolfe_inner(lp, 1.5, Vec::Zero(1), 1e6);
  CHECK(loose.iterations == 0);
  CHECK(loose.gap <= 1e6);
  CHECK_THROWS_AS(frank_wolfe_inner(lp, 1.5, Vec::Zero(1), 0.0), Error);
  const ConicProblem sdp = gen_rank1_sdp(5, 5, 1);
  CHECK_THROWS_AS(frank_wolfe_inner(sdp, 1.0, Vec::Zero(5), 1e-12, std::nullopt, 5), Error);
}

TEST_CASE("Frank-Wolfe certificate validity on a grid") {
  const ConicProblem lp = gen_2d_lp();
  Rng rng(31, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec y = test::random_vec(rng, 1);
    const Vec x = test::random_cone_point(rng, lp.cone);
    const double gap = frank_wolfe_gap(lp, 1.0, y, x);
    const double true_gap = aug_lagrangian_value(lp, 1.0, x, y) - lp_grid_min(lp, 1.0, y, 600);
    CHECK(gap >= true_gap - 1e-9);
  }
}

TEST_CASE("Frank-Wolfe needs more iterations for tighter gaps") {
  const ConicProblem prob = test::random_nonneg_instance(9, 6, 3, 1.0);
  std::vector<double> log_iters, log_eps;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const InnerResult r = frank_wolfe_inner(prob, 1.0, Vec::Zero(3), eps);
    CHECK(r.gap <= eps);
    log_iters.push_back(std::log(1.0 + static_cast<double>(r.iterations)));
    log_eps.push_back(std::log(eps));
  }
  // iterations grow as eps shrinks
  CHECK(test::ls_slope(log_eps, log_iters) < 0.0);
}

TEST_CASE("projected gradient inner solver agrees with Frank-Wolfe") {
  const ConicProblem prob = gen_rank1_sdp(5, 5, 7);
  const Vec y = Vec::Constant(5, 0.2);
  const InnerResult pg = projected_gradient_inner(prob, 1.0, y, 1e-9);
  const InnerResult fw = frank_wolfe_inner(prob, 1.0, y, 1e-3);
  CHECK(pg.gap <= 1e-9);
  CHECK(pg.value <= fw.value + 1e-9);
  CHECK(fw.value - pg.value <= fw.gap + 1e-9);
  CHECK(membership(prob.cone, pg.x, 1e-9));
}

TEST_CASE("inexact ALM residual identity and convergence") {
  const ConicProblem lp = gen_2d_lp();
  IalmConfig cfg;
  cfg.rho = 1.5;
  cfg.max_iters = 60;
  const IalmResult r = ialm_solve(lp, cfg);
  for (const auto& rec : r.trace) REQUIRE(std::abs(rec.affine - rec.dual_step) <= 1e-12 * (1 + rec.affine));
  CHECK(r.trace.back().affine < 1e-4);
  CHECK(std::abs(*r.trace.back().cost_gap) < 1e-3);

  IalmConfig zero = cfg;
  zero.eps_schedule = [](std::size_t) { return 0.0; };
  CHECK_THROWS_AS(ialm_solve(lp, zero), Error);
}

TEST_CASE("inexact ALM on a rank-one SDP") {
  const ConicProblem prob = gen_rank1_sdp(10, 10, 1);
  IalmConfig cfg;
  cfg.rho = 1.0;
  cfg.max_iters = 60;
  cfg.e0 = 1e-2;
  cfg.inner = InnerSolver::projected_gradient;
  const IalmResult r = ialm_solve(prob, cfg);
  for (const auto& rec : r.trace) REQUIRE(std::abs(rec.affine - rec.dual_step) <= 1e-12 * (1 + rec.affine));
  CHECK(std::abs(*r.trace.back().cost_gap) <= 1e-5 * (1 + std::abs(prob.certificate->p_star)));
}

TEST_CASE("dual subgradient method") {
  const ConicProblem lp = gen_2d_lp();
  SubgradientConfig cfg;
  cfg.max_iters = 10000;
  const SubgradientResult r = dual_subgradient_solve(lp, cfg);
  CHECK(r.g_best == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(r.g_values.size() == 10001);

  // constant step: iterates stay within one step of y* = 0.5 eventually
  SubgradientConfig fixed;
  fixed.max_iters = 200;
  fixed.step = [](std::size_t) { return 0.05; };
  const SubgradientResult f = dual_subgradient_solve(lp, fixed);
  CHECK(std::abs(f.y_final(0) - 0.5) <= 0.05 + 1e-12);

  SubgradientConfig none;
  none.max_iters = 0;
  none.y1 = Vec::Constant(1, 0.3);
  CHECK(dual_subgradient_solve(lp, none).y_final(0) == 0.3);
  SubgradientConfig bad;
  bad.max_iters = 1;
  bad.step = [](std::size_t) { return 0.0; };
  CHECK_THROWS_AS(dual_subgradient_solve(lp, bad), Error);
}
