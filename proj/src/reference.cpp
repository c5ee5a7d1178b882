#include "bala/reference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bala/bundle.hpp"
#include "bala/cone.hpp"
#include "bala/error.hpp"

namespace bala {

CuttingPlane plane_from_primal(const ConicProblem& prob, const Vec& x) {
  CuttingPlane plane;
  plane.slope = prob.a.apply(x) - prob.b;
  plane.anchor = Vec::Zero(static_cast<Eigen::Index>(prob.m()));
  plane.value = -prob.c.dot(x);
  return plane;
}

ProxResult prox_plane_model(const std::vector<CuttingPlane>& planes, const Vec& y_center,
                            double rho) {
  if (planes.empty()) throw Error(ErrorCode::invalid_argument, "prox_plane_model: no planes");
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  const auto count = static_cast<Eigen::Index>(planes.size());
  const Eigen::Index m = y_center.size();
  Mat g(m, count);
  Vec offset(count);  // plane_i(y_center)
  for (Eigen::Index i = 0; i < count; ++i) {
    const CuttingPlane& p = planes[static_cast<std::size_t>(i)];
    if (p.slope.size() != m || p.anchor.size() != m) {
      throw Error(ErrorCode::dimension_mismatch, "prox_plane_model: plane dimension");
    }
    g.col(i) = p.slope;
    offset(i) = p(y_center);
  }
  // Dual: max over the simplex of <offset, l> - (rho/2) ||G l||^2.
  const SimplexQpResult qp = simplex_qp(rho * g.transpose() * g, -offset);
  ProxResult out;
  out.weights = qp.weights;
  out.z = y_center - rho * (g * qp.weights);
  out.model_value = -std::numeric_limits<double>::infinity();
  for (const auto& p : planes) out.model_value = std::max(out.model_value, p(out.z));
  return out;
}

PbmResult pbm_solve(const ConicProblem& prob, const PbmConfig& config) {
  if (!(config.rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  if (!(config.beta > 0.0 && config.beta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "beta must lie in (0, 1)");
  }
  PbmResult out;
  Vec y = config.y1 ? *config.y1 : Vec::Zero(static_cast<Eigen::Index>(prob.m()));
  std::vector<CuttingPlane> planes = config.initial_planes;
  if (planes.empty()) planes.push_back(plane_from_primal(prob, extreme_point(prob, y)));
  double g_y = dual_value(prob, y);
  std::optional<double> g_star;
  if (prob.certificate && (prob.certificate->g_star || !prob.certificate->witness_only)) {
    g_star = prob.certificate->g_star ? *prob.certificate->g_star : -prob.certificate->p_star;
  }

  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    const ProxResult prox = prox_plane_model(planes, y, config.rho);
    IterationRecord rec;
    rec.k = k;
    rec.g_y = g_y;
    rec.g_z = dual_value(prob, prox.z);
    rec.gk_z = prox.model_value;
    const bool descent = descent_test(rec.g_y, rec.g_z, rec.gk_z, config.beta);
    rec.step = descent ? StepType::descent : StepType::null;

    const Vec v = extreme_point(prob, prox.z);
    CuttingPlane newest{rec.g_z, prob.a.apply(v) - prob.b, prox.z};
    CuttingPlane aggregate{rec.gk_z, (y - prox.z) / config.rho, prox.z};
    // aggregate slope is A w - b for the implied primal candidate w
    rec.candidate_affine = aggregate.slope.norm();
    rec.affine = rec.candidate_affine;
    planes = {std::move(newest), std::move(aggregate)};

    if (descent) {
      y = prox.z;
      g_y = rec.g_z;
    }
    if (g_star) rec.dual_gap = g_y - *g_star;
    out.z_sequence.push_back(prox.z);
    out.trace.push_back(rec);
  }
  out.y_final = y;
  return out;
}

namespace {

Vec lagrangian_gradient(const ConicProblem& prob, double rho, const Vec& y, const Vec& x) {
  return prob.c - prob.a.apply_adjoint(y + rho * (prob.b - prob.a.apply(x)));
}

void check_inner_args(const ConicProblem& prob, double rho, const Vec& y, double eps) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "inner tolerance must be positive");
  if (static_cast<std::size_t>(y.size()) != prob.m()) {
    throw Error(ErrorCode::dimension_mismatch, "inner solver: y has the wrong length");
  }
}

Vec start_point(const ConicProblem& prob, const std::optional<Vec>& x0) {
  if (!x0) return Vec::Zero(static_cast<Eigen::Index>(prob.n()));
  if (static_cast<std::size_t>(x0->size()) != prob.n()) {
    throw Error(ErrorCode::dimension_mismatch, "inner solver: x0 has the wrong length");
  }
  return project(prob.cone, *x0);
}

}  // namespace

double frank_wolfe_gap(const ConicProblem& prob, double rho, const Vec& y, const Vec& x) {
  const Vec grad = lagrangian_gradient(prob, rho, y, x);
  const Vec u = linear_maximizer(prob.cone, -grad);
  return grad.dot(x - u);
}

InnerResult frank_wolfe_inner(const ConicProblem& prob, double rho, const Vec& y, double eps,
                              const std::optional<Vec>& x0, std::size_t max_iters) {
  check_inner_args(prob, rho, y, eps);
  InnerResult out;
  Vec x = start_point(prob, x0);
  for (std::size_t it = 0;; ++it) {
    const Vec grad = lagrangian_gradient(prob, rho, y, x);
    const Vec u = linear_maximizer(prob.cone, -grad);
    const double gap = grad.dot(x - u);
    if (gap <= eps) {
      out.x = x;
      out.gap = std::max(gap, 0.0);
      out.iterations = it;
      out.value = aug_lagrangian_value(prob, rho, x, y);
      return out;
    }
    if (it >= max_iters) {
      throw Error(ErrorCode::solver_failure,
                  "frank_wolfe_inner: iteration cap reached with gap " + std::to_string(gap));
    }
    const Vec d = u - x;
    const double curvature = rho * prob.a.apply(d).squaredNorm();
    const double t = curvature > 0.0 ? std::min(1.0, gap / curvature) : 1.0;
    x += t * d;
  }
}

InnerResult projected_gradient_inner(const ConicProblem& prob, double rho, const Vec& y,
                                     double eps, const std::optional<Vec>& x0,
                                     std::size_t max_iters) {
  check_inner_args(prob, rho, y, eps);
  const double norm_a = prob.a.operator_norm();
  const double lipschitz = rho * norm_a * norm_a;
  InnerResult out;
  Vec x = start_point(prob, x0);
  if (!(lipschitz > 0.0)) {
    // linear objective: a single linear-minimization step is exact
    x = linear_maximizer(prob.cone, -lagrangian_gradient(prob, rho, y, x));
  }
  Vec extrapolated = x;
  double t = 1.0;
  for (std::size_t it = 0;; ++it) {
    const double gap = frank_wolfe_gap(prob, rho, y, x);
    if (gap <= eps) {
      out.x = x;
      out.gap = std::max(gap, 0.0);
      out.iterations = it;
      out.value = aug_lagrangian_value(prob, rho, x, y);
      return out;
    }
    if (it >= max_iters) {
      throw Error(ErrorCode::solver_failure,
                  "projected_gradient_inner: iteration cap reached with gap " +
                      std::to_string(gap));
    }
    const Vec grad = lagrangian_gradient(prob, rho, y, extrapolated);
    const Vec x_next = project(prob.cone, extrapolated - grad / lipschitz);
    if ((extrapolated - x_next).dot(x_next - x) > 0.0) {
      t = 1.0;
      extrapolated = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      extrapolated = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = x_next;
  }
}

IalmResult ialm_solve(const ConicProblem& prob, const IalmConfig& config) {
  if (!(config.rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  IalmResult out;
  Vec y = Vec::Zero(static_cast<Eigen::Index>(prob.m()));
  Vec x = Vec::Zero(static_cast<Eigen::Index>(prob.n()));
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    const double kk = static_cast<double>(k);
    const double eps = config.eps_schedule ? config.eps_schedule(k) : config.e0 / (kk * kk);
    const InnerResult inner =
        config.inner == InnerSolver::frank_wolfe
            ? frank_wolfe_inner(prob, config.rho, y, eps, x, config.inner_cap)
            : projected_gradient_inner(prob, config.rho, y, eps, x, config.inner_cap);
    x = inner.x;
    const Vec residual = prob.b - prob.a.apply(x);
    const Vec y_next = y + config.rho * residual;

    IalmRecord rec;
    rec.k = k;
    rec.eps = eps;
    rec.inner_gap = inner.gap;
    rec.inner_iterations = inner.iterations;
    rec.affine = residual.norm();
    rec.dual_step = (y - y_next).norm() / config.rho;
    rec.g_y = dual_value(prob, y_next);
    rec.cost_gap = primal_residuals(prob, x).cost_gap;
    out.trace.push_back(rec);
    y = y_next;
  }
  out.x_final = x;
  out.y_final = y;
  return out;
}

SubgradientResult dual_subgradient_solve(const ConicProblem& prob,
                                         const SubgradientConfig& config) {
  SubgradientResult out;
  Vec y = config.y1 ? *config.y1 : Vec::Zero(static_cast<Eigen::Index>(prob.m()));
  double g = dual_value(prob, y);
  out.y_best = y;
  out.g_best = g;
  out.g_values.push_back(g);
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    const double t = config.step ? config.step(k) : 1.0 / static_cast<double>(k);
    if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "step sizes must be positive");
    y = y - t * dual_subgradient(prob, y);
    g = dual_value(prob, y);
    out.g_values.push_back(g);
    if (g < out.g_best) {
      out.g_best = g;
      out.y_best = y;
    }
  }
  out.y_final = y;
  return out;
}

}  // namespace bala
