#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bala/conic_problem.hpp"
#include "bala/solver.hpp"

namespace bala {

// Reference methods used to validate the bundle solver: proximal bundle on
// the dual, inexact ALM, and a dual subgradient baseline.

/// plane(y) = value + <slope, y - anchor>
struct CuttingPlane {
  double value = 0.0;
  Vec slope;
  Vec anchor;

  double operator()(const Vec& y) const { return value + slope.dot(y - anchor); }
};

/// Plane y -> -L(x, y) induced by a primal point of the cone.
CuttingPlane plane_from_primal(const ConicProblem& prob, const Vec& x);

struct ProxResult {
  Vec z;
  double model_value = 0.0;  // max of the planes at z
  Vec weights;               // simplex weights of the dual QP
};

/// argmin_z max_i plane_i(z) + ||z - y_center||^2 / (2 rho).
ProxResult prox_plane_model(const std::vector<CuttingPlane>& planes, const Vec& y_center,
                            double rho);

struct PbmConfig {
  double rho = 1.0;
  double beta = 0.25;
  std::size_t max_iters = 100;
  std::optional<Vec> y1;
  /// Initial model; defaults to the plane of extreme_point(y1).
  std::vector<CuttingPlane> initial_planes;
};

struct PbmResult {
  Vec y_final;
  std::vector<IterationRecord> trace;
  std::vector<Vec> z_sequence;
};

/// Proximal bundle method on g with a two-plane model: the newest
/// subgradient plane and the aggregate plane of the last prox step.
PbmResult pbm_solve(const ConicProblem& prob, const PbmConfig& config);

struct InnerResult {
  Vec x;
  double gap = 0.0;  // Frank-Wolfe gap, an upper bound on suboptimality
  double value = 0.0;
  std::size_t iterations = 0;
};

/// Frank-Wolfe gap of L_rho(., y) at x over the cone.
double frank_wolfe_gap(const ConicProblem& prob, double rho, const Vec& y, const Vec& x);

/// Frank-Wolfe with exact line search on L_rho(., y) until the gap is <= eps.
InnerResult frank_wolfe_inner(const ConicProblem& prob, double rho, const Vec& y, double eps,
                              const std::optional<Vec>& x0 = std::nullopt,
                              std::size_t max_iters = 1000000);

/// Accelerated projected gradient with restarts on L_rho(., y); stops on the
/// same Frank-Wolfe gap certificate.
InnerResult projected_gradient_inner(const ConicProblem& prob, double rho, const Vec& y,
                                     double eps,
                                     const std::optional<Vec>& x0 = std::nullopt,
                                     std::size_t max_iters = 1000000);

enum class InnerSolver { frank_wolfe, projected_gradient };

struct IalmConfig {
  double rho = 1.0;
  std::size_t max_iters = 100;
  double e0 = 0.1;
  /// eps_k for k = 1, 2, ...; defaults to e0 / k^2.
  std::function<double(std::size_t)> eps_schedule;
  InnerSolver inner = InnerSolver::frank_wolfe;
  std::size_t inner_cap = 1000000;
};

struct IalmRecord {
  std::size_t k = 0;
  double eps = 0.0;
  double inner_gap = 0.0;
  std::size_t inner_iterations = 0;
  double affine = 0.0;        // ||A x_{k+1} - b||
  double dual_step = 0.0;     // ||y_k - y_{k+1}|| / rho
  double g_y = 0.0;           // g(y_{k+1})
  std::optional<double> cost_gap;
};

struct IalmResult {
  Vec x_final;
  Vec y_final;
  std::vector<IalmRecord> trace;
};

IalmResult ialm_solve(const ConicProblem& prob, const IalmConfig& config);

struct SubgradientConfig {
  std::size_t max_iters = 1000;
  std::function<double(std::size_t)> step;  // t_k for k = 1, 2, ...
  std::optional<Vec> y1;
};

struct SubgradientResult {
  Vec y_final;
  Vec y_best;
  double g_best = 0.0;
  std::vector<double> g_values;  // g(y_k) for k = 1..max_iters+1
};

/// y+ = y - t_k * dual_subgradient(y).
SubgradientResult dual_subgradient_solve(const ConicProblem& prob,
                                         const SubgradientConfig& config);

}  // namespace bala
