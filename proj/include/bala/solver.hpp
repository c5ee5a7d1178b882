#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bala/bundle.hpp"
#include "bala/conic_problem.hpp"

namespace bala {

struct SolverConfig {
  double rho = 1.0;
  double beta = 0.25;
  std::size_t max_iters = 1000;
  double tol_affine = 1e-8;
  double tol_gap = 1e-10;
  BundlePolicy bundle_policy = BundlePolicy::segment;
  std::size_t r_p = 3;  // spectral only
  std::size_t r_c = 2;  // spectral only
  std::uint64_t seed = 0;
  std::size_t log_every = 0;  // 0 disables progress logging
  std::size_t null_run_cap = 10000;
  std::size_t max_trace_in_memory = 1000000;

  /// Throws invalid_argument on rho <= 0, beta outside (0,1), r_c < 1.
  void validate() const;
};

/// Optional overrides of the default start (y1 = 0, x1 = extreme_point(y1),
/// bundle = {x1} or the initial spectral set).
struct SolverInit {
  std::optional<Vec> x1;
  std::optional<Vec> y1;
  std::optional<BundleSet> bundle;
};

struct SolverState {
  std::size_t k = 0;  // iterations completed
  Vec x;
  Vec y;
  BundleSet bundle;
  double g_y = 0.0;
  std::vector<std::size_t> descent_indices;
  Vec avg_accumulator;        // x_1 plus every post-descent iterate
  std::size_t avg_count = 0;  // |S_k| including the initial sentinel
  bool y1_zero = true;
  std::size_t null_run_length = 0;
  std::size_t longest_null_run = 0;
};

struct IterationRecord {
  std::size_t k = 0;
  StepType step = StepType::null;
  double g_y = 0.0;   // g(y_k) before the step
  double g_z = 0.0;   // g(z_{k+1})
  double gk_z = 0.0;  // g_k(z_{k+1})
  double affine = 0.0;  // ||A x_{k+1} - b||
  std::optional<double> cost_gap;  // <c, x_{k+1}> - p*
  std::optional<double> dual_gap;  // g(y_{k+1}) - g*
  double candidate_affine = 0.0;   // ||A w_{k+1} - b||
  double wall_ms = 0.0;
};

struct StepResult {
  SolverState state;
  IterationRecord record;
  Vec w;       // primal candidate
  Vec z;       // dual candidate
  Vec v_next;  // extreme point at z
};

enum class StopReason { max_iters, converged, null_run_cap };

const char* to_string(StopReason reason) noexcept;

struct SolveResult {
  Vec x_final;
  Vec y_final;
  Vec x_average;
  std::vector<IterationRecord> trace;
  SolverState state;
  StopReason reason = StopReason::max_iters;
};

/// z = y_k + rho (b - A w).
Vec dual_candidate(const Vec& y_k, double rho, const Vec& b, const Vec& aw);

/// g_y - g_z >= beta (g_y - gk_z), with 1e-12 absolute slack. Throws
/// invariant_violation when the model value exceeds the true value.
bool descent_test(double g_y, double g_z, double gk_z, double beta);

SolverState initial_state(const ConicProblem& prob, const SolverConfig& config,
                          const SolverInit& init = {});

StepResult bala_step(const SolverState& state, const ConicProblem& prob,
                     const SolverConfig& config);

using RecordSink = std::function<void(const IterationRecord&)>;

SolveResult bala_solve(const ConicProblem& prob, const SolverConfig& config,
                       const SolverInit& init = {}, const RecordSink& sink = {});

/// Mean of x_1 and the post-descent iterates.
Vec average_iterate(const SolverState& state);

}  // namespace bala
