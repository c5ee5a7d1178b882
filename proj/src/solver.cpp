#include "bala/solver.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "bala/cone.hpp"
#include "bala/error.hpp"

namespace bala {

void SolverConfig::validate() const {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "beta must lie in (0, 1)");
  }
  if (bundle_policy == BundlePolicy::spectral && r_c < 1) {
    throw Error(ErrorCode::invalid_argument, "r_c must be at least 1");
  }
}

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::converged: return "converged";
    case StopReason::null_run_cap: return "null_run_cap";
  }
  return "unknown";
}

Vec dual_candidate(const Vec& y_k, double rho, const Vec& b, const Vec& aw) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  return y_k + rho * (b - aw);
}

bool descent_test(double g_y, double g_z, double gk_z, double beta) {
  if (gk_z > g_z + 1e-9 * (1.0 + std::abs(g_z))) {
    throw Error(ErrorCode::invariant_violation,
                "descent_test: model value exceeds dual value (lower-model violation)");
  }
  return g_y - g_z >= beta * (g_y - gk_z) - 1e-12;
}

SolverState initial_state(const ConicProblem& prob, const SolverConfig& config,
                          const SolverInit& init) {
  config.validate();
  prob.validate();
  SolverState state;
  state.y = init.y1 ? *init.y1 : Vec::Zero(static_cast<Eigen::Index>(prob.m()));
  if (static_cast<std::size_t>(state.y.size()) != prob.m()) {
    throw Error(ErrorCode::dimension_mismatch, "initial y has the wrong length");
  }
  state.x = init.x1 ? *init.x1 : extreme_point(prob, state.y);
  if (static_cast<std::size_t>(state.x.size()) != prob.n()) {
    throw Error(ErrorCode::dimension_mismatch, "initial x has the wrong length");
  }
  if (init.bundle) {
    state.bundle = *init.bundle;
  } else if (config.bundle_policy == BundlePolicy::spectral) {
    state.bundle = initial_spectral(prob, state.y, config.r_p, config.r_c);
  } else {
    state.bundle = Singleton{state.x};
  }
  if (config.bundle_policy == BundlePolicy::spectral &&
      !std::holds_alternative<Spectral>(state.bundle)) {
    throw Error(ErrorCode::invalid_argument, "spectral policy needs a spectral initial bundle");
  }
  const std::string issue = check_bundle(state.bundle, prob);
  if (!issue.empty()) throw Error(ErrorCode::invariant_violation, "initial bundle: " + issue);
  state.g_y = dual_value(prob, state.y);
  state.avg_accumulator = state.x;
  state.avg_count = 1;
  state.y1_zero = state.y.isZero(0.0);
  return state;
}

StepResult bala_step(const SolverState& state, const ConicProblem& prob,
                     const SolverConfig& config) {
  StepResult out;
  const SubproblemResult sub = subproblem_argmin(state.bundle, prob, config.rho, state.y);
  out.w = sub.point;
  const Vec aw = prob.a.apply(out.w);
  out.z = dual_candidate(state.y, config.rho, prob.b, aw);

  auto& rec = out.record;
  rec.k = state.k + 1;
  rec.g_y = state.g_y;
  rec.g_z = dual_value(prob, out.z);
  rec.gk_z = model_value_at_candidate(out.w, state.y, out.z, config.rho, prob);
  rec.candidate_affine = (aw - prob.b).norm();
  const bool descent = descent_test(rec.g_y, rec.g_z, rec.gk_z, config.beta);
  rec.step = descent ? StepType::descent : StepType::null;

  out.v_next = extreme_point(prob, out.z);

  SolverState next = state;
  next.k = state.k + 1;
  if (descent) {
    next.x = out.w;
    next.y = out.z;
    next.g_y = rec.g_z;
    next.descent_indices.push_back(next.k);
    next.avg_accumulator += out.w;
    next.avg_count += 1;
    next.null_run_length = 0;
  } else {
    next.null_run_length = state.null_run_length + 1;
    next.longest_null_run = std::max(next.longest_null_run, next.null_run_length);
  }

  if (config.bundle_policy == BundlePolicy::spectral) {
    const auto* spec = std::get_if<Spectral>(&state.bundle);
    if (spec == nullptr || !sub.spectral) {
      throw Error(ErrorCode::invariant_violation, "spectral policy without a spectral bundle");
    }
    next.bundle = spectral_update(*spec, sub.spectral->eta, sub.spectral->s, out.z, prob);
  } else {
    next.bundle = update_bundle(config.bundle_policy, rec.step, out.w, out.v_next, prob);
  }

  const PrimalResiduals res = primal_residuals(prob, next.x);
  rec.affine = res.affine;
  rec.cost_gap = res.cost_gap;
  if (prob.certificate && (prob.certificate->g_star || !prob.certificate->witness_only)) {
    const double g_star = prob.certificate->g_star ? *prob.certificate->g_star
                                                   : -prob.certificate->p_star;
    rec.dual_gap = next.g_y - g_star;
  }
  out.state = std::move(next);
  return out;
}

Vec average_iterate(const SolverState& state) {
  if (state.avg_count == 0) return state.x;
  return state.avg_accumulator / static_cast<double>(state.avg_count);
}

SolveResult bala_solve(const ConicProblem& prob, const SolverConfig& config,
                       const SolverInit& init, const RecordSink& sink) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  result.state = initial_state(prob, config, init);
  if (!result.state.y1_zero && config.log_every > 0) {
    std::cerr << "warning: y1 != 0, average-iterate bounds assume y1 = 0\n";
  }
  const double b_scale = 1.0 + prob.b.norm();
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    StepResult step = bala_step(result.state, prob, config);
    step.record.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (sink) sink(step.record);
    if (result.trace.size() < config.max_trace_in_memory) result.trace.push_back(step.record);
    if (config.log_every > 0 && step.record.k % config.log_every == 0) {
      std::cerr << "k=" << step.record.k << " g(y)=" << step.state.g_y
                << " affine=" << step.record.affine
                << " step=" << (step.record.step == StepType::descent ? 'D' : 'N') << '\n';
    }
    const double model_gap = step.record.g_y - step.record.gk_z;
    result.state = std::move(step.state);
    if (result.state.null_run_length > config.null_run_cap) {
      result.reason = StopReason::null_run_cap;
      break;
    }
    if (step.record.affine / b_scale <= config.tol_affine &&
        model_gap <= config.tol_gap * (1.0 + std::abs(step.record.g_y))) {
      result.reason = StopReason::converged;
      break;
    }
  }
  result.x_final = result.state.x;
  result.y_final = result.state.y;
  result.x_average = average_iterate(result.state);
  return result;
}

}  // namespace bala
