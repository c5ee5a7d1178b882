#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "bala/conic_problem.hpp"

namespace bala {

/// Seeded stream: mt19937_64 keyed by SplitMix64(seed, stream id), with
/// uniforms and normals computed by hand so the draws do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // [0, 1)
  double normal();   // Box-Muller
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// min x1 + x2 s.t. 2 x1 + x2 = 1, x >= 0, x1 + x2 <= 1.
ConicProblem gen_2d_lp();

/// Random SDP with a rank-one primal solution and a known dual solution.
/// bound_factor scales tr(X*) into the trace bound.
ConicProblem gen_rank1_sdp(std::size_t n, std::size_t m, std::uint64_t seed,
                           double bound_factor = 2.0);

/// Trace minimization over the 2h x 2h block lift of a partially observed
/// rank-one h x h matrix. Observation masks that leave a row or column of
/// the matrix unobserved are redrawn when resample is set; otherwise an
/// empty observation set is an error. The bound defaults to 4 tr(X#).
ConicProblem gen_matrix_completion(std::size_t half_dim, double obs_prob, std::uint64_t seed,
                                   std::optional<double> bound = std::nullopt,
                                   bool resample = true);

}  // namespace bala
