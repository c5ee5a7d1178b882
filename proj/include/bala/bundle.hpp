#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bala/conic_problem.hpp"

namespace bala {

// Inner approximations of the cone. Every atom / parametrized point lies in
// the cone; updates return new values.

struct Singleton {
  Vec v;
};

/// conv(v, w)
struct Segment {
  Vec v;
  Vec w;
};

/// conv(atoms), plus the origin when include_origin is set.
struct Hull {
  std::vector<Vec> atoms;
  bool include_origin = false;
};

/// {eta*xbar + V S V^T : eta >= 0, S psd, eta + tr S <= gamma}; xbar is a
/// unit-trace psd matrix in svec coordinates and V has r_p + r_c orthonormal
/// columns.
struct Spectral {
  Vec xbar;
  Mat v;
  double gamma = 0.0;
  std::size_t r_p = 0;
  std::size_t r_c = 1;

  std::size_t rank() const noexcept { return r_p + r_c; }
};

using BundleSet = std::variant<Singleton, Segment, Hull, Spectral>;

enum class BundlePolicy { segment, hull3, spectral, singleton };

enum class StepType { descent, null };

const char* to_string(BundlePolicy policy) noexcept;
BundlePolicy parse_bundle_policy(const std::string& name);

// ---------------------------------------------------------------------------
// Small quadratic programs over the probability simplex.

/// min 0.5 l^T H l + f^T l  s.t.  l >= 0, sum l = 1, by enumerating the
/// faces of the simplex (intended for at most a handful of variables).
struct SimplexQpResult {
  Vec weights;
  double objective = 0.0;
};
SimplexQpResult simplex_qp(const Mat& h, const Vec& f);

// ---------------------------------------------------------------------------
// Exact subproblem solvers: argmin of L_rho(., y) over the bundle set.

struct SegmentSolution {
  double phi = 0.0;    // unsaturated stationary point (NaN when degenerate)
  double alpha = 0.0;  // weight on v
  Vec point;
};
SegmentSolution segment_argmin(const Vec& v, const Vec& w, const ConicProblem& prob,
                               double rho, const Vec& y);

struct HullSolution {
  Vec weights;  // atoms first, origin weight last when included
  Vec point;
};
HullSolution hull_argmin(const std::vector<Vec>& atoms, bool include_origin,
                         const ConicProblem& prob, double rho, const Vec& y);

struct SpectralSolution {
  double eta = 0.0;
  Mat s;  // r x r psd
  Vec point;
  int newton_iterations = 0;
  double gap_bound = 0.0;  // barrier duality-gap bound on the QP objective
  bool polished = false;   // KKT-verified active-face solution
};
SpectralSolution spectral_argmin(const Spectral& spec, const ConicProblem& prob,
                                 double rho, const Vec& y);

struct SubproblemResult {
  Vec point;
  std::optional<SpectralSolution> spectral;
};
SubproblemResult subproblem_argmin(const BundleSet& bundle, const ConicProblem& prob,
                                   double rho, const Vec& y);

// ---------------------------------------------------------------------------
// Approximated dual model g_k(y) = -min_{x in bundle} L(x, y).

double model_value(const BundleSet& bundle, const ConicProblem& prob, const Vec& y);

/// g_k(z) recovered from the subproblem solution w at center y_k:
/// -L_rho(w, y_k) - ||z - y_k||^2 / (2 rho), with z = y_k + rho (b - A w).
double model_value_at_candidate(const Vec& w, const Vec& y_k, const Vec& z, double rho,
                                const ConicProblem& prob);

// ---------------------------------------------------------------------------
// Updates.

/// Next bundle for the segment / hull3 / singleton policies.
BundleSet update_bundle(BundlePolicy policy, StepType step, const Vec& w_next,
                        const Vec& v_next, const ConicProblem& prob);

/// Spectral aggregate / subspace update from the subproblem solution and the
/// new dual candidate z.
Spectral spectral_update(const Spectral& spec, double eta_star, const Mat& s_star,
                         const Vec& z_next, const ConicProblem& prob);

/// Initial spectral set at dual point y: V spans the top r eigenvectors of
/// A*y - C and xbar is the top eigenvector outer product.
Spectral initial_spectral(const ConicProblem& prob, const Vec& y, std::size_t r_p,
                          std::size_t r_c);

/// Point of the spectral set for given parameters.
Vec spectral_point(const Spectral& spec, double eta, const Mat& s);

/// Whether x lies in the bundle set, within tol (Euclidean).
bool bundle_contains(const BundleSet& bundle, const Vec& x, double tol);

/// Structural checks: atoms inside the cone, spectral normalization. Returns
/// an empty string when everything holds.
std::string check_bundle(const BundleSet& bundle, const ConicProblem& prob,
                         double tol = 1e-9);

}  // namespace bala
