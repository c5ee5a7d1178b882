#pragma once

#include <map>
#include <optional>
#include <string>

#include "bala/cone_spec.hpp"
#include "bala/linear_map.hpp"

namespace bala {

/// Known optimal (or witness) data attached by the generators.
struct Certificate {
  double p_star = 0.0;
  std::optional<Vec> x_star;
  std::optional<Vec> y_star;
  std::optional<double> g_star;
  bool witness_only = false;  // p_star is only an upper bound
};

/// min <c,x> s.t. A x = b, x in cone.
struct ConicProblem {
  Vec c;
  LinearMap a;
  Vec b;
  ConeSpec cone;
  std::optional<Certificate> certificate;
  std::map<std::string, double> metadata;

  std::size_t n() const noexcept { return a.cols(); }
  std::size_t m() const noexcept { return a.rows(); }

  /// Throws dimension_inconsistent if c, A, b and the cone disagree.
  void validate() const;
};

struct PrimalResiduals {
  double affine = 0.0;
  std::optional<double> cost_gap;
};

double lagrangian_value(const ConicProblem& prob, const Vec& x, const Vec& y);
double aug_lagrangian_value(const ConicProblem& prob, double rho, const Vec& x,
                            const Vec& y);
PrimalResiduals primal_residuals(const ConicProblem& prob, const Vec& x);

/// Checks the certificate invariants (feasibility, cone membership, duality
/// gap). Returns an empty string on success, otherwise a description.
std::string check_certificate(const ConicProblem& prob, double feas_tol = 1e-9,
                              double gap_tol = 1e-8);

// Symmetric-matrix vectorization: upper triangle, column-major, off-diagonals
// scaled by sqrt(2) so that <M,N>_F = <svec M, svec N>.
std::size_t svec_length(std::size_t nbar);
std::size_t svec_dim_from_length(std::size_t len);
std::size_t svec_index(std::size_t i, std::size_t j);
Vec svec_encode(const Mat& m);
Mat svec_decode(const Vec& v);

}  // namespace bala
