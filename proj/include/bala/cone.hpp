#pragma once

#include "bala/conic_problem.hpp"
#include "bala/eigen_utils.hpp"

namespace bala {

/// Cone-specific support term p(s): the largest "eigenvalue" of s in the
/// cone's algebra (max entry, SOC Jordan eigenvalue, or lambda_max).
double support_term(const ConeSpec& cone, const Vec& s);

/// max over the compact cone of <s, x> = bound * max{p(s), 0}.
double support_value(const ConeSpec& cone, const Vec& s);

/// A maximizer of <s, x> over the compact cone. Returns the zero atom when
/// p(s) <= 0; otherwise bound times the lowest-index unit vector / SOC
/// eigenvector / top eigenvector outer product.
Vec linear_maximizer(const ConeSpec& cone, const Vec& s);

/// Dual function g(y) = -<b,y> + bound * max{p(A*y - c), 0}.
double dual_value(const ConicProblem& prob, const Vec& y);

/// Primal point v in the cone with L(v, y) = -g(y).
Vec extreme_point(const ConicProblem& prob, const Vec& y);

/// A*extreme_point(y) - b, a subgradient of g at y.
Vec dual_subgradient(const ConicProblem& prob, const Vec& y);

bool membership(const ConeSpec& cone, const Vec& x, double tol);

/// Upper bound on the Euclidean diameter of the compact cone.
double diameter_bound(const ConeSpec& cone);

/// Euclidean projection onto the compact cone.
Vec project(const ConeSpec& cone, const Vec& x);

/// Projection onto {z >= 0, sum z <= cap}.
Vec project_capped_simplex(const Vec& z, double cap);

}  // namespace bala
