#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bala/cone.hpp"
#include "bala/conic_problem.hpp"
#include "bala/eigen_utils.hpp"
#include "bala/generators.hpp"

namespace bala::test {

inline Vec random_vec(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

inline Mat random_sym(Rng& rng, Eigen::Index n) {
  Mat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.normal();
  }
  return symmetrize(m);
}

// Random point of the cone, scaled into its interior.
inline Vec random_cone_point(Rng& rng, const ConeSpec& cone) {
  const auto d = static_cast<Eigen::Index>(primal_dimension(cone));
  Vec x = project(cone, random_vec(rng, d, cone_bound(cone)));
  return 0.5 * x;
}

// min <c,x> s.t. Ax = b, x in NonnegL1{n, a}; b = A x0 for an interior x0.
// No certificate.
inline ConicProblem random_nonneg_instance(std::uint64_t seed, std::size_t n = 10,
                                           std::size_t m = 5, double a = 1.0) {
  Rng rng(seed, 77);
  Mat a_dense(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a_dense.cols(); ++j) {
    for (Eigen::Index i = 0; i < a_dense.rows(); ++i) a_dense(i, j) = rng.normal();
  }
  Vec x0(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = rng.uniform();
  x0 *= 0.5 * a / x0.sum();
  ConicProblem prob;
  prob.a = LinearMap::from_dense(a_dense);
  prob.b = a_dense * x0;
  prob.c = random_vec(rng, static_cast<Eigen::Index>(n));
  prob.cone = NonnegL1{n, a};
  return prob;
}

// Small second-order-cone instance.
inline ConicProblem random_soc_instance(std::uint64_t seed, std::size_t n = 3, std::size_t m = 2) {
  Rng rng(seed, 78);
  const ConeSpec cone = SocBound{n, 2.0};
  Mat a_dense(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n + 1));
  for (Eigen::Index j = 0; j < a_dense.cols(); ++j) {
    for (Eigen::Index i = 0; i < a_dense.rows(); ++i) a_dense(i, j) = rng.normal();
  }
  const Vec x0 = random_cone_point(rng, cone);
  ConicProblem prob;
  prob.a = LinearMap::from_dense(a_dense);
  prob.b = a_dense * x0;
  prob.c = random_vec(rng, static_cast<Eigen::Index>(n + 1));
  prob.cone = cone;
  return prob;
}

// Least-squares slope of ys against xs.
inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace bala::test
