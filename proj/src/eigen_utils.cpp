#include "bala/eigen_utils.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bala/error.hpp"

namespace bala {

void canonicalize_sign(Eigen::Ref<Vec> v) {
  if (v.size() == 0) return;
  const double biggest = v.cwiseAbs().maxCoeff();
  if (biggest == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= biggest * (1.0 - 1e-12)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

EigenPairs sym_eig(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "sym_eig: not square");
  const Eigen::Index n = m.rows();
  Eigen::SelfAdjointEigenSolver<Mat> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::solver_failure, "symmetric eigendecomposition failed to converge");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vec& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return vals(l) > vals(r); });
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = vals(src);
    out.vectors.col(k) = solver.eigenvectors().col(src);
    canonicalize_sign(out.vectors.col(k));
  }
  return out;
}

EigenPairs top_eigs(const Mat& m, std::size_t k) {
  if (k < 1 || k > static_cast<std::size_t>(m.rows())) {
    throw Error(ErrorCode::invalid_argument,
                "top_eigs: k = " + std::to_string(k) + " outside [1, " +
                    std::to_string(m.rows()) + "]");
  }
  EigenPairs full = sym_eig(m);
  const auto kk = static_cast<Eigen::Index>(k);
  return {full.values.head(kk), full.vectors.leftCols(kk)};
}

double lambda_max(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::solver_failure, "symmetric eigenvalue computation failed");
  }
  return solver.eigenvalues().maxCoeff();
}

double lambda_min(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::solver_failure, "symmetric eigenvalue computation failed");
  }
  return solver.eigenvalues().minCoeff();
}

Mat orthonormalize(const Mat& columns, std::size_t target_cols, double drop_tol) {
  const Eigen::Index n = columns.rows();
  if (target_cols > static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::invalid_argument, "orthonormalize: more columns than dimension");
  }
  std::vector<Vec> basis;
  auto try_add = [&](Vec v, double tol) {
    if (basis.size() >= target_cols) return;
    const double original = v.norm();
    if (original == 0.0) return;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
    const double res = v.norm();
    if (res < tol * std::max(1.0, original)) return;
    basis.push_back(v / res);
  };
  for (Eigen::Index j = 0; j < columns.cols(); ++j) try_add(columns.col(j), drop_tol);
  for (Eigen::Index i = 0; i < n && basis.size() < target_cols; ++i) {
    try_add(Vec::Unit(n, i), std::max(drop_tol, 1e-6));
  }
  Mat out(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = basis[j];
  return out;
}

}  // namespace bala
