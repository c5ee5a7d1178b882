#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace bala {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Sparse linear map A : R^n -> R^m stored as canonical triplets
/// (sorted by (row, col), duplicates summed).
class LinearMap {
 public:
  LinearMap() = default;
  LinearMap(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  /// Dense row-major input, zeros skipped.
  static LinearMap from_dense(const Mat& dense);
  static LinearMap identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<Triplet>& entries() const noexcept { return entries_; }

  Vec apply(const Vec& x) const;
  Vec apply_adjoint(const Vec& y) const;

  /// Largest singular value by power iteration on A A*.
  double operator_norm() const;

  Mat to_dense() const;
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& sparse() const noexcept {
    return matrix_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Triplet> entries_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
};

Vec apply_map(const LinearMap& a, const Vec& x);
Vec apply_adjoint(const LinearMap& a, const Vec& y);
double operator_norm(const LinearMap& a);

}  // namespace bala
