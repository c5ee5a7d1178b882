#include "bala/linear_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bala/error.hpp"

namespace bala {

namespace {

constexpr std::uint64_t kPowerIterationSeed = 0x5eed0fba1aULL;
constexpr int kPowerIterationCap = 10000;
constexpr double kPowerIterationTol = 1e-10;

std::vector<Triplet> canonicalize(std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& l, const Triplet& r) {
    return l.row != r.row ? l.row < r.row : l.col < r.col;
  });
  std::vector<Triplet> out;
  out.reserve(entries.size());
  for (const auto& t : entries) {
    if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
      out.back().value += t.value;
    } else {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

LinearMap::LinearMap(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols), entries_(canonicalize(std::move(entries))) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries_.size());
  for (const auto& t : entries_) {
    if (t.row >= rows_ || t.col >= cols_) {
      throw Error(ErrorCode::dimension_inconsistent,
                  "linear map entry (" + std::to_string(t.row) + ", " +
                      std::to_string(t.col) + ") outside " + std::to_string(rows_) +
                      "x" + std::to_string(cols_));
    }
    trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
  }
  matrix_.resize(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  matrix_.setFromTriplets(trips.begin(), trips.end());
}

LinearMap LinearMap::from_dense(const Mat& dense) {
  std::vector<Triplet> entries;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                           dense(i, j)});
      }
    }
  }
  return LinearMap(static_cast<std::size_t>(dense.rows()),
                   static_cast<std::size_t>(dense.cols()), std::move(entries));
}

LinearMap LinearMap::identity(std::size_t n) {
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  return LinearMap(n, n, std::move(entries));
}

Vec LinearMap::apply(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != cols_) {
    throw Error(ErrorCode::dimension_mismatch,
                "apply_map: expected vector of length " + std::to_string(cols_) +
                    ", got " + std::to_string(x.size()));
  }
  return matrix_ * x;
}

Vec LinearMap::apply_adjoint(const Vec& y) const {
  if (static_cast<std::size_t>(y.size()) != rows_) {
    throw Error(ErrorCode::dimension_mismatch,
                "apply_adjoint: expected vector of length " + std::to_string(rows_) +
                    ", got " + std::to_string(y.size()));
  }
  return matrix_.transpose() * y;
}

double LinearMap::operator_norm() const {
  if (rows_ == 0 || cols_ == 0 || entries_.empty()) return 0.0;
  std::mt19937_64 gen(kPowerIterationSeed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec u(static_cast<Eigen::Index>(rows_));
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = unif(gen);
  u.normalize();

  double lambda = 0.0;
  for (int it = 0; it < kPowerIterationCap; ++it) {
    Vec w = matrix_ * (matrix_.transpose() * u);
    const double next = u.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    u = w / wn;
    if (it > 0 && std::abs(next - lambda) <= kPowerIterationTol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // one more Rayleigh quotient on the final vector
  Vec w = matrix_.transpose() * u;
  return std::max(std::sqrt(std::max(lambda, 0.0)), w.norm());
}

Mat LinearMap::to_dense() const { return Mat(matrix_); }

Vec apply_map(const LinearMap& a, const Vec& x) { return a.apply(x); }
Vec apply_adjoint(const LinearMap& a, const Vec& y) { return a.apply_adjoint(y); }
double operator_norm(const LinearMap& a) { return a.operator_norm(); }

}  // namespace bala
