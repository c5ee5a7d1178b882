#pragma once

#include <cstddef>

#include "bala/linear_map.hpp"

namespace bala {

/// Eigenpairs sorted by descending eigenvalue; vectors are columns.
struct EigenPairs {
  Vec values;
  Mat vectors;
};

/// Flip v so that its first entry of largest magnitude is positive.
void canonicalize_sign(Eigen::Ref<Vec> v);

/// Full symmetric eigendecomposition, descending, canonical signs.
EigenPairs sym_eig(const Mat& m);

/// Top-k eigenpairs of a symmetric matrix (1 <= k <= dim).
EigenPairs top_eigs(const Mat& m, std::size_t k);

double lambda_max(const Mat& m);
double lambda_min(const Mat& m);

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// residual falls below drop_tol are discarded; the result is padded with
/// standard basis vectors (in index order) until it has `target_cols`
/// orthonormal columns.
Mat orthonormalize(const Mat& columns, std::size_t target_cols, double drop_tol = 1e-12);

/// Symmetrize (M + M^T)/2.
Mat symmetrize(const Mat& m);

}  // namespace bala
