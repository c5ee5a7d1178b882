#include "bala/generators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bala/cone.hpp"
#include "bala/eigen_utils.hpp"
#include "bala/error.hpp"

namespace bala {

namespace {

// stream ids, one per generated array
constexpr std::uint64_t kStreamConstraints = 1;
constexpr std::uint64_t kStreamFactor = 2;
constexpr std::uint64_t kStreamDual = 3;
constexpr std::uint64_t kStreamMask = 4;

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream * 0xd1342543de82ef95ULL;
  const std::uint64_t b = splitmix64(state);
  engine_.seed(a ^ (b << 1));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

ConicProblem gen_2d_lp() {
  ConicProblem prob;
  prob.c = Vec::Ones(2);
  Mat a(1, 2);
  a << 2.0, 1.0;
  prob.a = LinearMap::from_dense(a);
  prob.b = Vec::Ones(1);
  prob.cone = NonnegL1{2, 1.0};
  Certificate cert;
  cert.p_star = 0.5;
  cert.x_star = Vec::Zero(2);
  (*cert.x_star)(0) = 0.5;
  cert.y_star = Vec::Constant(1, 0.5);
  cert.g_star = -0.5;
  prob.certificate = cert;
  return prob;
}

ConicProblem gen_rank1_sdp(std::size_t n, std::size_t m, std::uint64_t seed,
                           double bound_factor) {
  if (n == 0 || m == 0) throw Error(ErrorCode::invalid_argument, "sizes must be positive");
  if (!(bound_factor > 1.0)) {
    throw Error(ErrorCode::invalid_argument, "bound factor must exceed 1");
  }
  const auto nn = static_cast<Eigen::Index>(n);
  const std::size_t len = svec_length(n);

  Rng rng_a(seed, kStreamConstraints);
  std::vector<Triplet> triplets;
  Mat a_dense = Mat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < m; ++i) {
    Mat ai = Mat::Zero(nn, nn);
    for (Eigen::Index col = 1; col < nn; ++col) {
      for (Eigen::Index row = 0; row < col; ++row) {
        ai(row, col) = rng_a.normal();
        ai(col, row) = ai(row, col);
      }
    }
    a_dense.row(static_cast<Eigen::Index>(i)) = svec_encode(ai).transpose();
  }

  Rng rng_g(seed, kStreamFactor);
  Mat g(nn, nn);
  for (Eigen::Index col = 0; col < nn; ++col) {
    for (Eigen::Index row = 0; row < nn; ++row) g(row, col) = rng_g.normal();
  }
  const Mat s = symmetrize(g * g.transpose() + 0.1 * Mat::Identity(nn, nn));
  const EigenPairs eig = sym_eig(s);
  const Vec v1 = eig.vectors.col(0);
  const double lambda1 = eig.values(0);
  const Mat x_star = lambda1 * v1 * v1.transpose();
  const Mat z_star = symmetrize(s - x_star);

  Rng rng_y(seed, kStreamDual);
  Vec y_star(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < y_star.size(); ++i) y_star(i) = rng_y.uniform();

  ConicProblem prob;
  prob.a = LinearMap::from_dense(a_dense);
  const Vec x_vec = svec_encode(symmetrize(x_star));
  prob.b = prob.a.apply(x_vec);
  prob.c = svec_encode(z_star) + prob.a.apply_adjoint(y_star);
  prob.cone = PsdTrace{n, bound_factor * x_star.trace()};

  Certificate cert;
  cert.x_star = x_vec;
  cert.y_star = y_star;
  cert.p_star = prob.c.dot(x_vec);
  cert.g_star = -prob.b.dot(y_star);
  prob.certificate = cert;
  prob.metadata["lambda1"] = lambda1;
  prob.metadata["lambda2"] = n > 1 ? eig.values(1) : 0.0;
  prob.metadata["seed"] = static_cast<double>(seed);
  return prob;
}

ConicProblem gen_matrix_completion(std::size_t half_dim, double obs_prob, std::uint64_t seed,
                                   std::optional<double> bound, bool resample) {
  if (half_dim == 0) throw Error(ErrorCode::invalid_argument, "half_dim must be positive");
  if (!(obs_prob > 0.0 && obs_prob <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "obs_prob must lie in (0, 1]");
  }
  const auto h = static_cast<Eigen::Index>(half_dim);
  Rng rng_w(seed, kStreamFactor);
  Vec w(h);
  for (Eigen::Index i = 0; i < h; ++i) w(i) = rng_w.normal();
  const Mat x_sharp = w * w.transpose();
  const double tr_sharp = x_sharp.trace();
  const double a = bound.value_or(4.0 * tr_sharp);
  if (!(a > 2.0 * tr_sharp)) {
    throw Error(ErrorCode::invalid_argument, "trace bound must exceed 2 tr(X#)");
  }

  Rng rng_mask(seed, kStreamMask);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> observed;
  int draws = 0;
  for (;; ++draws) {
    if (draws >= 1000) {
      throw Error(ErrorCode::invalid_argument, "could not draw an observation mask covering all rows and columns");
    }
    observed.clear();
    std::vector<bool> row_hit(half_dim, false), col_hit(half_dim, false);
    for (Eigen::Index j = 0; j < h; ++j) {
      for (Eigen::Index i = 0; i < h; ++i) {
        if (rng_mask.bernoulli(obs_prob)) {
          observed.emplace_back(i, j);
          row_hit[static_cast<std::size_t>(i)] = true;
          col_hit[static_cast<std::size_t>(j)] = true;
        }
      }
    }
    bool covered = true;
    for (std::size_t i = 0; i < half_dim; ++i) covered = covered && row_hit[i] && col_hit[i];
    if (!resample) {
      if (observed.empty()) throw Error(ErrorCode::invalid_argument, "empty observation set");
      break;
    }
    if (covered) break;
  }

  const std::size_t nbar = 2 * half_dim;
  const std::size_t len = svec_length(nbar);
  std::vector<Triplet> triplets;
  Vec b(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t r = 0; r < observed.size(); ++r) {
    const auto [i, j] = observed[r];
    // X(i, h + j) = <e, svec X> with the sqrt(2) convention
    triplets.push_back({r, svec_index(static_cast<std::size_t>(i), half_dim + static_cast<std::size_t>(j)),
                        1.0 / std::numbers::sqrt2});
    b(static_cast<Eigen::Index>(r)) = x_sharp(i, j);
  }

  ConicProblem prob;
  prob.a = LinearMap(observed.size(), len, std::move(triplets));
  prob.b = b;
  prob.c = svec_encode(Mat::Identity(static_cast<Eigen::Index>(nbar), static_cast<Eigen::Index>(nbar)));
  prob.cone = PsdTrace{nbar, a};

  Mat witness(2 * h, 2 * h);
  witness << x_sharp, x_sharp, x_sharp, x_sharp;
  Certificate cert;
  cert.x_star = svec_encode(witness);
  cert.p_star = 2.0 * tr_sharp;
  cert.witness_only = true;
  prob.certificate = cert;
  prob.metadata["observed"] = static_cast<double>(observed.size());
  prob.metadata["mask_draws"] = static_cast<double>(draws + 1);
  prob.metadata["seed"] = static_cast<double>(seed);
  return prob;
}

}  // namespace bala
