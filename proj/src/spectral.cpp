#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "bala/bundle.hpp"
#include "bala/cone.hpp"
#include "bala/eigen_utils.hpp"
#include "bala/error.hpp"

namespace bala {

namespace {

constexpr int kNewtonCap = 1000;
constexpr double kStageGrowth = 10.0;
constexpr double kRelativeGapTarget = 1e-12;

// q(p) = 0.5 p^T H p + f^T p over p = (eta, svec S) with eta >= 0, S psd,
// eta + tr S <= gamma.
struct ReducedQp {
  Eigen::Index r = 0;
  Eigen::Index ds = 0;
  Mat h;
  Vec f;
  Vec tr_vec;
  double gamma = 0.0;
  double constant = 0.0;  // L_rho = q + constant

  double value(const Vec& p) const { return 0.5 * p.dot(h * p) + f.dot(p); }
};

Vec trace_functional(Eigen::Index r) {
  Vec tau = Vec::Zero(r * (r + 1) / 2);
  for (Eigen::Index i = 0; i < r; ++i) tau(static_cast<Eigen::Index>(svec_index(i, i))) = 1.0;
  return tau;
}

ReducedQp make_qp(const Spectral& spec, const ConicProblem& prob, double rho, const Vec& y) {
  ReducedQp qp;
  qp.r = spec.v.cols();
  qp.ds = qp.r * (qp.r + 1) / 2;
  const Eigen::Index d = 1 + qp.ds;
  // svec basis of S^r mapped through X = V E V^T into the primal space
  Mat lifted(spec.xbar.size(), d);
  lifted.col(0) = spec.xbar;
  for (Eigen::Index j = 0; j < qp.ds; ++j) {
    const Mat e = svec_decode(Vec::Unit(qp.ds, j));
    lifted.col(1 + j) = svec_encode(symmetrize(spec.v * e * spec.v.transpose()));
  }
  Mat bmat(static_cast<Eigen::Index>(prob.m()), d);
  for (Eigen::Index j = 0; j < d; ++j) bmat.col(j) = prob.a.apply(lifted.col(j));
  qp.h = symmetrize(rho * bmat.transpose() * bmat);
  qp.f = lifted.transpose() * prob.c - bmat.transpose() * (y + rho * prob.b);
  qp.constant = y.dot(prob.b) + 0.5 * rho * prob.b.squaredNorm();
  qp.tr_vec = Vec(d);
  qp.tr_vec(0) = 1.0;
  qp.tr_vec.tail(qp.ds) = trace_functional(qp.r);
  qp.gamma = spec.gamma;
  return qp;
}

struct BarrierResult {
  Vec p;
  double t = 0.0;
  double gap_bound = 0.0;
  int iterations = 0;
  bool stalled = false;
};

// Log-barrier path following with damped Newton centering. Stops at the
// target gap or once rounding stalls the centering.
BarrierResult barrier_start(const ReducedQp& qp) {
  const Eigen::Index r = qp.r;
  const Eigen::Index d = 1 + qp.ds;
  const double gamma = qp.gamma;
  // strictly feasible start: eta = tr S / r = slack
  Vec p = Vec::Zero(d);
  p(0) = gamma / (static_cast<double>(r) + 2.0);
  for (Eigen::Index i = 0; i < r; ++i) {
    p(1 + static_cast<Eigen::Index>(svec_index(i, i))) = gamma / (static_cast<double>(r) + 2.0);
  }
  const double grad_scale = gamma * (qp.h * p + qp.f).cwiseAbs().maxCoeff();
  BarrierResult out;
  out.p = p;
  out.t = 1.0 / std::max(grad_scale, 1e-30);
  return out;
}

// Continues from `state` until nu / t <= rel_target * max(1, |L|).
BarrierResult barrier_solve(const ReducedQp& qp, BarrierResult state, double rel_target) {
  const Eigen::Index r = qp.r;
  const Eigen::Index ds = qp.ds;
  const double gamma = qp.gamma;
  const double nu = static_cast<double>(r + 2);
  Vec p = std::move(state.p);
  double t = state.t;

  // svec coordinate j <-> (row, col, scale) with E = scale (e_i e_j^T + e_j e_i^T)
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> pairs(static_cast<std::size_t>(ds));
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      pairs[svec_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] = {
          i, j, i == j ? 0.5 : 1.0 / std::numbers::sqrt2};
    }
  }

  int iterations = state.iterations;
  bool stalled = state.stalled;
  while (!stalled) {
    double prev_decrement = std::numeric_limits<double>::infinity();
    for (;;) {
      if (++iterations > kNewtonCap) {
        throw Error(ErrorCode::solver_failure, "spectral_argmin: Newton iteration cap exceeded");
      }
      const double eta = p(0);
      const Mat sm = svec_decode(p.tail(ds));
      const double slack = gamma - qp.tr_vec.dot(p);
      const Mat s_inv = Eigen::LLT<Mat>(sm).solve(Mat::Identity(r, r));

      Vec grad = t * (qp.h * p + qp.f);
      grad(0) -= 1.0 / eta;
      grad.tail(ds) -= svec_encode(symmetrize(s_inv));
      grad += qp.tr_vec / slack;

      Mat hess = t * qp.h;
      hess(0, 0) += 1.0 / (eta * eta);
      // <E_ij, W E_kl W> = 2 s_ij s_kl (W_ik W_jl + W_il W_jk), W = S^-1
      for (std::size_t a = 0; a < pairs.size(); ++a) {
        const auto [i, j, sa] = pairs[a];
        for (std::size_t b = a; b < pairs.size(); ++b) {
          const auto [k, l, sb] = pairs[b];
          const double v =
              2.0 * sa * sb * (s_inv(i, k) * s_inv(j, l) + s_inv(i, l) * s_inv(j, k));
          const auto ia = 1 + static_cast<Eigen::Index>(a);
          const auto ib = 1 + static_cast<Eigen::Index>(b);
          hess(ia, ib) += v;
          if (a != b) hess(ib, ia) += v;
        }
      }
      hess += qp.tr_vec * qp.tr_vec.transpose() / (slack * slack);
      hess = symmetrize(hess);

      Vec step;
      Eigen::LLT<Mat> hchol(hess);
      if (hchol.info() == Eigen::Success) {
        step = -hchol.solve(grad);
      } else {
        step = -hess.ldlt().solve(grad);
      }
      if (!step.allFinite()) {
        throw Error(ErrorCode::solver_failure, "spectral_argmin: non-finite Newton step");
      }
      const double decrement = std::sqrt(std::max(-grad.dot(step), 0.0));
      // damped step stays in the Dikin ellipsoid; feasibility is checked anyway
      double alpha = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
      for (int shrink = 0; shrink < 60; ++shrink) {
        const Vec trial = p + alpha * step;
        const bool ok = trial(0) > 0.0 && gamma - qp.tr_vec.dot(trial) > 0.0 &&
                        Eigen::LLT<Mat>(svec_decode(trial.tail(ds))).info() == Eigen::Success;
        if (ok) {
          p = trial;
          break;
        }
        alpha *= 0.5;
      }
      if (decrement <= 1e-7) break;
      if (decrement <= 0.25 && decrement > 0.5 * prev_decrement) {
        stalled = true;
        break;
      }
      prev_decrement = decrement;
    }
    const double lr = qp.value(p) + qp.constant;
    if (stalled || nu / t <= rel_target * std::max(1.0, std::abs(lr))) break;
    t *= kStageGrowth;
  }
  return {p, t, nu / t, iterations, stalled};
}

// Exact solve on a guessed face: S = Q T Q^T with Q spanning k eigenvectors
// of the barrier S, eta free or fixed at zero, trace bound active or not.
// Accepted only if the KKT conditions of the full problem verify.
std::optional<Vec> face_solve(const ReducedQp& qp, const Mat& q, bool eta_free,
                              bool trace_active) {
  const Eigen::Index r = qp.r;
  const Eigen::Index ds = qp.ds;
  const Eigen::Index d = 1 + ds;
  const Eigen::Index k = q.cols();
  const Eigen::Index dt = k * (k + 1) / 2;
  const Eigen::Index du = (eta_free ? 1 : 0) + dt;
  if (du == 0) return std::nullopt;
  Mat basis = Mat::Zero(d, du);
  Eigen::Index col = 0;
  if (eta_free) basis(0, col++) = 1.0;
  for (Eigen::Index j = 0; j < dt; ++j) {
    const Mat e = svec_decode(Vec::Unit(dt, j));
    basis.block(1, col++, ds, 1) = svec_encode(symmetrize(q * e * q.transpose()));
  }
  const Mat hr = basis.transpose() * qp.h * basis;
  const Vec fr = basis.transpose() * qp.f;
  const Eigen::Index nk = du + (trace_active ? 1 : 0);
  Mat kkt = Mat::Zero(nk, nk);
  Vec rhs(nk);
  kkt.topLeftCorner(du, du) = hr;
  rhs.head(du) = -fr;
  if (trace_active) {
    const Vec ar = basis.transpose() * qp.tr_vec;
    kkt.block(0, du, du, 1) = ar;
    kkt.block(du, 0, 1, du) = ar.transpose();
    rhs(du) = qp.gamma;
  }
  const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff() + kkt.cwiseAbs().maxCoeff() * sol.cwiseAbs().maxCoeff();
  if (!sol.allFinite() || (kkt * sol - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale) return std::nullopt;
  const double mu = trace_active ? sol(du) : 0.0;

  const double ptol = 1e-10 * qp.gamma;
  Vec p = basis * sol.head(du);
  if (p(0) < -ptol) return std::nullopt;
  p(0) = std::max(p(0), 0.0);
  EigenPairs te = sym_eig(symmetrize(svec_decode(p.tail(ds))));
  if (te.values.minCoeff() < -ptol) return std::nullopt;
  te.values = te.values.cwiseMax(0.0);
  p.tail(ds) = svec_encode(symmetrize(te.vectors * te.values.asDiagonal() * te.vectors.transpose()));
  const double used = qp.tr_vec.dot(p);
  if (used > qp.gamma + ptol) return std::nullopt;
  if (used > qp.gamma) p *= qp.gamma / used;

  // dual feasibility: G_eta + mu >= 0 and mat(G_S) + mu I psd, mu >= 0
  const Vec g = qp.h * p + qp.f;
  const double dtol = 1e-9 * (1.0 + g.cwiseAbs().maxCoeff() + std::abs(mu));
  if (mu < -dtol) return std::nullopt;
  if (g(0) + mu < -dtol) return std::nullopt;
  const Mat gs = symmetrize(svec_decode(g.tail(ds))) + mu * Mat::Identity(r, r);
  if (lambda_min(gs) < -dtol) return std::nullopt;
  // complementarity
  if (std::abs(p(0) * (g(0) + mu)) > dtol * qp.gamma) return std::nullopt;
  if (std::abs((gs * svec_decode(p.tail(ds))).trace()) > dtol * qp.gamma) return std::nullopt;
  if (mu > dtol && std::abs(qp.gamma - qp.tr_vec.dot(p)) > ptol) return std::nullopt;
  return p;
}

std::optional<Vec> polish(const ReducedQp& qp, const Vec& p_barrier) {
  const Eigen::Index ds = qp.ds;
  const EigenPairs se = sym_eig(symmetrize(svec_decode(p_barrier.tail(ds))));
  std::vector<Eigen::Index> ranks;
  for (double theta : {1e-3, 1e-5, 1e-7, 1e-9}) {
    Eigen::Index k = 0;
    while (k < se.values.size() && se.values(k) > theta * qp.gamma) ++k;
    if (std::find(ranks.begin(), ranks.end(), k) == ranks.end()) ranks.push_back(k);
  }
  std::optional<Vec> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (Eigen::Index k : ranks) {
    const Mat q = se.vectors.leftCols(k);
    for (bool eta_free : {true, false}) {
      for (bool trace_active : {false, true}) {
        auto cand = face_solve(qp, q, eta_free, trace_active);
        if (!cand) continue;
        const double v = qp.value(*cand);
        if (v < best_value) {
          best_value = v;
          best = std::move(cand);
        }
      }
    }
  }
  return best;
}

}  // namespace

Vec spectral_point(const Spectral& spec, double eta, const Mat& s) {
  const Mat x = eta * svec_decode(spec.xbar) + spec.v * s * spec.v.transpose();
  return svec_encode(symmetrize(x));
}

SpectralSolution spectral_argmin(const Spectral& spec, const ConicProblem& prob,
                                 double rho, const Vec& y) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  if (!is_psd(prob.cone)) {
    throw Error(ErrorCode::invalid_argument, "spectral_argmin needs a psd-cone problem");
  }
  const Eigen::Index r = spec.v.cols();
  SpectralSolution out;
  out.s = Mat::Zero(r, r);
  if (!(spec.gamma > 0.0)) {
    out.point = Vec::Zero(spec.xbar.size());
    return out;
  }
  const ReducedQp qp = make_qp(spec, prob, rho, y);
  const BarrierResult barrier = barrier_solve(qp, barrier_start(qp), kRelativeGapTarget);
  Vec p = barrier.p;
  out.gap_bound = barrier.gap_bound;
  if (auto polished = polish(qp, barrier.p)) {
    if (qp.value(*polished) <= qp.value(p) + 1e-12 * (1.0 + std::abs(qp.value(p)))) {
      p = *polished;
      out.polished = true;
      out.gap_bound = 0.0;
    }
  }
  out.eta = p(0);
  out.s = symmetrize(svec_decode(p.tail(qp.ds)));
  out.point = spectral_point(spec, out.eta, out.s);
  out.newton_iterations = barrier.iterations;
  return out;
}

Spectral spectral_update(const Spectral& spec, double eta_star, const Mat& s_star,
                         const Vec& z_next, const ConicProblem& prob) {
  const auto* psd = std::get_if<PsdTrace>(&prob.cone);
  if (psd == nullptr) throw Error(ErrorCode::invalid_argument, "spectral_update: psd cone required");
  if (spec.r_c < 1) throw Error(ErrorCode::invalid_argument, "spectral_update: r_c must be >= 1");
  const auto r = static_cast<Eigen::Index>(spec.rank());
  const auto rp = static_cast<Eigen::Index>(spec.r_p);
  const auto rc = static_cast<Eigen::Index>(spec.r_c);
  if (s_star.rows() != r || s_star.cols() != r) {
    throw Error(ErrorCode::dimension_mismatch, "spectral_update: S has wrong size");
  }

  const EigenPairs split = sym_eig(symmetrize(s_star));
  const Mat q1 = split.vectors.leftCols(rp);
  const Mat q2 = split.vectors.rightCols(r - rp);
  const Vec lam2 = split.values.tail(r - rp).cwiseMax(0.0);

  Spectral next = spec;
  const double eta = std::max(eta_star, 0.0);
  const double denom = eta + lam2.sum();
  if (denom > 0.0) {
    const Mat vq2 = spec.v * q2;
    const Mat agg = eta * svec_decode(spec.xbar) + vq2 * lam2.asDiagonal() * vq2.transpose();
    Mat unit = symmetrize(agg / denom);
    unit /= unit.trace();
    next.xbar = svec_encode(unit);
  }

  const Mat top = top_eigs(svec_decode(prob.a.apply_adjoint(z_next) - prob.c),
                           static_cast<std::size_t>(rc))
                      .vectors;
  Mat stacked(top.rows(), rc + rp);
  stacked.leftCols(rc) = top;
  stacked.rightCols(rp) = spec.v * q1;
  next.v = orthonormalize(stacked, static_cast<std::size_t>(r));
  return next;
}

Spectral initial_spectral(const ConicProblem& prob, const Vec& y, std::size_t r_p,
                          std::size_t r_c) {
  const auto* psd = std::get_if<PsdTrace>(&prob.cone);
  if (psd == nullptr) throw Error(ErrorCode::invalid_argument, "spectral bundle needs a psd cone");
  if (r_c < 1) throw Error(ErrorCode::invalid_argument, "r_c must be at least 1");
  if (r_p + r_c > psd->nbar) {
    throw Error(ErrorCode::invalid_argument,
                "r_p + r_c = " + std::to_string(r_p + r_c) + " exceeds matrix dimension " +
                    std::to_string(psd->nbar));
  }
  const EigenPairs eig =
      top_eigs(svec_decode(prob.a.apply_adjoint(y) - prob.c), r_p + r_c);
  Spectral spec;
  spec.gamma = psd->gamma;
  spec.r_p = r_p;
  spec.r_c = r_c;
  spec.v = eig.vectors;
  const Vec u = eig.vectors.col(0);
  spec.xbar = svec_encode(u * u.transpose());
  return spec;
}

}  // namespace bala
