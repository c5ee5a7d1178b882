#include "bala/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "bala/cone.hpp"
#include "bala/eigen_utils.hpp"
#include "bala/error.hpp"

namespace bala {

const char* to_string(BundlePolicy policy) noexcept {
  switch (policy) {
    case BundlePolicy::segment: return "segment";
    case BundlePolicy::hull3: return "hull3";
    case BundlePolicy::spectral: return "spectral";
    case BundlePolicy::singleton: return "singleton";
  }
  return "unknown";
}

BundlePolicy parse_bundle_policy(const std::string& name) {
  if (name == "segment") return BundlePolicy::segment;
  if (name == "hull3") return BundlePolicy::hull3;
  if (name == "spectral") return BundlePolicy::spectral;
  if (name == "singleton") return BundlePolicy::singleton;
  throw Error(ErrorCode::invalid_argument, "unknown bundle policy '" + name + "'");
}

SimplexQpResult simplex_qp(const Mat& h, const Vec& f) {
  const Eigen::Index p = f.size();
  if (p == 0 || h.rows() != p || h.cols() != p) {
    throw Error(ErrorCode::invalid_argument, "simplex_qp: bad dimensions");
  }
  if (p > 12) throw Error(ErrorCode::invalid_argument, "simplex_qp: too many variables");

  auto objective = [&](const Vec& l) { return 0.5 * l.dot(h * l) + f.dot(l); };

  SimplexQpResult best;
  best.objective = std::numeric_limits<double>::infinity();
  const std::uint32_t masks = 1u << p;
  std::vector<Eigen::Index> support;
  for (std::uint32_t mask = 1; mask < masks; ++mask) {
    support.clear();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    const auto q = static_cast<Eigen::Index>(support.size());
    Vec l = Vec::Zero(p);
    if (q == 1) {
      l(support[0]) = 1.0;
    } else {
      Mat kkt = Mat::Zero(q + 1, q + 1);
      Vec rhs(q + 1);
      for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) kkt(a, b) = h(support[a], support[b]);
        kkt(a, q) = 1.0;
        kkt(q, a) = 1.0;
        rhs(a) = -f(support[a]);
      }
      rhs(q) = 1.0;
      const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      if (!sol.allFinite()) continue;
      bool feasible = true;
      for (Eigen::Index a = 0; a < q; ++a) {
        if (sol(a) < -1e-12) feasible = false;
      }
      if (!feasible) continue;
      for (Eigen::Index a = 0; a < q; ++a) l(support[a]) = std::max(sol(a), 0.0);
      const double total = l.sum();
      if (std::abs(total - 1.0) > 1e-9) continue;
      l /= total;
    }
    const double val = objective(l);
    if (val < best.objective - 1e-15 * (1.0 + std::abs(val))) {
      best.objective = val;
      best.weights = l;
    }
  }
  return best;
}

SegmentSolution segment_argmin(const Vec& v, const Vec& w, const ConicProblem& prob,
                               double rho, const Vec& y) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  const Vec d = v - w;
  const Vec ad = prob.a.apply(d);
  const Vec aw = prob.a.apply(w);
  const double denom = rho * ad.squaredNorm();
  SegmentSolution out;
  const double scale = rho * (aw.squaredNorm() + prob.a.apply(v).squaredNorm());
  if (denom <= 1e-28 * scale || denom == 0.0) {
    // Affine along the segment: the better endpoint, ties to w.
    out.phi = std::numeric_limits<double>::quiet_NaN();
    const double lv = aug_lagrangian_value(prob, rho, v, y);
    const double lw = aug_lagrangian_value(prob, rho, w, y);
    out.alpha = lv < lw ? 1.0 : 0.0;
  } else {
    const double numer = rho * (prob.b - aw).dot(ad) + y.dot(ad) - prob.c.dot(d);
    out.phi = numer / denom;
    out.alpha = std::clamp(out.phi, 0.0, 1.0);
  }
  out.point = out.alpha * v + (1.0 - out.alpha) * w;
  return out;
}

HullSolution hull_argmin(const std::vector<Vec>& atoms, bool include_origin,
                         const ConicProblem& prob, double rho, const Vec& y) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  if (atoms.empty()) throw Error(ErrorCode::invalid_argument, "hull_argmin: no atoms");
  const auto na = static_cast<Eigen::Index>(atoms.size());
  const Eigen::Index p = na + (include_origin ? 1 : 0);
  const auto m = static_cast<Eigen::Index>(prob.m());
  Mat images = Mat::Zero(m, p);
  Vec lin = Vec::Zero(p);
  for (Eigen::Index i = 0; i < na; ++i) {
    const Vec& atom = atoms[static_cast<std::size_t>(i)];
    images.col(i) = prob.a.apply(atom);
    lin(i) = prob.c.dot(atom) - y.dot(images.col(i)) - rho * prob.b.dot(images.col(i));
  }
  // L_rho(P l, y) = const + lin^T l + (rho/2) l^T M^T M l
  const Mat h = rho * images.transpose() * images;
  const SimplexQpResult qp = simplex_qp(h, lin);
  HullSolution out;
  out.weights = qp.weights;
  out.point = Vec::Zero(static_cast<Eigen::Index>(prob.n()));
  for (Eigen::Index i = 0; i < na; ++i) {
    out.point += qp.weights(i) * atoms[static_cast<std::size_t>(i)];
  }
  return out;
}

SubproblemResult subproblem_argmin(const BundleSet& bundle, const ConicProblem& prob,
                                   double rho, const Vec& y) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  struct {
    const ConicProblem& prob;
    double rho;
    const Vec& y;
    SubproblemResult operator()(const Singleton& s) const { return {s.v, std::nullopt}; }
    SubproblemResult operator()(const Segment& s) const {
      return {segment_argmin(s.v, s.w, prob, rho, y).point, std::nullopt};
    }
    SubproblemResult operator()(const Hull& h) const {
      return {hull_argmin(h.atoms, h.include_origin, prob, rho, y).point, std::nullopt};
    }
    SubproblemResult operator()(const Spectral& s) const {
      SpectralSolution sol = spectral_argmin(s, prob, rho, y);
      Vec point = sol.point;
      return {std::move(point), std::move(sol)};
    }
  } visitor{prob, rho, y};
  return std::visit(visitor, bundle);
}

double model_value(const BundleSet& bundle, const ConicProblem& prob, const Vec& y) {
  auto neg_lagrangian = [&](const Vec& x) { return -lagrangian_value(prob, x, y); };
  struct {
    const ConicProblem& prob;
    const Vec& y;
    decltype(neg_lagrangian)& nl;
    double operator()(const Singleton& s) const { return nl(s.v); }
    double operator()(const Segment& s) const { return std::max(nl(s.v), nl(s.w)); }
    double operator()(const Hull& h) const {
      double best = h.include_origin ? -prob.b.dot(y)
                                     : -std::numeric_limits<double>::infinity();
      for (const auto& atom : h.atoms) best = std::max(best, nl(atom));
      return best;
    }
    double operator()(const Spectral& s) const {
      // min over the set of <C - A*y, X> is gamma * min{<M,xbar>, lambda_min(V^T M V), 0}
      const Vec mvec = prob.c - prob.a.apply_adjoint(y);
      const double on_xbar = mvec.dot(s.xbar);
      const Mat mm = svec_decode(mvec);
      const double on_subspace = lambda_min(symmetrize(s.v.transpose() * mm * s.v));
      const double inner = std::min({on_xbar, on_subspace, 0.0});
      return -prob.b.dot(y) - s.gamma * inner;
    }
  } visitor{prob, y, neg_lagrangian};
  return std::visit(visitor, bundle);
}

double model_value_at_candidate(const Vec& w, const Vec& y_k, const Vec& z, double rho,
                                const ConicProblem& prob) {
  const Vec expected = y_k + rho * (prob.b - prob.a.apply(w));
  const double scale = 1.0 + expected.norm();
  if ((expected - z).norm() > 1e-8 * scale) {
    throw Error(ErrorCode::invalid_argument,
                "model_value_at_candidate: z is not the dual candidate of w");
  }
  return -aug_lagrangian_value(prob, rho, w, y_k) - (z - y_k).squaredNorm() / (2.0 * rho);
}

namespace {

void require_member(const ConicProblem& prob, const Vec& x, const char* what) {
  const double tol = 1e-9 * std::max(1.0, cone_bound(prob.cone));
  if (!membership(prob.cone, x, tol)) {
    throw Error(ErrorCode::invariant_violation,
                std::string("bundle update: ") + what + " is outside the cone");
  }
}

}  // namespace

BundleSet update_bundle(BundlePolicy policy, StepType step, const Vec& w_next,
                        const Vec& v_next, const ConicProblem& prob) {
  require_member(prob, v_next, "v_next");
  require_member(prob, w_next, "w_next");
  switch (policy) {
    case BundlePolicy::segment: return Segment{v_next, w_next};
    case BundlePolicy::hull3: return Hull{{v_next, w_next}, true};
    case BundlePolicy::singleton:
      if (step == StepType::descent) return Singleton{v_next};
      return Segment{v_next, w_next};
    case BundlePolicy::spectral:
      break;
  }
  throw Error(ErrorCode::invalid_argument,
              "update_bundle: spectral sets are updated with spectral_update");
}

bool bundle_contains(const BundleSet& bundle, const Vec& x, double tol) {
  struct {
    const Vec& x;
    double tol;
    bool operator()(const Singleton& s) const { return (x - s.v).norm() <= tol; }
    bool operator()(const Segment& s) const {
      const Vec d = s.v - s.w;
      const double dd = d.squaredNorm();
      const double alpha = dd > 0.0 ? std::clamp((x - s.w).dot(d) / dd, 0.0, 1.0) : 0.0;
      return (x - (s.w + alpha * d)).norm() <= tol;
    }
    bool operator()(const Hull& h) const {
      std::vector<Vec> pts = h.atoms;
      if (h.include_origin) pts.push_back(Vec::Zero(x.size()));
      const auto p = static_cast<Eigen::Index>(pts.size());
      Mat pm(x.size(), p);
      for (Eigen::Index i = 0; i < p; ++i) pm.col(i) = pts[static_cast<std::size_t>(i)];
      const SimplexQpResult qp = simplex_qp(pm.transpose() * pm, -pm.transpose() * x);
      return (pm * qp.weights - x).norm() <= tol;
    }
    bool operator()(const Spectral& s) const {
      const auto r = static_cast<Eigen::Index>(s.v.cols());
      const Eigen::Index ds = r * (r + 1) / 2;
      Mat basis(x.size(), 1 + ds);
      basis.col(0) = s.xbar;
      for (Eigen::Index j = 0; j < ds; ++j) {
        const Mat e = svec_decode(Vec::Unit(ds, j));
        basis.col(1 + j) = svec_encode(symmetrize(s.v * e * s.v.transpose()));
      }
      const Vec coef = basis.completeOrthogonalDecomposition().solve(x);
      if ((basis * coef - x).norm() > tol) return false;
      const double eta = coef(0);
      const Mat sm = svec_decode(coef.tail(ds));
      return eta >= -tol && lambda_min(sm) >= -tol && eta + sm.trace() <= s.gamma + tol;
    }
  } visitor{x, tol};
  return std::visit(visitor, bundle);
}

std::string check_bundle(const BundleSet& bundle, const ConicProblem& prob, double tol) {
  const double mtol = tol * std::max(1.0, cone_bound(prob.cone));
  struct {
    const ConicProblem& prob;
    double tol;
    double mtol;
    std::string operator()(const Singleton& s) const {
      return membership(prob.cone, s.v, mtol) ? "" : "singleton atom outside cone";
    }
    std::string operator()(const Segment& s) const {
      if (!membership(prob.cone, s.v, mtol)) return "segment endpoint v outside cone";
      if (!membership(prob.cone, s.w, mtol)) return "segment endpoint w outside cone";
      return "";
    }
    std::string operator()(const Hull& h) const {
      for (const auto& atom : h.atoms) {
        if (!membership(prob.cone, atom, mtol)) return "hull atom outside cone";
      }
      return "";
    }
    std::string operator()(const Spectral& s) const {
      const auto* psd = std::get_if<PsdTrace>(&prob.cone);
      if (psd == nullptr) return "spectral set on a non-psd cone";
      if (s.gamma > psd->gamma + mtol) return "spectral gamma exceeds cone bound";
      if (static_cast<std::size_t>(s.v.cols()) != s.rank()) return "V has wrong column count";
      const Mat xbar = svec_decode(s.xbar);
      if (std::abs(xbar.trace() - 1.0) > 1e-10) return "tr(xbar) != 1";
      if (lambda_min(xbar) < -tol) return "xbar not psd";
      const Mat gram = s.v.transpose() * s.v;
      if ((gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10)
        return "V not orthonormal";
      return "";
    }
  } visitor{prob, tol, mtol};
  return std::visit(visitor, bundle);
}

}  // namespace bala
