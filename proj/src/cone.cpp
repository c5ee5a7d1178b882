#include "bala/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bala/error.hpp"

namespace bala {

namespace {

void check_length(const ConeSpec& cone, const Vec& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != primal_dimension(cone)) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": vector length " + std::to_string(x.size()) +
                    " does not match cone dimension " +
                    std::to_string(primal_dimension(cone)));
  }
}

// Lowest index attaining the maximum entry.
Eigen::Index argmax_lowest(const Vec& s) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < s.size(); ++i) {
    if (s(i) > s(best)) best = i;
  }
  return best;
}

// SOC Jordan eigenvalue s_t + ||s_bar||; the other one is s_t - ||s_bar||.
double soc_top_eigenvalue(const Vec& s, std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  return s(nn) + s.head(nn).norm();
}

}  // namespace

double support_term(const ConeSpec& cone, const Vec& s) {
  check_length(cone, s, "support_term");
  struct {
    const Vec& s;
    double operator()(const NonnegL1& c) const {
      return c.n == 0 ? 0.0 : s.maxCoeff();
    }
    double operator()(const SocBound& c) const { return soc_top_eigenvalue(s, c.n); }
    double operator()(const PsdTrace& c) const {
      return c.nbar == 0 ? 0.0 : lambda_max(svec_decode(s));
    }
  } visitor{s};
  return std::visit(visitor, cone);
}

double support_value(const ConeSpec& cone, const Vec& s) {
  return cone_bound(cone) * std::max(support_term(cone, s), 0.0);
}

Vec linear_maximizer(const ConeSpec& cone, const Vec& s) {
  check_length(cone, s, "linear_maximizer");
  Vec v = Vec::Zero(s.size());
  struct {
    const Vec& s;
    Vec& v;
    void operator()(const NonnegL1& c) const {
      if (c.n == 0) return;
      const Eigen::Index i = argmax_lowest(s);
      if (s(i) > 0.0) v(i) = c.a;
    }
    void operator()(const SocBound& c) const {
      const auto nn = static_cast<Eigen::Index>(c.n);
      if (!(soc_top_eigenvalue(s, c.n) > 0.0)) return;
      const double bar_norm = s.head(nn).norm();
      // s_bar = 0 leaves the axis point (0, a), one of many maximizers.
      if (bar_norm > 0.0) v.head(nn) = c.a * s.head(nn) / bar_norm;
      v(nn) = c.a;
    }
    void operator()(const PsdTrace& c) const {
      if (c.nbar == 0) return;
      const EigenPairs top = top_eigs(svec_decode(s), 1);
      if (!(top.values(0) > 0.0)) return;
      const Vec u = top.vectors.col(0);
      v = svec_encode(c.gamma * u * u.transpose());
    }
  } visitor{s, v};
  std::visit(visitor, cone);
  return v;
}

double dual_value(const ConicProblem& prob, const Vec& y) {
  const Vec s = prob.a.apply_adjoint(y) - prob.c;
  return -prob.b.dot(y) + support_value(prob.cone, s);
}

Vec extreme_point(const ConicProblem& prob, const Vec& y) {
  const Vec s = prob.a.apply_adjoint(y) - prob.c;
  return linear_maximizer(prob.cone, s);
}

Vec dual_subgradient(const ConicProblem& prob, const Vec& y) {
  return prob.a.apply(extreme_point(prob, y)) - prob.b;
}

bool membership(const ConeSpec& cone, const Vec& x, double tol) {
  if (static_cast<std::size_t>(x.size()) != primal_dimension(cone)) return false;
  if (!x.allFinite()) return false;
  struct {
    const Vec& x;
    double tol;
    bool operator()(const NonnegL1& c) const {
      if (c.n == 0) return true;
      if (x.minCoeff() < -tol) return false;
      return x.cwiseAbs().sum() <= c.a + tol;
    }
    bool operator()(const SocBound& c) const {
      const auto nn = static_cast<Eigen::Index>(c.n);
      const double t = x(nn);
      return x.head(nn).norm() <= t + tol && t <= c.a + tol;
    }
    bool operator()(const PsdTrace& c) const {
      if (c.nbar == 0) return true;
      const Mat m = svec_decode(x);
      return lambda_min(m) >= -tol && m.trace() <= c.gamma + tol;
    }
  } visitor{x, tol};
  return std::visit(visitor, cone);
}

double diameter_bound(const ConeSpec& cone) {
  struct {
    double operator()(const NonnegL1& c) const { return 2.0 * c.a; }
    double operator()(const SocBound& c) const { return 2.0 * c.a * M_SQRT2; }
    double operator()(const PsdTrace& c) const { return 2.0 * c.gamma; }
  } visitor;
  return std::visit(visitor, cone);
}

Vec project_capped_simplex(const Vec& z, double cap) {
  Vec clipped = z.cwiseMax(0.0);
  if (clipped.sum() <= cap) return clipped;
  // Project onto {w >= 0, sum w = cap}: w = max(z - tau, 0).
  std::vector<double> sorted(z.data(), z.data() + z.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - cap) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) tau = candidate;
  }
  return (z.array() - tau).cwiseMax(0.0).matrix();
}

Vec project(const ConeSpec& cone, const Vec& x) {
  check_length(cone, x, "project");
  struct {
    const Vec& x;
    Vec operator()(const NonnegL1& c) const { return project_capped_simplex(x, c.a); }
    Vec operator()(const SocBound& c) const {
      const auto nn = static_cast<Eigen::Index>(c.n);
      const Vec bar = x.head(nn);
      const double t = x(nn);
      const double r = bar.norm();
      Vec out = Vec::Zero(x.size());
      // Projection onto the cone without the cap.
      double t_proj;
      if (r <= t) {
        out = x;
        t_proj = t;
      } else if (r <= -t) {
        return out;
      } else {
        t_proj = 0.5 * (r + t);
        out.head(nn) = t_proj * bar / r;
        out(nn) = t_proj;
      }
      if (t_proj <= c.a) return out;
      // Cap active: shift along the axis until the height equals a.
      out.setZero();
      if (c.a <= 0.0) return out;
      if (r <= c.a) {
        out.head(nn) = bar;
      } else {
        out.head(nn) = c.a * bar / r;
      }
      out(nn) = c.a;
      return out;
    }
    Vec operator()(const PsdTrace& c) const {
      if (c.nbar == 0) return x;
      const EigenPairs eig = sym_eig(svec_decode(x));
      const Vec lam = project_capped_simplex(eig.values, c.gamma);
      const Mat m = eig.vectors * lam.asDiagonal() * eig.vectors.transpose();
      return svec_encode(symmetrize(m));
    }
  } visitor{x};
  return std::visit(visitor, cone);
}

}  // namespace bala
