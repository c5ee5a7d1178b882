#include "bala/conic_problem.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "bala/cone.hpp"
#include "bala/error.hpp"

namespace bala {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::malformed_file: return "malformed_file";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::dimension_inconsistent: return "dimension_inconsistent";
    case ErrorCode::unsupported_format: return "unsupported_format";
    case ErrorCode::solver_failure: return "solver_failure";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::io_failure: return "io_failure";
  }
  return "unknown";
}

std::size_t primal_dimension(const ConeSpec& cone) {
  struct {
    std::size_t operator()(const NonnegL1& c) const { return c.n; }
    std::size_t operator()(const SocBound& c) const { return c.n + 1; }
    std::size_t operator()(const PsdTrace& c) const { return svec_length(c.nbar); }
  } visitor;
  return std::visit(visitor, cone);
}

double cone_bound(const ConeSpec& cone) {
  struct {
    double operator()(const NonnegL1& c) const { return c.a; }
    double operator()(const SocBound& c) const { return c.a; }
    double operator()(const PsdTrace& c) const { return c.gamma; }
  } visitor;
  return std::visit(visitor, cone);
}

bool is_psd(const ConeSpec& cone) { return std::holds_alternative<PsdTrace>(cone); }

void ConicProblem::validate() const {
  std::ostringstream msg;
  const auto n = static_cast<std::size_t>(c.size());
  if (n != a.cols()) msg << "c has length " << n << " but A has " << a.cols() << " columns; ";
  if (static_cast<std::size_t>(b.size()) != a.rows())
    msg << "b has length " << b.size() << " but A has " << a.rows() << " rows; ";
  if (primal_dimension(cone) != n)
    msg << "cone dimension " << primal_dimension(cone) << " differs from n = " << n << "; ";
  if (!(cone_bound(cone) >= 0.0)) msg << "cone bound must be nonnegative; ";
  if (certificate) {
    if (certificate->x_star && static_cast<std::size_t>(certificate->x_star->size()) != n)
      msg << "certificate x_star has wrong length; ";
    if (certificate->y_star &&
        static_cast<std::size_t>(certificate->y_star->size()) != a.rows())
      msg << "certificate y_star has wrong length; ";
  }
  const std::string s = msg.str();
  if (!s.empty()) throw Error(ErrorCode::dimension_inconsistent, s);
}

namespace {

void check_dims(const ConicProblem& prob, const Vec& x, const Vec& y) {
  if (static_cast<std::size_t>(x.size()) != prob.n() ||
      static_cast<std::size_t>(y.size()) != prob.m()) {
    throw Error(ErrorCode::dimension_mismatch,
                "lagrangian: x or y has the wrong length");
  }
}

}  // namespace

double lagrangian_value(const ConicProblem& prob, const Vec& x, const Vec& y) {
  check_dims(prob, x, y);
  const Vec r = prob.b - prob.a.apply(x);
  return prob.c.dot(x) + y.dot(r);
}

double aug_lagrangian_value(const ConicProblem& prob, double rho, const Vec& x,
                            const Vec& y) {
  if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be positive");
  check_dims(prob, x, y);
  const Vec r = prob.b - prob.a.apply(x);
  return prob.c.dot(x) + y.dot(r) + 0.5 * rho * r.squaredNorm();
}

PrimalResiduals primal_residuals(const ConicProblem& prob, const Vec& x) {
  PrimalResiduals out;
  out.affine = (prob.a.apply(x) - prob.b).norm();
  if (prob.certificate) out.cost_gap = prob.c.dot(x) - prob.certificate->p_star;
  return out;
}

std::string check_certificate(const ConicProblem& prob, double feas_tol, double gap_tol) {
  if (!prob.certificate) return "no certificate";
  const auto& cert = *prob.certificate;
  std::ostringstream msg;
  if (cert.x_star) {
    const double res = (prob.a.apply(*cert.x_star) - prob.b).norm();
    if (res > feas_tol * (1.0 + prob.b.norm())) msg << "x_star affine residual " << res << "; ";
    if (!membership(prob.cone, *cert.x_star, feas_tol)) msg << "x_star outside cone; ";
    const double cost = prob.c.dot(*cert.x_star);
    if (std::abs(cost - cert.p_star) > gap_tol * (1.0 + std::abs(cert.p_star))) {
      msg << "<c, x_star> = " << cost << " differs from p_star; ";
    }
  }
  if (cert.x_star && cert.y_star) {
    const double gap = std::abs(prob.c.dot(*cert.x_star) - prob.b.dot(*cert.y_star));
    if (gap > gap_tol * (1.0 + std::abs(cert.p_star))) msg << "duality gap " << gap << "; ";
  }
  if (cert.g_star && cert.y_star) {
    const double g = dual_value(prob, *cert.y_star);
    if (std::abs(g - *cert.g_star) > gap_tol * (1.0 + std::abs(*cert.g_star)))
      msg << "g(y_star) = " << g << " differs from g_star; ";
  }
  return msg.str();
}

std::size_t svec_length(std::size_t nbar) { return nbar * (nbar + 1) / 2; }

std::size_t svec_dim_from_length(std::size_t len) {
  const auto nbar = static_cast<std::size_t>(
      std::llround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  if (svec_length(nbar) != len) {
    throw Error(ErrorCode::dimension_mismatch,
                "length " + std::to_string(len) + " is not a triangular number");
  }
  return nbar;
}

std::size_t svec_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

Vec svec_encode(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "svec: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_argument, "svec: matrix not symmetric");
  }
  const auto nbar = static_cast<std::size_t>(m.rows());
  Vec v(static_cast<Eigen::Index>(svec_length(nbar)));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      v(k++) = (i == j) ? m(i, j) : M_SQRT2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
  return v;
}

Mat svec_decode(const Vec& v) {
  const auto nbar = static_cast<Eigen::Index>(svec_dim_from_length(static_cast<std::size_t>(v.size())));
  Mat m(nbar, nbar);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < nbar; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (i == j) {
        m(i, j) = v(k);
      } else {
        m(i, j) = v(k) * M_SQRT1_2;
        m(j, i) = m(i, j);
      }
      ++k;
    }
  }
  return m;
}

}  // namespace bala
