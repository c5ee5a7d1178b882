#pragma once

#include <cstddef>
#include <variant>

namespace bala {

/// {x in R^n_+ : ||x||_1 <= a}
struct NonnegL1 {
  std::size_t n = 0;
  double a = 0.0;
};

/// {x in R^{n+1} : ||x_{1:n}|| <= x_{n+1} <= a}
struct SocBound {
  std::size_t n = 0;
  double a = 0.0;
};

/// {X in S^nbar_+ : tr(X) <= gamma}, primal vectors in svec coordinates.
struct PsdTrace {
  std::size_t nbar = 0;
  double gamma = 0.0;
};

using ConeSpec = std::variant<NonnegL1, SocBound, PsdTrace>;

/// Length of primal vectors living in the cone.
std::size_t primal_dimension(const ConeSpec& cone);

/// Bound parameter (a or gamma).
double cone_bound(const ConeSpec& cone);

bool is_psd(const ConeSpec& cone);

}  // namespace bala
