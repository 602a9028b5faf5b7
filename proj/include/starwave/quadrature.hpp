#pragma once

#include <cstddef>
#include <vector>

namespace starwave {

/// Euler Beta function B(a, b) for a, b > 0.
double beta_function(double a, double b);

/// Three-term recurrence of the orthonormal polynomials for the weight
/// x^beta_exp (1-x)^alpha_exp on [0,1]:
///   x p_k = offdiag[k+1] p_{k+1} + diag[k] p_k + offdiag[k] p_{k-1}.
/// offdiag[0] is unused (zero).
struct JacobiRecurrence {
  double alpha_exp = 0.0;
  double beta_exp = 0.0;
  double mass = 1.0;  ///< integral of the weight over [0,1]
  std::vector<double> diag;
  std::vector<double> offdiag;
};

/// Recurrence coefficients for degrees 0..n (offdiag has n+1 entries).
JacobiRecurrence jacobi_recurrence(int n, double alpha_exp, double beta_exp);

/// n-point Gauss rule on [0,1] for the weight x^beta_exp (1-x)^alpha_exp.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double alpha_exp = 0.0;  ///< exponent of (1-x)
  double beta_exp = 0.0;   ///< exponent of x

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Golub-Welsch: nodes are eigenvalues of the symmetric recurrence matrix,
/// then polished by Newton on p_n with Christoffel-function weights.
QuadratureRule gauss_jacobi_rule(int n, double alpha_exp, double beta_exp);

}  // namespace starwave
