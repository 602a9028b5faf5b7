#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "starwave/basis.hpp"
#include "starwave/polynomial.hpp"

namespace starwave {

/// Lower-order coefficients of the radial operator
///   L = -x(1-x)D^2 - (5/2 (1-x) - N/2 x) D + ell1(x) x(1-x) D + L0(x).
struct CoefficientFns {
  Polynomial ell1;
  Polynomial L0;
  double n_param = 6.0;

  /// Throws std::invalid_argument unless N > 4.
  void validate() const;
  /// Symmetrizing factor M(x) = exp(-int_0^x ell1): L = -(1/b) D a D + L0
  /// with a = x^{5/2}(1-x)^{N/2} M, b = x^{3/2}(1-x)^{N/2-1} M.
  double weight_factor(double x) const;
};

struct OperatorMatrix {
  Eigen::MatrixXd entries;
  std::string label;
};

enum class OperatorKind { check_D, dot_D, delta0, delta1, multiply };

/// Parses "check_D", "dot_D", "delta0", "delta1", "multiply".
OperatorKind parse_operator_kind(const std::string& name);

// Operators tabulated at the quadrature nodes: column j is the operator
// applied to basis function p_j, evaluated at every node.
Eigen::MatrixXd lambda_at_nodes(const Discretization& disc);
Eigen::MatrixXd check_d_at_nodes(const Discretization& disc);
Eigen::MatrixXd L_at_nodes(const Discretization& disc, const CoefficientFns& coeffs);

/// Drift coefficient 5/2 (1-x) - N/2 x of Lambda.
inline double lambda_drift(double n_param, double x) { return 2.5 * (1.0 - x) - 0.5 * n_param * x; }

/// Matrix of -Lambda, Lambda = x(1-x)D^2 + (5/2(1-x) - N/2 x) D.
OperatorMatrix assemble_lambda(const Discretization& disc);
/// Matrix of L = -Lambda + ell1 * check_D + L0.
OperatorMatrix assemble_L(const Discretization& disc, const CoefficientFns& coeffs);
/// Galerkin matrices of x(1-x)D, sqrt(x(1-x))D, x D^2 + 5/2 D,
/// (1-x) D^2 - N/2 D, or multiplication by `f`.
OperatorMatrix assemble_first_order(const Discretization& disc, OperatorKind kind,
                                    const std::function<double(double)>& f = {});

/// (p_i | M L p_j): symmetric because L is self-adjoint in the M-weighted space.
Eigen::MatrixXd weighted_L_form(const Discretization& disc, const CoefficientFns& coeffs);

struct IbpCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;  ///< sum of absolute values of the individual terms
};

/// (-alpha Lambda phi | psi) against (alpha Ddot phi | Ddot psi) + ((D alpha) Dcheck phi | psi).
IbpCheck ibp_residual_lambda(const Discretization& disc, const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& phi, const Eigen::VectorXd& psi);

/// (alpha Ddot phi | Ddot Dcheck phi) against (alpha* Ddot phi | Ddot phi) with
/// alpha* = -(3 - (N+1)x + 2 Dcheck) alpha / 4.
IbpCheck ibp_residual_dot(const Discretization& disc, const Eigen::VectorXd& alpha,
                          const Eigen::VectorXd& phi);

}  // namespace starwave
