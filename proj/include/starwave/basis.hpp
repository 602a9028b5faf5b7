#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "starwave/quadrature.hpp"

namespace starwave {

/// Orthonormal polynomial basis on [0,1] for the weight
/// x^beta_exp (1-x)^alpha_exp. For the state space of the wave system the
/// weight is x^{3/2}(1-x)^{N/2-1}; see `JacobiBasis::for_state_space`.
class JacobiBasis {
 public:
  JacobiBasis(double alpha_exp, double beta_exp, int size);

  /// Basis of the weighted space L^2(x^{3/2}(1-x)^{N/2-1} dx).
  static JacobiBasis for_state_space(double n_param, int size);

  int size() const { return size_; }
  double alpha_exp() const { return rec_.alpha_exp; }
  double beta_exp() const { return rec_.beta_exp; }
  /// N recovered from the (1-x) exponent (alpha = N/2 - 1).
  double n_param() const { return 2.0 * (rec_.alpha_exp + 1.0); }
  /// Weighted L^2 norm of the constant function 1.
  double norm_of_one() const { return std::sqrt(rec_.mass); }
  const JacobiRecurrence& recurrence() const { return rec_; }

  double eval(int degree, double x) const;

  /// out(r, k) = r-th derivative of p_k at x, for r = 0..order.
  void eval_derivatives(double x, int order, Eigen::MatrixXd& out) const;

  /// Taylor coefficients c_r = f^{(r)}(x)/r!, r = 0..order, of sum_k coeffs[k] p_k.
  std::vector<double> jet(const Eigen::VectorXd& coeffs, double x, int order) const;

 private:
  JacobiRecurrence rec_;
  int size_;
};

/// Function on [0,1] stored as basis coefficients plus values at the nodes
/// of the rule it was built on.
struct SpectralField {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd values;
};

/// Discrete projection: coeffs_k = sum_q w_q p_k(x_q) f(x_q).
Eigen::VectorXd analyze(const QuadratureRule& rule, const JacobiBasis& basis,
                        std::span<const double> values);
double synthesize(const JacobiBasis& basis, const Eigen::VectorXd& coeffs, double x);

/// Basis, matching quadrature rule, and the basis tabulated at the nodes.
/// The rule has `rule_size` points for the same weight as the basis.
class Discretization {
 public:
  Discretization(double n_param, int basis_size, int rule_size = 0);

  const JacobiBasis& basis() const { return basis_; }
  const QuadratureRule& rule() const { return rule_; }
  int size() const { return basis_.size(); }
  int nodes() const { return static_cast<int>(rule_.size()); }
  double n_param() const { return basis_.n_param(); }

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& weights() const { return w_; }
  /// (Q x m) values, first and second derivatives of the basis at nodes.
  const Eigen::MatrixXd& values() const { return v_; }
  const Eigen::MatrixXd& d1() const { return d1_; }
  const Eigen::MatrixXd& d2() const { return d2_; }
  /// (m x Q) analysis matrix V^T W.
  const Eigen::MatrixXd& analysis() const { return a_; }

  Eigen::VectorXd to_nodes(const Eigen::VectorXd& coeffs) const { return v_ * coeffs; }
  Eigen::VectorXd project(const Eigen::VectorXd& nodal) const { return a_ * nodal; }
  SpectralField field(const Eigen::VectorXd& coeffs) const { return {coeffs, v_ * coeffs}; }

  /// Galerkin matrix (p_i | op p_j) from the operator tabulated at nodes
  /// (Q x m, column j = op applied to p_j).
  Eigen::MatrixXd galerkin(const Eigen::MatrixXd& op_at_nodes) const { return a_ * op_at_nodes; }

  /// Derivative of the degree-(Q-1) interpolant of nodal data, at the nodes.
  Eigen::VectorXd nodal_derivative(const Eigen::VectorXd& nodal) const;

  /// Weighted inner product by quadrature of nodal data.
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

  /// Coefficients of the degree-(Q-1) interpolant in the interpolation basis.
  Eigen::VectorXd interpolate(const Eigen::VectorXd& nodal) const { return ia_ * nodal; }
  const JacobiBasis& interpolation_basis() const { return ibasis_; }

 private:
  JacobiBasis basis_;
  QuadratureRule rule_;
  JacobiBasis ibasis_;
  Eigen::VectorXd x_, w_;
  Eigen::MatrixXd v_, d1_, d2_, a_, ia_, nodal_diff_;
};

}  // namespace starwave
