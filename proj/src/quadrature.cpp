#include "starwave/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "starwave/errors.hpp"
#include "starwave/symmetric_eigen.hpp"

namespace starwave {

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta_function: arguments must be positive");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

JacobiRecurrence jacobi_recurrence(int n, double alpha_exp, double beta_exp) {
  if (n < 0) throw std::invalid_argument("jacobi_recurrence: negative degree");
  if (!(alpha_exp > -1.0) || !(beta_exp > -1.0))
    throw std::invalid_argument("jacobi_recurrence: exponents must exceed -1");
  const double a = alpha_exp;
  const double b = beta_exp;
  JacobiRecurrence r;
  r.alpha_exp = a;
  r.beta_exp = b;
  r.mass = beta_function(b + 1.0, a + 1.0);
  r.diag.resize(static_cast<std::size_t>(n) + 1);
  r.offdiag.assign(static_cast<std::size_t>(n) + 2, 0.0);

  // Monic recurrence on [-1,1] for (1-t)^a (1+t)^b, then x = (1+t)/2.
  for (int k = 0; k <= n; ++k) {
    double alpha_k;
    if (k == 0) {
      alpha_k = (b - a) / (a + b + 2.0);
    } else {
      const double s = 2.0 * k + a + b;
      alpha_k = (b * b - a * a) / (s * (s + 2.0));
    }
    r.diag[static_cast<std::size_t>(k)] = 0.5 * (1.0 + alpha_k);
  }
  for (int k = 1; k <= n + 1; ++k) {
    double beta_k;
    if (k == 1) {
      beta_k = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      const double s = 2.0 * k + a + b;
      beta_k = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    r.offdiag[static_cast<std::size_t>(k)] = 0.5 * std::sqrt(beta_k);
  }
  return r;
}

namespace {

// Orthonormal p_0..p_{n} at x; returns p_n and its derivative, and the sum
// of squares of p_0..p_{n-1}.
struct EvalResult {
  double pn;
  double dpn;
  double sum_sq;
};

EvalResult eval_orthonormal(const JacobiRecurrence& r, int n, double x) {
  double p_prev = 0.0, p = 1.0 / std::sqrt(r.mass);
  double d_prev = 0.0, d = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += p * p;
    const double ak = r.diag[static_cast<std::size_t>(k)];
    const double bk = r.offdiag[static_cast<std::size_t>(k)];
    const double bk1 = r.offdiag[static_cast<std::size_t>(k) + 1];
    const double p_next = ((x - ak) * p - bk * p_prev) / bk1;
    const double d_next = (p + (x - ak) * d - bk * d_prev) / bk1;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d, sum_sq};
}

}  // namespace

QuadratureRule gauss_jacobi_rule(int n, double alpha_exp, double beta_exp) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_rule: need n >= 1");
  if (!(alpha_exp > -1.0) || !(beta_exp > -1.0))
    throw std::invalid_argument("gauss_jacobi_rule: non-integrable weight (exponent <= -1)");
  const JacobiRecurrence r = jacobi_recurrence(n, alpha_exp, beta_exp);

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    t(k, k) = r.diag[static_cast<std::size_t>(k)];
    if (k + 1 < n) t(k, k + 1) = t(k + 1, k) = r.offdiag[static_cast<std::size_t>(k) + 1];
  }
  const SymmetricEigen se = jacobi_eigen(t);

  QuadratureRule rule;
  rule.alpha_exp = alpha_exp;
  rule.beta_exp = beta_exp;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = se.values[i];
    for (int it = 0; it < 8; ++it) {
      const EvalResult e = eval_orthonormal(r, n, x);
      if (e.dpn == 0.0) break;
      const double dx = e.pn / e.dpn;
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    const EvalResult e = eval_orthonormal(r, n, x);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / e.sum_sq;
  }
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    if (!(x > 0.0 && x < 1.0) || (i > 0 && !(x > rule.nodes[static_cast<std::size_t>(i) - 1])))
      throw NumericalError("gauss_jacobi_rule: node ordering failed for n=" + std::to_string(n));
  }
  return rule;
}

}  // namespace starwave
