#include "starwave/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace starwave {

JacobiBasis::JacobiBasis(double alpha_exp, double beta_exp, int size)
    : rec_(jacobi_recurrence(size, alpha_exp, beta_exp)), size_(size) {
  if (size < 1) throw std::invalid_argument("JacobiBasis: size must be positive");
}

JacobiBasis JacobiBasis::for_state_space(double n_param, int size) {
  return JacobiBasis(0.5 * n_param - 1.0, 1.5, size);
}

double JacobiBasis::eval(int degree, double x) const {
  if (degree < 0 || degree >= size_)
    throw std::out_of_range("JacobiBasis::eval: degree " + std::to_string(degree) +
                            " outside [0," + std::to_string(size_) + ")");
  double p_prev = 0.0, p = 1.0 / std::sqrt(rec_.mass);
  for (int k = 0; k < degree; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double next = ((x - rec_.diag[ku]) * p - rec_.offdiag[ku] * p_prev) / rec_.offdiag[ku + 1];
    p_prev = p;
    p = next;
  }
  return p;
}

void JacobiBasis::eval_derivatives(double x, int order, Eigen::MatrixXd& out) const {
  out.setZero(order + 1, size_);
  out(0, 0) = 1.0 / std::sqrt(rec_.mass);
  for (int k = 0; k + 1 < size_; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double a = rec_.diag[ku];
    const double b = rec_.offdiag[ku];
    const double b1 = rec_.offdiag[ku + 1];
    for (int r = 0; r <= order; ++r) {
      double v = (x - a) * out(r, k);
      if (r > 0) v += r * out(r - 1, k);
      if (k > 0) v -= b * out(r, k - 1);
      out(r, k + 1) = v / b1;
    }
  }
}

std::vector<double> JacobiBasis::jet(const Eigen::VectorXd& coeffs, double x, int order) const {
  if (coeffs.size() > size_) throw std::invalid_argument("JacobiBasis::jet: too many coefficients");
  Eigen::MatrixXd d;
  eval_derivatives(x, order, d);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  double fact = 1.0;
  for (int r = 0; r <= order; ++r) {
    if (r > 0) fact *= r;
    out[static_cast<std::size_t>(r)] = d.row(r).head(coeffs.size()).dot(coeffs) / fact;
  }
  return out;
}

Eigen::VectorXd analyze(const QuadratureRule& rule, const JacobiBasis& basis,
                        std::span<const double> values) {
  if (values.size() != rule.size())
    throw std::invalid_argument("analyze: value count does not match rule size");
  if (static_cast<int>(rule.size()) < basis.size())
    throw std::invalid_argument("analyze: rule smaller than basis");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  Eigen::MatrixXd d;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.eval_derivatives(rule.nodes[q], 0, d);
    c += (rule.weights[q] * values[q]) * d.row(0).transpose();
  }
  return c;
}

double synthesize(const JacobiBasis& basis, const Eigen::VectorXd& coeffs, double x) {
  if (coeffs.size() != basis.size()) throw std::invalid_argument("synthesize: dimension mismatch");
  // Clenshaw-free: the recurrence is cheap enough to run forward.
  const auto& r = basis.recurrence();
  double p_prev = 0.0, p = 1.0 / std::sqrt(r.mass);
  double s = 0.0;
  for (int k = 0; k < basis.size(); ++k) {
    s += coeffs[k] * p;
    if (k + 1 == basis.size()) break;
    const auto ku = static_cast<std::size_t>(k);
    const double next = ((x - r.diag[ku]) * p - r.offdiag[ku] * p_prev) / r.offdiag[ku + 1];
    p_prev = p;
    p = next;
  }
  return s;
}

Discretization::Discretization(double n_param, int basis_size, int rule_size)
    : basis_(JacobiBasis::for_state_space(n_param, basis_size)),
      rule_(gauss_jacobi_rule(rule_size > 0 ? rule_size : 2 * basis_size, basis_.alpha_exp(),
                              basis_.beta_exp())),
      ibasis_(basis_.alpha_exp(), basis_.beta_exp(), static_cast<int>(rule_.size())) {
  if (!(n_param > 4.0)) throw std::invalid_argument("Discretization: N must exceed 4");
  const int q = static_cast<int>(rule_.size());
  const int m = basis_size;
  if (q < m) throw std::invalid_argument("Discretization: rule smaller than basis");
  x_ = Eigen::Map<const Eigen::VectorXd>(rule_.nodes.data(), q);
  w_ = Eigen::Map<const Eigen::VectorXd>(rule_.weights.data(), q);
  v_.resize(q, m);
  d1_.resize(q, m);
  d2_.resize(q, m);
  Eigen::MatrixXd full(q, q);
  Eigen::MatrixXd full_d1(q, q);
  Eigen::MatrixXd d;
  for (int i = 0; i < q; ++i) {
    ibasis_.eval_derivatives(x_[i], 2, d);
    full.row(i) = d.row(0);
    full_d1.row(i) = d.row(1);
    v_.row(i) = d.row(0).head(m);
    d1_.row(i) = d.row(1).head(m);
    d2_.row(i) = d.row(2).head(m);
  }
  a_ = v_.transpose() * w_.asDiagonal();
  ia_ = full.transpose() * w_.asDiagonal();
  nodal_diff_ = full_d1 * ia_;
}

Eigen::VectorXd Discretization::nodal_derivative(const Eigen::VectorXd& nodal) const {
  return nodal_diff_ * nodal;
}

double Discretization::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return (w_.array() * f.array() * g.array()).sum();
}

}  // namespace starwave
