#include "starwave/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace starwave {

void CoefficientFns::validate() const {
  if (!(n_param > 4.0))
    throw std::invalid_argument("N must exceed 4 (got " + std::to_string(n_param) + ")");
}

double CoefficientFns::weight_factor(double x) const {
  if (ell1.is_zero()) return 1.0;
  return std::exp(-ell1.antiderivative()(x));
}

OperatorKind parse_operator_kind(const std::string& name) {
  if (name == "check_D") return OperatorKind::check_D;
  if (name == "dot_D") return OperatorKind::dot_D;
  if (name == "delta0") return OperatorKind::delta0;
  if (name == "delta1") return OperatorKind::delta1;
  if (name == "multiply") return OperatorKind::multiply;
  throw std::invalid_argument("unknown operator kind '" + name + "'");
}

Eigen::MatrixXd lambda_at_nodes(const Discretization& disc) {
  const auto& x = disc.x();
  const Eigen::ArrayXd xx = x.array() * (1.0 - x.array());
  const Eigen::ArrayXd drift = 2.5 * (1.0 - x.array()) - 0.5 * disc.n_param() * x.array();
  return xx.matrix().asDiagonal() * disc.d2() + drift.matrix().asDiagonal() * disc.d1();
}

Eigen::MatrixXd check_d_at_nodes(const Discretization& disc) {
  const auto& x = disc.x();
  const Eigen::VectorXd xx = (x.array() * (1.0 - x.array())).matrix();
  return xx.asDiagonal() * disc.d1();
}

Eigen::MatrixXd L_at_nodes(const Discretization& disc, const CoefficientFns& coeffs) {
  const auto& x = disc.x();
  Eigen::VectorXd l1(x.size()), l0(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    l1[i] = coeffs.ell1(x[i]);
    l0[i] = coeffs.L0(x[i]);
  }
  return -lambda_at_nodes(disc) + l1.asDiagonal() * check_d_at_nodes(disc) +
         l0.asDiagonal() * disc.values();
}

OperatorMatrix assemble_lambda(const Discretization& disc) {
  return {disc.galerkin(-lambda_at_nodes(disc)), "-Lambda"};
}

OperatorMatrix assemble_L(const Discretization& disc, const CoefficientFns& coeffs) {
  coeffs.validate();
  return {disc.galerkin(L_at_nodes(disc, coeffs)), "L"};
}

OperatorMatrix assemble_first_order(const Discretization& disc, OperatorKind kind,
                                    const std::function<double(double)>& f) {
  const auto& x = disc.x();
  const Eigen::Index q = x.size();
  Eigen::VectorXd c1(q), c2(q);
  std::string label;
  switch (kind) {
    case OperatorKind::check_D:
      return {disc.galerkin(check_d_at_nodes(disc)), "check_D"};
    case OperatorKind::dot_D:
      c1 = (x.array() * (1.0 - x.array())).sqrt().matrix();
      return {disc.galerkin(c1.asDiagonal() * disc.d1()), "dot_D"};
    case OperatorKind::delta0:
      c2 = x;
      c1.setConstant(2.5);
      label = "delta0";
      break;
    case OperatorKind::delta1:
      c2 = (1.0 - x.array()).matrix();
      c1.setConstant(-0.5 * disc.n_param());
      label = "delta1";
      break;
    case OperatorKind::multiply: {
      if (!f) throw std::invalid_argument("assemble_first_order: multiply needs a function");
      for (Eigen::Index i = 0; i < q; ++i) c1[i] = f(x[i]);
      return {disc.galerkin(c1.asDiagonal() * disc.values()), "multiply"};
    }
    default:
      throw std::invalid_argument("assemble_first_order: unknown operator kind");
  }
  return {disc.galerkin(c2.asDiagonal() * disc.d2() + c1.asDiagonal() * disc.d1()), label};
}

Eigen::MatrixXd weighted_L_form(const Discretization& disc, const CoefficientFns& coeffs) {
  const auto& x = disc.x();
  Eigen::VectorXd m(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) m[i] = coeffs.weight_factor(x[i]);
  return disc.galerkin(m.asDiagonal() * L_at_nodes(disc, coeffs));
}

IbpCheck ibp_residual_lambda(const Discretization& disc, const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) {
  const auto& x = disc.x();
  const Eigen::ArrayXd xx = x.array() * (1.0 - x.array());
  const Eigen::ArrayXd a = disc.values() * alpha;
  const Eigen::ArrayXd da = disc.d1() * alpha;
  const Eigen::ArrayXd lam_phi = lambda_at_nodes(disc) * phi;
  const Eigen::ArrayXd dphi = disc.d1() * phi;
  const Eigen::ArrayXd ps = disc.values() * psi;
  const Eigen::ArrayXd dpsi = disc.d1() * psi;
  const Eigen::ArrayXd w = disc.weights().array();

  IbpCheck r;
  r.lhs = (w * (-a * lam_phi * ps)).sum();
  const double t1 = (w * a * xx * dphi * dpsi).sum();  // (alpha Ddot phi | Ddot psi)
  const double t2 = (w * da * xx * dphi * ps).sum();   // ((D alpha) Dcheck phi | psi)
  r.rhs = t1 + t2;
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = std::abs(r.lhs) + std::abs(t1) + std::abs(t2);
  return r;
}

IbpCheck ibp_residual_dot(const Discretization& disc, const Eigen::VectorXd& alpha,
                          const Eigen::VectorXd& phi) {
  const auto& x = disc.x();
  const double n = disc.n_param();
  const Eigen::ArrayXd xa = x.array();
  const Eigen::ArrayXd xx = xa * (1.0 - xa);
  const Eigen::ArrayXd a = disc.values() * alpha;
  const Eigen::ArrayXd da = disc.d1() * alpha;
  const Eigen::ArrayXd dphi = disc.d1() * phi;
  const Eigen::ArrayXd d2phi = disc.d2() * phi;
  const Eigen::ArrayXd w = disc.weights().array();

  // Ddot phi = s phi', Ddot Dcheck phi = s ((1-2x) phi' + x(1-x) phi''), s^2 = x(1-x).
  const Eigen::ArrayXd d_check_phi = (1.0 - 2.0 * xa) * dphi + xx * d2phi;
  const Eigen::ArrayXd a_star = -0.25 * ((3.0 - (n + 1.0) * xa) * a + 2.0 * xx * da);

  IbpCheck r;
  r.lhs = (w * a * xx * dphi * d_check_phi).sum();
  r.rhs = (w * a_star * xx * dphi * dphi).sum();
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = std::abs(r.lhs) + std::abs(r.rhs);
  return r;
}

}  // namespace starwave
