#include "starwave/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "starwave/errors.hpp"
#include "starwave/symmetric_eigen.hpp"

namespace starwave {

namespace {

Eigen::VectorXd m_at_nodes(const Discretization& disc, const CoefficientFns& coeffs) {
  Eigen::VectorXd m(disc.nodes());
  for (int i = 0; i < disc.nodes(); ++i) m[i] = coeffs.weight_factor(disc.x()[i]);
  return m;
}

}  // namespace

double weighted_inner(const Discretization& disc, const CoefficientFns& coeffs,
                      const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const Eigen::VectorXd m = m_at_nodes(disc, coeffs);
  return (disc.weights().array() * m.array() * (disc.values() * f).array() *
          (disc.values() * g).array())
      .sum();
}

std::vector<EigenPair> solve_eigen(const Discretization& disc, const CoefficientFns& coeffs,
                                   int n_eig) {
  coeffs.validate();
  if (n_eig < 1) throw std::invalid_argument("solve_eigen: n_eig must be positive");
  if (disc.size() < 4 * n_eig)
    throw std::invalid_argument("solve_eigen: basis size " + std::to_string(disc.size()) +
                                " below resolution guard 4*" + std::to_string(n_eig));

  const auto& x = disc.x();
  const Eigen::VectorXd m = m_at_nodes(disc, coeffs);
  Eigen::VectorXd stiff_w(disc.nodes()), mass_w(disc.nodes()), pot_w(disc.nodes());
  for (int i = 0; i < disc.nodes(); ++i) {
    const double wi = disc.weights()[i] * m[i];
    stiff_w[i] = wi * x[i] * (1.0 - x[i]);
    mass_w[i] = wi;
    pot_w[i] = wi * coeffs.L0(x[i]);
  }
  const Eigen::MatrixXd& v = disc.values();
  const Eigen::MatrixXd& d1 = disc.d1();
  const Eigen::MatrixXd k =
      d1.transpose() * stiff_w.asDiagonal() * d1 + v.transpose() * pot_w.asDiagonal() * v;
  const Eigen::MatrixXd g = v.transpose() * mass_w.asDiagonal() * v;

  const SymmetricEigen se = generalized_eigen(k, g);
  const Eigen::MatrixXd l_nodes = L_at_nodes(disc, coeffs);

  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(n_eig));
  for (int j = 0; j < n_eig; ++j) {
    Eigen::VectorXd c = se.vectors.col(j);
    const double nrm = std::sqrt(weighted_inner(disc, coeffs, c, c));
    c /= nrm;
    if (synthesize(disc.basis(), c, 0.0) < 0.0) c = -c;
    EigenPair p;
    p.lambda = se.values[j];
    p.phi = disc.field(c);
    p.index = j + 1;
    p.galerkin_index = j;
    const Eigen::VectorXd r = l_nodes * c - p.lambda * p.phi.values;
    p.residual = std::sqrt((disc.weights().array() * m.array() * r.array().square()).sum());
    out.push_back(std::move(p));
  }
  for (std::size_t j = 1; j < out.size(); ++j)
    if (!(out[j].lambda > out[j - 1].lambda))
      throw NumericalError("solve_eigen: eigenvalues not simple at index " + std::to_string(j + 1));
  return out;
}

double liouville_xi(double x) { return std::asin(2.0 * x - 1.0); }

SymbolFunctions symbol_functions(const CoefficientFns& coeffs, double x) {
  const double n = coeffs.n_param;
  const double m = coeffs.weight_factor(x);
  return {std::pow(x, 2.5) * std::pow(1.0 - x, 0.5 * n) * m,
          std::pow(x, 1.5) * std::pow(1.0 - x, 0.5 * n - 1.0) * m, m};
}

double liouville_potential(const CoefficientFns& coeffs, double x) {
  if (!(x > 0.0 && x < 1.0))
    throw std::domain_error("liouville_potential: x must lie in (0,1), potential singular at endpoints");
  const double n = coeffs.n_param;
  const double l1 = coeffs.ell1(x);
  const double dl1 = coeffs.ell1.derivative()(x);
  const double xm = 1.0 - x;
  // Logarithmic derivatives; M'/M = -ell1.
  const double la = 2.5 / x - 0.5 * n / xm - l1;
  const double lb = 1.5 / x - (0.5 * n - 1.0) / xm - l1;
  const double s = la + lb;
  const double ds = -4.0 / (x * x) - (n - 1.0) / (xm * xm) - 2.0 * dl1;
  const double a_over_b = x * xm;
  return coeffs.L0(x) + 0.25 * a_over_b * (ds - 0.25 * s * s + la * s);
}

LiouvilleData liouville_data(const CoefficientFns& coeffs, const std::vector<double>& xs) {
  LiouvilleData d;
  d.x = xs;
  for (double x : xs) {
    d.xi.push_back(liouville_xi(x));
    d.q.push_back(liouville_potential(coeffs, x));
    const SymbolFunctions s = symbol_functions(coeffs, x);
    d.sym_a.push_back(s.a);
    d.sym_b.push_back(s.b);
    d.sym_m.push_back(s.m);
  }
  return d;
}

BoundaryConstants boundary_constants(const Discretization& disc, const EigenPair& pair) {
  const Eigen::VectorXd& c = pair.phi.coeffs;
  const int m = static_cast<int>(c.size());
  const int tail = std::max(1, m / 8);
  const double tail_norm = c.tail(tail).norm();
  if (tail_norm > 1e-6 * c.norm())
    throw NumericalError("boundary_constants: eigenfunction " + std::to_string(pair.index) +
                         " under-resolved (coefficient tail " + std::to_string(tail_norm) + ")");
  BoundaryConstants b;
  b.c0 = synthesize(disc.basis(), c, 0.0);
  b.c1 = synthesize(disc.basis(), c, 1.0);
  const double h = 1e-6;
  b.slope0 = (synthesize(disc.basis(), c, h) - b.c0) / h;
  return b;
}

const EigenPair& first_positive(const std::vector<EigenPair>& pairs, double threshold) {
  for (const auto& p : pairs)
    if (p.lambda > threshold) return p;
  throw NumericalError("no computed eigenvalue exceeds " + std::to_string(threshold));
}

}  // namespace starwave
