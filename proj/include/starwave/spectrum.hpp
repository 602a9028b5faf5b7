#pragma once

#include <vector>

#include "starwave/basis.hpp"
#include "starwave/operators.hpp"

namespace starwave {

struct EigenPair {
  double lambda = 0.0;
  SpectralField phi;       ///< normalized in the M-weighted norm ||.||_b
  int index = 1;           ///< 1-based, lambda_1 < lambda_2 < ...
  int galerkin_index = 0;  ///< 0-based position in the Galerkin spectrum
  double residual = 0.0;   ///< ||L phi - lambda phi||_b / ||phi||_b at the nodes
};

/// Lowest `n_eig` eigenpairs of the Friedrichs realization of L, from the
/// variational (stiffness/Gram) form on the polynomial space.
/// Requires basis size >= 4 n_eig.
std::vector<EigenPair> solve_eigen(const Discretization& disc, const CoefficientFns& coeffs,
                                   int n_eig);

/// M-weighted inner product (f | g)_b of two coefficient vectors.
double weighted_inner(const Discretization& disc, const CoefficientFns& coeffs,
                      const Eigen::VectorXd& f, const Eigen::VectorXd& g);

/// xi = arcsin(2x - 1).
double liouville_xi(double x);

/// Symmetrizing coefficients a = x^{5/2}(1-x)^{N/2} M, b = x^{3/2}(1-x)^{N/2-1} M.
struct SymbolFunctions {
  double a = 0.0;
  double b = 0.0;
  double m = 0.0;
};
SymbolFunctions symbol_functions(const CoefficientFns& coeffs, double x);

/// Potential of the Liouville normal form, from analytic logarithmic
/// derivatives of a and b. Throws for x outside the open interval (0,1).
double liouville_potential(const CoefficientFns& coeffs, double x);

struct LiouvilleData {
  std::vector<double> x;
  std::vector<double> xi;
  std::vector<double> q;
  std::vector<double> sym_a, sym_b, sym_m;
};
LiouvilleData liouville_data(const CoefficientFns& coeffs, const std::vector<double>& xs);

struct BoundaryConstants {
  double c0 = 0.0;      ///< Phi(0)
  double c1 = 0.0;      ///< Phi(1)
  double slope0 = 0.0;  ///< finite-difference dPhi/dx at 0
};

/// Endpoint values of an eigenfunction. Throws NumericalError when the
/// coefficient tail shows the eigenfunction is not resolved.
BoundaryConstants boundary_constants(const Discretization& disc, const EigenPair& pair);

/// Smallest eigenvalue exceeding `threshold`; throws if none was computed.
const EigenPair& first_positive(const std::vector<EigenPair>& pairs, double threshold = 1e-8);

}  // namespace starwave
