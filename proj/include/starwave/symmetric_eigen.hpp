#pragma once

#include <Eigen/Dense>

namespace starwave {

/// Eigen-decomposition of a dense symmetric matrix.
/// Eigenvalues are ascending; column j of `vectors` belongs to `values[j]`.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi rotations. Throws NumericalError when the off-diagonal
/// mass does not drop below tolerance within `max_sweeps`.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, int max_sweeps = 60);

/// Solves K c = lambda G c for symmetric K and symmetric positive definite G.
/// Eigenvectors are G-orthonormal.
SymmetricEigen generalized_eigen(const Eigen::MatrixXd& k,
                                 const Eigen::MatrixXd& g);

}  // namespace starwave
