#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "starwave/basis.hpp"
#include "starwave/model.hpp"
#include "starwave/norms.hpp"

namespace starwave {

/// (h, k) coefficient series on a uniform time grid.
using StatePair = PairField;

/// y, z = x y', v, w = x v' and L y at the quadrature nodes.
struct NodalState {
  Eigen::VectorXd y, z, v, w, Ly;
};
NodalState nodal_state(const Discretization& disc, const CoefficientFns& coeffs,
                       const Eigen::VectorXd& y, const Eigen::VectorXd& v);
/// Throws NumericalError when |y|, |z|, |v| or |w| reaches the U-box radius at a node.
void require_in_box(const Discretization& disc, const NodalState& s, double radius);

/// Coefficient fields of the linearization at the nodes.
struct CoefficientFields {
  Eigen::VectorXd J, H1, q;  // q = H1 / J
  Eigen::VectorXd a01, a00, a11, a10, a21, a20, b1, b0;
};
CoefficientFields coefficient_fields(const Discretization& disc, const ModelSpec& model,
                                     const NodalState& s);

/// Galerkin blocks of d/dt (h,k) + [[a1, -J], [A, a2]] (h,k) = g with
/// a1 = a01 Dcheck + a00, a2 = a21 Dcheck + a20, A = -H1 Lambda + b1 Dcheck + b0.
struct LinearizedOperator {
  CoefficientFields fields;
  Eigen::MatrixXd a1, negJ, A, a2;
  Eigen::MatrixXd block() const;
};

/// Linearization at the full state (y, v) = background + w.
LinearizedOperator assemble_DP(const Discretization& disc, const ModelSpec& model,
                               const Eigen::VectorXd& y, const Eigen::VectorXd& v);

/// Spatial part F(y, v) = (-P(J v), P(H1 L y + H2)) of the nonlinear system,
/// so that the system reads d/dt (y, v) + F = 0. Result stacks the two
/// coefficient vectors.
Eigen::VectorXd nonlinear_rhs(const Discretization& disc, const ModelSpec& model,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& v);

/// Forcing at the midpoint of step n (time t): stacked (g1, g2) coefficients.
using ForcingFn = std::function<Eigen::VectorXd(int step, double t)>;

struct IvpOptions {
  double dt = 1e-3;
  int steps = 1000;
  double cfl = 0.5;  ///< bound on dt sqrt(lambda_max)
};

/// Implicit midpoint integration of d/dt U + B(n) U = g(n) where B(n) is
/// assembled from the average of background slices n and n+1 (a single
/// background slice is held fixed).
StatePair solve_linear_ivp(const Discretization& disc, const ModelSpec& model,
                           const StatePair& background, const ForcingFn& forcing,
                           const Eigen::VectorXd& u0, const IvpOptions& opts);

/// Background slice pair averaged for step n.
std::pair<Eigen::VectorXd, Eigen::VectorXd> midpoint_background(const StatePair& background, int step);

/// Generic midpoint stepper for a (possibly step-dependent) block operator.
std::vector<Eigen::VectorXd> midpoint_integrate(const std::function<Eigen::MatrixXd(int)>& op,
                                                bool constant_operator, const ForcingFn& forcing,
                                                const Eigen::VectorXd& u0, double dt, int steps);

/// Largest frequency sqrt(lambda_max) of the frozen principal part.
double max_frequency(const Discretization& disc, const CoefficientFields& f);

struct EnergyReport {
  std::vector<double> t;        ///< midpoints
  std::vector<double> energy;   ///< E at the time nodes
  std::vector<double> half_dE;  ///< (E^{n+1} - E^n) / (2 dt)
  std::array<std::vector<double>, 5> beta;  ///< beta pairings per step
  std::vector<double> rhs;      ///< ((H1/J) Ddot h | Ddot g1) + (k | g2)
  std::vector<double> residual; ///< |LHS - RHS|
  double max_term = 0.0;
  double max_residual = 0.0;
  double relative_drift = 0.0;  ///< max |E - E0| / E0
};

/// Term-by-term evaluation of the energy identity along a computed solution.
EnergyReport energy_audit(const Discretization& disc, const ModelSpec& model,
                          const StatePair& background, const StatePair& solution,
                          const ForcingFn& forcing);

/// ||(phi, psi)||_H^2 = ||phi||^2 + ||Ddot phi||^2 + ||psi||^2 in the X norm.
double h_norm(const Discretization& disc, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi);

/// Pieces mu = 0, 1 of the cutoff system and its coupling.
struct TwoPieceOperator {
  std::array<LinearizedOperator, 2> piece;
  Eigen::MatrixXd c11, c21, c22;  ///< Galerkin coupling blocks
  // Nodal coefficient fields of the coupling and of the piece operators.
  Eigen::VectorXd c11_coef, c22_coef, c21_first, c21_zeroth;
  std::array<Eigen::VectorXd, 2> b2, b1, b0;
  Eigen::MatrixXd block() const;  ///< [[A0, -C], [C, A1]] acting on (h0, k0, h1, k1)
};

TwoPieceOperator assemble_two_piece(const Discretization& disc, const ModelSpec& model,
                                    const Eigen::VectorXd& y, const Eigen::VectorXd& v);

struct TwoPieceSolution {
  std::array<StatePair, 2> piece;
};

/// Evolves the cutoff system with forcing split as (omega g, g - omega g).
TwoPieceSolution solve_two_piece_ivp(const Discretization& disc, const ModelSpec& model,
                                     const StatePair& background, const ForcingFn& forcing,
                                     const Eigen::VectorXd& u0, const IvpOptions& opts);

/// max |coefficient| of the coupling outside [1/3, 2/3].
double coupling_leak(const Discretization& disc, const TwoPieceOperator& op);

/// ||h||_{n+1} / (||A h||_n + (1 + |a|_{n+4}) ||h||_0) for the piece mu at a
/// fixed time; A h and the coefficients enter through their projections.
double elliptic_ratio(const Discretization& disc, const NormEvaluator& ev, const TwoPieceOperator& op,
                      int mu, const Eigen::VectorXd& h, const Eigen::VectorXd& k, int n);

/// Tame-estimate diagnostic ||h||_m^(2) / (1 + ||g||_m^(2) + ||w||_{m+r}^(2)).
struct TameDiagnostic {
  double h_norm = 0.0, g_norm = 0.0, w_norm = 0.0, ratio = 0.0;
};
TameDiagnostic tame_diagnostic(const NormEvaluator& ev, const StatePair& h, const StatePair& g,
                               const StatePair& w, int m, int r);

}  // namespace starwave
