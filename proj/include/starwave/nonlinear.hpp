#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "starwave/basis.hpp"
#include "starwave/linearized.hpp"
#include "starwave/model.hpp"

namespace starwave {

/// Background (y*, v*) sampled on the time grid t_n = n dt, n = 0..steps.
struct BackgroundPair {
  StatePair pair;
  std::string provenance;  ///< "periodic", "cauchy" or "custom"
};

/// Zero background with steps+1 slices.
BackgroundPair zero_background(const Discretization& disc, double dt, int steps);

/// Seed of the time-periodic family: eps sin(sqrt(lambda) t + theta0) Phi and
/// eps sqrt(lambda)/J(x,0,0) cos(sqrt(lambda) t + theta0) Phi.
BackgroundPair periodic_background(const Discretization& disc, const ModelSpec& model,
                                   const Eigen::VectorXd& phi, double lambda, double eps,
                                   double theta0, double dt, int steps);

/// Affine background y* = psi0 + t J(x,0,0) psi1, v* = psi1.
BackgroundPair cauchy_background(const Discretization& disc, const ModelSpec& model,
                                 const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1, double dt,
                                 int steps);

/// Midpoint residual of the perturbation equations for the state bg + w,
/// written as the perturbation operator minus the background defect c.
/// Slice n sits at t = (n + 1/2) dt; there are `steps` slices.
StatePair residual_P(const Discretization& disc, const ModelSpec& model, const StatePair& w,
                     const BackgroundPair& bg);

/// Same residual evaluated directly on the full state:
/// (U^{n+1} - U^n)/dt + F((U^n + U^{n+1})/2).
StatePair full_residual(const Discretization& disc, const ModelSpec& model, const StatePair& u);

/// sup over midpoints of the X norm of the residual slices.
double residual_norm(const StatePair& r);

struct EvolveOptions {
  double dt = 5e-4;
  int steps = 2000;
  double cfl = 0.5;
  double inner_tol = 1e-12;
  int max_inner = 50;
};

/// Implicit midpoint integration of the nonlinear system. Each step solves
/// the midpoint equation by a chord iteration with the Jacobian frozen at
/// the start of the step.
StatePair evolve_nonlinear(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& y0,
                           const Eigen::VectorXd& v0, const EvolveOptions& opts);

struct NewtonOptions {
  int max_iter = 20;
  double tol = 1e-10;
  bool nash_moser = false;
  double theta0 = 8.0;  ///< initial truncation degree
  double rho = 1.5;     ///< theta_{k+1} = rho theta_k
  int max_halvings = 8;
  double cfl = 0.5;
};

struct NewtonTrace {
  std::vector<double> residual;  ///< residual norm before iteration k, plus the final one
  std::vector<double> step_norm;
  std::vector<double> theta;     ///< truncation degree (0 when smoothing is off)
  std::vector<double> factor;    ///< accepted line-search factor
  int iterations = 0;
};

struct NewtonResult {
  StatePair w;
  NewtonTrace trace;
};

/// Solves residual_P(w) = 0 with w(0) = 0. Each step integrates the
/// linearized system forward from zero data with forcing -residual.
NewtonResult newton_solve(const Discretization& disc, const ModelSpec& model, const BackgroundPair& bg,
                          const NewtonOptions& opts);

/// bg + w slice by slice.
StatePair add_states(const StatePair& a, const StatePair& b);

/// Physical-space sup of a coefficient series over the quadrature nodes and
/// `extra` uniformly spaced interior points.
class SupNorm {
 public:
  explicit SupNorm(const Discretization& disc, int extra = 100);
  double operator()(const Eigen::VectorXd& coeffs) const;
  double operator()(const TimeField& f) const;

 private:
  Eigen::MatrixXd eval_;
};

struct PeriodicRow {
  double eps = 0.0;
  double error_y = 0.0, ratio_y = 0.0;
  double error_v = 0.0, ratio_v = 0.0;
  int iterations = 0;
  double final_residual = 0.0;
};

struct PeriodicResult {
  double lambda = 0.0;
  Eigen::VectorXd phi;  ///< sup-normalized eigenfunction coefficients
  std::vector<PeriodicRow> rows;
  double slope_y = 0.0, slope_v = 0.0;  ///< least-squares log-log slopes
};

struct PeriodicSetup {
  int mode = 1;  ///< index among the positive eigenvalues
  double theta0 = 0.0;
  double T = 1.0;
  int steps = 2000;
};

PeriodicResult periodic_experiment(const Discretization& disc, const ModelSpec& model,
                                   const PeriodicSetup& setup, const std::vector<double>& eps,
                                   const NewtonOptions& opts);

struct CauchyResult {
  StatePair newton;  ///< full solution bg + w
  StatePair direct;  ///< evolve_nonlinear from (psi0, psi1)
  double discrepancy = 0.0;
  double initial_defect = 0.0;  ///< sup |(y, v)(0) - (psi0, psi1)|
  NewtonTrace trace;
};

CauchyResult cauchy_solve(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& psi0,
                          const Eigen::VectorXd& psi1, double T, int steps, const NewtonOptions& opts);

/// Least-squares slope of log(err) against log(eps).
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err);

}  // namespace starwave
