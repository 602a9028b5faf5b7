#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "starwave/basis.hpp"
#include "starwave/jet.hpp"
#include "starwave/quadrature.hpp"

namespace starwave {

/// Cutoff with omega = 1 on [0, 1/3] and omega = 0 on [2/3, 1]; in between
/// omega = 1 / (1 + exp(1/(1-s) - 1/s)), s = 3x - 1.
double omega(double x);
Jet omega_jet(double x0, int order);

/// (omega u, u - omega u) at the nodes.
std::pair<Eigen::VectorXd, Eigen::VectorXd> cutoff_split(const Discretization& disc,
                                                         const Eigen::VectorXd& nodal);

/// Field sampled on a uniform time grid, each slice given by basis
/// coefficients. A single slice is a time-independent field.
struct TimeField {
  double dt = 0.0;
  std::vector<Eigen::VectorXd> slices;

  bool is_static() const { return slices.size() <= 1; }
  int steps() const { return static_cast<int>(slices.size()) - 1; }
};

/// (h, k) on a common time grid.
struct PairField {
  TimeField h, k;
};

enum class Piece { whole, inner, outer };  // u, omega u, (1 - omega) u

enum class Grading { inf_n, two_n, bracket, pair_k, pair_sup_n, pair_int_n, pointwise_n };
Grading parse_grading(const std::string& name);

struct GradedNormEntry {
  int mu = 0, j = 0, k = 0;
  double sup_value = 0.0;  ///< ||(-d_t^2)^j (-Delta_mu)^k u^[mu]||_inf
  double l2_value = 0.0;   ///< int_0^T ||...||_[mu]^2 dt
};

struct GradedNormReport {
  std::vector<GradedNormEntry> table;
  std::vector<double> inf;  ///< composite ||u||_n^(inf), n = 0..n_max
  std::vector<double> two;  ///< composite ||u||_n^(2)
  int time_slices = 0;
  double dt = 0.0;
  double horizon = 0.0;
};

struct NormOptions {
  int aux_points = 100;    ///< uniform points (i + 1/2)/aux added to the nodes for sup norms
  int weight_rule = 0;     ///< Gauss points for ||.||_[mu]; 0 means 3x basis size
  double horizon = 1.0;    ///< T used when the field is time-independent
};

class NormEvaluator {
 public:
  explicit NormEvaluator(const Discretization& disc, NormOptions opts = {});

  /// ||f||_[mu] of a pointwise function.
  double weighted_norm(int mu, const std::function<double(double)>& f) const;

  /// <u>_[mu] ell for one time slice.
  double bracket(int mu, int ell, const Eigen::VectorXd& coeffs, Piece piece = Piece::whole) const;

  /// ||u||_[mu]n^(inf), ||u||_[mu]n^(2) applied to the chosen piece of u.
  double inf_n(int mu, const TimeField& u, int n, Piece piece) const;
  double two_n(int mu, const TimeField& u, int n, Piece piece) const;
  /// Composite grades over the cutoff pieces.
  double inf_n(const TimeField& u, int n) const;
  double two_n(const TimeField& u, int n) const;

  /// ||h||_k at one time slice (composite over pieces).
  double pair_k(const PairField& h, int slice, int k) const;
  /// ||h||_n^<tau>.
  double pair_sup_n(const PairField& h, int n, double tau) const;
  /// |||h|||_n.
  double pair_int_n(const PairField& h, int n) const;
  /// |h|_n^<T>.
  double pointwise_n(const PairField& h, int n) const;
  /// max over the two components of the composite ||.||_n^(inf).
  double pair_inf_n(const PairField& h, int n) const;

  GradedNormReport report(const TimeField& u, int n_max) const;

  /// max over k <= k_max of sup |Ddot_[mu]^k f| for one spatial field.
  double dot_sup(int mu, const Eigen::VectorXd& coeffs, int k_max) const;

  const std::vector<double>& sup_points() const { return sup_points_; }

 private:
  struct Tables;
  Tables tabulate(const TimeField& u, int mu, Piece piece, const std::vector<double>& pts,
                  int order) const;
  double horizon(const TimeField& u) const;

  const Discretization& disc_;
  NormOptions opts_;
  std::vector<double> sup_points_;
  QuadratureRule rule_[2];
};

/// Finite-difference weights for the derivatives 0..max_order at z
/// from samples at grid (Fornberg's recursion); result(d, i).
Eigen::MatrixXd fd_weights(double z, const std::vector<double>& grid, int max_order);

}  // namespace starwave
