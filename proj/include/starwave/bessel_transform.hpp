#pragma once

#include <functional>
#include <random>
#include <vector>

namespace starwave {

/// Power series of the entire kernel
///   K(X) = 2^{N/2} sum_k (-4X)^k / (k! Gamma(N/2 + k)) = 2 X^{(1-N/2)/2} J_{N/2-1}(4 sqrt X).
/// Valid (no cancellation beyond a few digits) for 0 <= X <= max_argument().
class KernelSeries {
 public:
  explicit KernelSeries(double n_param, double max_argument = 0.5);

  double operator()(double x) const;
  double n_param() const { return n_param_; }
  int truncation() const { return static_cast<int>(terms_.size()); }
  double max_argument() const { return max_arg_; }

 private:
  double n_param_;
  double max_arg_;
  std::vector<double> terms_;  // 2^{N/2} (-4)^k / (k! Gamma(N/2+k))
};

/// K(X) on [0, inf): series inside its validated range, Bessel function
/// of order N/2-1 beyond it.
double kernel_K(double n_param, double x);

/// Smooth function with support in [0, radius):
///   u(x) = p(x) exp(-sharpness / (radius - x)) for x < radius, 0 otherwise.
struct SmoothBump {
  std::vector<double> poly;  ///< monomial coefficients of p
  double radius = 5.0 / 6.0;
  double sharpness = 3.0;

  double value(double x) const;
  /// -(x u'' + N/2 u'), the model operator in the flipped variable.
  double minus_delta(double x, double n_param) const;
};

/// Bump with sharpness in [2, 4], radius in [1/2, 5/6] and a quadratic
/// factor that stays positive on the support.
SmoothBump random_bump(std::mt19937_64& rng);

struct TransformOptions {
  int nodes = 240;               ///< Gauss points on the support
  double resolve_tol = 1e-11;    ///< relative quadrature-error tolerance
  double tail_tol = 1e-8;        ///< relative tail size that stops the xi range
  double panel_width = 0.5;      ///< panel width in sqrt(xi)
  int panel_nodes = 16;
  double max_sqrt_xi = 200.0;
};

/// Fu(xi) = int_0^R K(xi x) u(x) x^{N/2-1} dx at each xi, by Gauss-Jacobi
/// quadrature in s = sqrt(x). Throws NumericalError when a refined rule
/// disagrees beyond `resolve_tol` (oscillation not resolved).
std::vector<double> forward_F(const std::function<double(double)>& u, double radius,
                              const std::vector<double>& xi, double n_param,
                              const TransformOptions& opts = {});

/// Result of transforming twice.
struct InvolutionResult {
  std::vector<double> x;      ///< sample points in (0, R)
  std::vector<double> u;      ///< u at the samples
  std::vector<double> ffu;    ///< F(Fu) at the samples
  double xi_cutoff = 0.0;     ///< adaptive truncation of the xi integral
  double relative_error = 0.0;  ///< weighted L2 ||F(Fu) - u|| / ||u||
};

/// Applies F twice; the outer integral over xi is truncated adaptively.
InvolutionResult involution_check(const std::function<double(double)>& u, double radius,
                                  double n_param, const TransformOptions& opts = {});

}  // namespace starwave
