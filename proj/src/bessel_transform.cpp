#include "starwave/bessel_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "starwave/errors.hpp"
#include "starwave/quadrature.hpp"

namespace starwave {

KernelSeries::KernelSeries(double n_param, double max_argument)
    : n_param_(n_param), max_arg_(max_argument) {
  if (!(n_param > 0.0)) throw std::invalid_argument("KernelSeries: N must be positive");
  if (!(max_argument > 0.0)) throw std::invalid_argument("KernelSeries: range must be positive");
  const double half = 0.5 * n_param;
  const double log_lead = half * std::log(2.0);
  for (int k = 0; k < 200; ++k) {
    const double mag = std::exp(log_lead + k * std::log(4.0) - std::lgamma(k + 1.0) - std::lgamma(half + k));
    terms_.push_back((k % 2 == 0 ? 1.0 : -1.0) * mag);
    // |term_k| X^k at the range end, relative to the leading term.
    if (k > 2 && mag * std::pow(max_arg_, k) < 1e-18 * std::abs(terms_[0])) break;
  }
}

double KernelSeries::operator()(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("KernelSeries: argument must be non-negative");
  if (x > max_arg_)
    throw std::out_of_range("KernelSeries: argument " + std::to_string(x) +
                            " beyond validated range " + std::to_string(max_arg_));
  double s = 0.0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) s = s * x + *it;
  return s;
}

double kernel_K(double n_param, double x) {
  static thread_local KernelSeries cached(6.0, 0.5);
  if (cached.n_param() != n_param) cached = KernelSeries(n_param, 0.5);
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("kernel_K: argument must be finite and >= 0");
  if (x <= cached.max_argument()) return cached(x);
  const double nu = 0.5 * n_param - 1.0;
  const double r = std::sqrt(x);
  return 2.0 * std::pow(r, -nu) * std::cyl_bessel_j(nu, 4.0 * r);
}

double SmoothBump::value(double x) const {
  if (x >= radius) return 0.0;
  double p = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * x + *it;
  return p * std::exp(-sharpness / (radius - x));
}

double SmoothBump::minus_delta(double x, double n_param) const {
  if (x >= radius) return 0.0;
  double p = 0.0, dp = 0.0, d2p = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) {
    d2p = d2p * x + 2.0 * dp;
    dp = dp * x + p;
    p = p * x + poly[k];
  }
  const double s = radius - x;
  const double e = std::exp(-sharpness / s);
  const double de = -sharpness / (s * s) * e;
  const double d2e = (sharpness * sharpness / (s * s * s * s) - 2.0 * sharpness / (s * s * s)) * e;
  const double du = dp * e + p * de;
  const double d2u = d2p * e + 2.0 * dp * de + p * d2e;
  return -(x * d2u + 0.5 * n_param * du);
}

SmoothBump random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SmoothBump b;
  b.sharpness = 2.0 + 2.0 * unit(rng);
  b.radius = 0.5 + (5.0 / 6.0 - 0.5) * unit(rng);
  b.poly = {1.0, unit(rng) - 0.5, 0.5 * (unit(rng) - 0.5)};
  return b;
}

namespace {

// Fu(xi) with an n-point Gauss-Jacobi rule in t = sqrt(x/R), weight t^{N-1}.
std::vector<double> forward_with(const QuadratureRule& rule, const std::vector<double>& uvals,
                                 double radius, const std::vector<double>& xi, double n_param,
                                 std::vector<double>* scale) {
  const double nu = 0.5 * n_param - 1.0;
  const double jac = 2.0 * std::pow(radius, nu + 1.0);
  std::vector<double> out(xi.size());
  if (scale) scale->assign(xi.size(), 0.0);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    double s = 0.0, a = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = radius * rule.nodes[i] * rule.nodes[i];
      const double term = rule.weights[i] * kernel_K(n_param, xi[j] * x) * uvals[i];
      s += term;
      a += std::abs(term);
    }
    out[j] = jac * s;
    if (scale) (*scale)[j] = jac * a;
  }
  return out;
}

}  // namespace

namespace {

std::vector<double> forward_checked(const std::function<double(double)>& u, double radius,
                                    const std::vector<double>& xi, double n_param,
                                    const QuadratureRule& fine, const QuadratureRule& coarse,
                                    const TransformOptions& opts) {
  auto sample = [&](const QuadratureRule& r) {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = u(radius * r.nodes[i] * r.nodes[i]);
    return v;
  };
  std::vector<double> scale;
  const std::vector<double> f = forward_with(fine, sample(fine), radius, xi, n_param, &scale);
  const std::vector<double> c = forward_with(coarse, sample(coarse), radius, xi, n_param, nullptr);
  double max_scale = 0.0;
  for (double s : scale) max_scale = std::max(max_scale, s);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (std::abs(f[j] - c[j]) > opts.resolve_tol * std::max(scale[j], 1e-300) &&
        std::abs(f[j] - c[j]) > 1e-15 * max_scale)
      throw NumericalError("forward_F: oscillation unresolved at xi=" + std::to_string(xi[j]) +
                           " (increase quadrature nodes)");
  }
  return f;
}

}  // namespace

std::vector<double> forward_F(const std::function<double(double)>& u, double radius,
                              const std::vector<double>& xi, double n_param,
                              const TransformOptions& opts) {
  if (!(radius > 0.0)) throw std::invalid_argument("forward_F: support radius must be positive");
  for (double v : xi)
    if (!(v >= 0.0)) throw std::invalid_argument("forward_F: xi samples must be non-negative");
  const double beta = n_param - 1.0;  // t^{2 nu + 1}
  const QuadratureRule fine = gauss_jacobi_rule(opts.nodes, 0.0, beta);
  const QuadratureRule coarse = gauss_jacobi_rule(opts.nodes * 3 / 4, 0.0, beta);
  return forward_checked(u, radius, xi, n_param, fine, coarse, opts);
}

InvolutionResult involution_check(const std::function<double(double)>& u, double radius,
                                  double n_param, const TransformOptions& opts) {
  const double beta = n_param - 1.0;
  const double nu = 0.5 * n_param - 1.0;
  // Outer nodes in sigma = sqrt(xi): first panel carries the sigma^{N-1} weight exactly.
  const QuadratureRule first = gauss_jacobi_rule(opts.panel_nodes, 0.0, beta);
  const QuadratureRule plain = gauss_jacobi_rule(opts.panel_nodes, 0.0, 0.0);
  const double h = opts.panel_width;

  // Sample points for the result: the inner rule's nodes.
  const QuadratureRule inner = gauss_jacobi_rule(opts.nodes, 0.0, beta);
  const QuadratureRule coarse = gauss_jacobi_rule(opts.nodes * 3 / 4, 0.0, beta);
  InvolutionResult res;
  for (std::size_t i = 0; i < inner.size(); i += 4) {
    const double x = radius * inner.nodes[i] * inner.nodes[i];
    res.x.push_back(x);
    res.u.push_back(u(x));
  }
  res.ffu.assign(res.x.size(), 0.0);

  double peak = 0.0;
  int quiet_panels = 0;
  int panel = 0;
  for (; (panel + 1) * h <= opts.max_sqrt_xi; ++panel) {
    const double a = panel * h;
    std::vector<double> sig, wts;
    const QuadratureRule& r = panel == 0 ? first : plain;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double s = a + h * r.nodes[i];
      sig.push_back(s);
      // d xi = 2 sigma d sigma, xi^{nu} = sigma^{2 nu}.
      const double w = panel == 0 ? r.weights[i] * std::pow(h, beta + 1.0) * 2.0
                                  : r.weights[i] * h * 2.0 * std::pow(s, 2.0 * nu + 1.0);
      wts.push_back(w);
    }
    std::vector<double> xi(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) xi[i] = sig[i] * sig[i];
    const std::vector<double> fu = forward_checked(u, radius, xi, n_param, inner, coarse, opts);
    double panel_mag = 0.0;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const double g = wts[i] * fu[i];
      panel_mag = std::max(panel_mag, std::abs(g) * std::max(1.0, std::pow(sig[i], -nu)));
      for (std::size_t j = 0; j < res.x.size(); ++j) res.ffu[j] += g * kernel_K(n_param, xi[i] * res.x[j]);
    }
    peak = std::max(peak, panel_mag);
    quiet_panels = panel_mag < opts.tail_tol * peak ? quiet_panels + 1 : 0;
    if (quiet_panels >= 3) break;
  }
  if (quiet_panels < 3)
    throw NumericalError("involution_check: transform tail not below tolerance up to sqrt(xi)=" +
                         std::to_string(opts.max_sqrt_xi));
  const double cutoff = (panel + 1) * h;
  res.xi_cutoff = cutoff * cutoff;

  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < res.x.size(); ++j) {
    const double w = std::pow(res.x[j], nu);
    num += w * (res.ffu[j] - res.u[j]) * (res.ffu[j] - res.u[j]);
    den += w * res.u[j] * res.u[j];
  }
  res.relative_error = std::sqrt(num / den);
  return res;
}

}  // namespace starwave
