#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace starwave {

/// Truncated Taylor series f(x0 + h) = sum_i c[i] h^i, i <= order.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<double> c) : c_(std::move(c)) {}
  static Jet constant(double v, int order) {
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[0] = v;
    return Jet(std::move(c));
  }
  /// The identity x at x0.
  static Jet variable(double x0, int order) {
    Jet j = constant(x0, order);
    if (order > 0) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double value() const { return c_.at(0); }
  /// i-th derivative at x0.
  double derivative(int i) const {
    double f = 1.0;
    for (int r = 2; r <= i; ++r) f *= r;
    return c_.at(static_cast<std::size_t>(i)) * f;
  }
  const std::vector<double>& coeffs() const { return c_; }

  Jet truncated(int order) const {
    if (order > this->order()) throw std::invalid_argument("Jet: cannot raise order");
    return Jet(std::vector<double>(c_.begin(), c_.begin() + order + 1));
  }

  /// d/dh, one order lower.
  Jet diff() const {
    if (order() < 1) throw std::invalid_argument("Jet::diff: order exhausted");
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(i + 1) * c_[i + 1];
    return Jet(std::move(d));
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, -1.0); }
  friend Jet operator-(const Jet& a) { return combine(Jet::constant(0.0, a.order()), a, -1.0); }
  friend Jet operator*(double s, Jet a) {
    for (double& v : a.c_) v *= s;
    return a;
  }
  friend Jet operator+(double s, Jet a) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order());
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i)
      for (int k = 0; k <= i; ++k) c[i] += a[k] * b[i - k];
    return Jet(std::move(c));
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order());
    if (b[0] == 0.0) throw std::domain_error("Jet: division by a jet vanishing at the base point");
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
      double s = a[i];
      for (int k = 1; k <= i; ++k) s -= b[k] * c[i - k];
      c[i] = s / b[0];
    }
    return Jet(std::move(c));
  }

  friend Jet exp(const Jet& a) {
    const int n = a.order();
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = std::exp(a[0]);
    // e' = a' e
    for (int i = 1; i <= n; ++i) {
      double s = 0.0;
      for (int k = 1; k <= i; ++k) s += k * a[k] * c[i - k];
      c[i] = s / i;
    }
    return Jet(std::move(c));
  }

  friend Jet sqrt(const Jet& a) {
    const int n = a.order();
    if (!(a[0] > 0.0)) throw std::domain_error("Jet: sqrt needs a positive base value");
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = std::sqrt(a[0]);
    for (int i = 1; i <= n; ++i) {
      double s = a[i];
      for (int k = 1; k < i; ++k) s -= c[k] * c[i - k];
      c[i] = s / (2.0 * c[0]);
    }
    return Jet(std::move(c));
  }

 private:
  static Jet combine(const Jet& a, const Jet& b, double sb) {
    const int n = std::min(a.order(), b.order());
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) c[i] = a[i] + sb * b[i];
    return Jet(std::move(c));
  }

  std::vector<double> c_;
};

}  // namespace starwave
