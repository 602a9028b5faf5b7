#pragma once

#include <vector>

namespace starwave {

/// Polynomial in monomial form, c[0] + c[1] x + ... .
struct Polynomial {
  std::vector<double> c;

  Polynomial() = default;
  Polynomial(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  double operator()(double x) const {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
    return s;
  }

  Polynomial derivative() const {
    if (c.size() <= 1) return Polynomial{};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
    return Polynomial{std::move(d)};
  }

  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const {
    std::vector<double> a(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) a[i + 1] = c[i] / static_cast<double>(i + 1);
    return Polynomial{std::move(a)};
  }

  bool is_zero() const {
    for (double v : c)
      if (v != 0.0) return false;
    return true;
  }
};

}  // namespace starwave
