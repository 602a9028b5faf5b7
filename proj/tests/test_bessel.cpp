#include <cmath>
#include <random>

#include "doctest.h"
#include "starwave/bessel_transform.hpp"
#include "starwave/errors.hpp"

using namespace starwave;

namespace {

// 2 X^{-nu/2} J_nu(4 sqrt X) from the Bessel series in long double.
double bessel_oracle(double n_param, double x) {
  const long double nu = 0.5L * n_param - 1.0L;
  const long double z = 4.0L * std::sqrt(static_cast<long double>(x));
  long double sum = 0.0L;
  for (int k = 0; k < 120; ++k) {
    const long double lg = std::lgamma(static_cast<long double>(k) + 1.0L) +
                           std::lgamma(static_cast<long double>(k) + nu + 1.0L);
    // (z/2)^{2k} / (k! Gamma(k+nu+1)); the X^{-nu/2} (z/2)^nu factor is 2^nu.
    const long double t = std::exp(2.0L * k * std::log(z / 2.0L + 1e-300L) - lg);
    sum += (k % 2 == 0 ? t : -t);
  }
  return static_cast<double>(2.0L * std::pow(2.0L, nu) * sum);
}

}  // namespace

TEST_CASE("kernel against Bessel series") {
  for (double n : {4.5, 5.0, 6.0, 7.0}) {
    for (double x = 0.0; x <= 4.0; x += 0.0625) {
      const double ref = bessel_oracle(n, x);
      CHECK(std::abs(kernel_K(n, x) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("kernel values near zero") {
  CHECK(kernel_K(6.0, 0.0) == doctest::Approx(4.0).epsilon(1e-15));
  const double h = 1e-6;
  CHECK((kernel_K(6.0, h) - 4.0) / h == doctest::Approx(-16.0 / 3.0).epsilon(1e-5));
  const KernelSeries s(6.0);
  CHECK(s.truncation() > 5);
  CHECK_THROWS_AS(s(2.0), std::out_of_range);
  CHECK_THROWS(kernel_K(6.0, -1.0));
}

TEST_CASE("transform diagonalizes minus Delta") {
  std::mt19937_64 rng(7);
  const double n = 6.0;
  for (int trial = 0; trial < 4; ++trial) {
    const SmoothBump b = random_bump(rng);
    std::vector<double> xi;
    for (double v = 0.05; v < 60.0; v *= 1.4) xi.push_back(v);
    const auto fu = forward_F([&](double x) { return b.value(x); }, b.radius, xi, n);
    const auto fd = forward_F([&](double x) { return b.minus_delta(x, n); }, b.radius, xi, n);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (std::abs(fu[i]) <= 1e-8) continue;
      CHECK(std::abs(fd[i] / fu[i] / (4.0 * xi[i]) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("transform is linear") {
  const SmoothBump a{{1.0, 0.2}, 0.7, 2.5}, b{{0.8, -0.1, 0.3}, 0.7, 3.5};
  const std::vector<double> xi{0.3, 2.0, 9.0};
  const auto fa = forward_F([&](double x) { return a.value(x); }, 0.7, xi, 6.0);
  const auto fb = forward_F([&](double x) { return b.value(x); }, 0.7, xi, 6.0);
  const auto fs = forward_F([&](double x) { return 2.0 * a.value(x) - 3.0 * b.value(x); }, 0.7, xi, 6.0);
  for (int i = 0; i < 3; ++i) CHECK(fs[i] == doctest::Approx(2.0 * fa[i] - 3.0 * fb[i]).epsilon(1e-12));
}

TEST_CASE("transform is an involution on bumps") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const SmoothBump b = random_bump(rng);
    const auto r = involution_check([&](double x) { return b.value(x); }, b.radius, 6.0);
    CHECK(r.relative_error < 1e-5);
    CHECK(r.xi_cutoff > 0.0);
  }
}

TEST_CASE("unresolved oscillation is reported") {
  TransformOptions coarse;
  coarse.nodes = 12;
  const SmoothBump b{{1.0}, 5.0 / 6.0, 3.0};
  CHECK_THROWS_AS(forward_F([&](double x) { return b.value(x); }, b.radius, {4000.0}, 6.0, coarse),
                  NumericalError);
}
