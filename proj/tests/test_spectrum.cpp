#include <cmath>
#include <numbers>

#include "doctest.h"
#include "starwave/errors.hpp"
#include "starwave/spectrum.hpp"

using namespace starwave;

TEST_CASE("Jacobi eigenvalues without lower-order terms") {
  const Discretization d(6.0, 64);
  CoefficientFns c;
  const auto pairs = solve_eigen(d, c, 11);
  for (int n = 0; n < 11; ++n) {
    CHECK(pairs[n].index == n + 1);
    CHECK(pairs[n].galerkin_index == n);
    CHECK(std::abs(pairs[n].lambda - n * (n + 4.5)) < 1e-8);
  }
  CHECK(pairs[1].lambda == doctest::Approx(5.5));
  CHECK(pairs[3].lambda == doctest::Approx(22.5));
  c.L0 = Polynomial{{1.0}};
  const auto shifted = solve_eigen(d, c, 4);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(shifted[n].lambda - (n * (n + 4.5) + 1.0)) < 1e-8);
}

TEST_CASE("resolution guard and B0") {
  const Discretization d(6.0, 16);
  CoefficientFns c;
  CHECK_THROWS_AS(solve_eigen(d, c, 5), std::invalid_argument);
  c.n_param = 4.0;
  CHECK_THROWS_AS(solve_eigen(d, c, 2), std::invalid_argument);
}

TEST_CASE("eigenpairs with variable coefficients") {
  CoefficientFns c;
  c.ell1 = Polynomial{{0.4, -0.3}};
  c.L0 = Polynomial{{0.5, 1.0}};
  const Discretization d64(6.0, 64), d96(6.0, 96);
  const auto p64 = solve_eigen(d64, c, 12);
  const auto p96 = solve_eigen(d96, c, 12);
  for (int n = 0; n < 8; ++n) CHECK(std::abs(p64[n].lambda - p96[n].lambda) < 1e-7);
  for (int n = 0; n < 12; ++n) {
    if (n > 0) CHECK(p64[n].lambda > p64[n - 1].lambda);
    CHECK(p64[n].residual < 1e-6);
    // Rayleigh quotient from the M-weighted form.
    const Eigen::MatrixXd s = weighted_L_form(d64, c);
    const Eigen::VectorXd& v = p64[n].phi.coeffs;
    const double rq = v.dot(s * v) / weighted_inner(d64, c, v, v);
    CHECK(std::abs(rq - p64[n].lambda) < 1e-8 * std::max(1.0, p64[n].lambda));
    for (int m = 0; m < n; ++m)
      CHECK(std::abs(weighted_inner(d64, c, p64[m].phi.coeffs, v)) < 1e-8);
  }
}

TEST_CASE("Liouville variable and potential asymptotics") {
  CHECK(liouville_xi(0.5) == 0.0);
  CHECK(liouville_xi(0.0) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(liouville_xi(1.0) == doctest::Approx(std::numbers::pi / 2));
  CoefficientFns c;
  c.n_param = 6.0;
  const double half_pi = std::numbers::pi / 2;
  double prev0 = 0.0, prev1 = 0.0;
  for (int e = 2; e <= 6; ++e) {
    const double x = std::pow(10.0, -e);
    const double left = std::pow(liouville_xi(x) + half_pi, 2) * liouville_potential(c, x);
    const double right = std::pow(half_pi - liouville_xi(1.0 - x), 2) * liouville_potential(c, 1.0 - x);
    if (e == 6) {
      CHECK(std::abs(left - 2.0) < 0.02);
      CHECK(std::abs(right - 3.75) < 0.0375);
    }
    if (e > 2) {
      CHECK(std::abs(left - 2.0) <= std::abs(prev0 - 2.0));
      CHECK(std::abs(right - 3.75) <= std::abs(prev1 - 3.75));
    }
    prev0 = left;
    prev1 = right;
  }
  CHECK_THROWS_AS(liouville_potential(c, 0.0), std::domain_error);
  CHECK_THROWS_AS(liouville_potential(c, 1.0), std::domain_error);
}

TEST_CASE("M is positive and the symbol ratio a/b is x(1-x)") {
  CoefficientFns c;
  c.ell1 = Polynomial{{1.0, -2.0}};
  for (double x : {0.01, 0.3, 0.9}) {
    const SymbolFunctions s = symbol_functions(c, x);
    CHECK(s.m > 0.0);
    CHECK(s.a / s.b == doctest::Approx(x * (1 - x)));
  }
}

TEST_CASE("boundary constants of eigenfunctions") {
  const Discretization d(6.0, 64);
  CoefficientFns c;
  const auto pairs = solve_eigen(d, c, 4);
  const BoundaryConstants b0 = boundary_constants(d, pairs[0]);
  CHECK(b0.c0 == doctest::Approx(b0.c1));
  CHECK(b0.c0 == doctest::Approx(1.0 / std::sqrt(16.0 / 315.0)));
  const BoundaryConstants b1 = boundary_constants(d, pairs[1]);
  CHECK(std::abs(b1.c0) > 1e-8);
  CHECK(std::abs(b1.c1) > 1e-8);
  // |Phi(x) - C0| / x stays bounded near 0.
  double prev = -1.0;
  for (double x : {1e-2, 1e-3, 1e-4}) {
    const double r = std::abs(synthesize(d.basis(), pairs[1].phi.coeffs, x) - b1.c0) / x;
    if (prev > 0) CHECK(r < 2.0 * prev);
    CHECK(std::abs(r - std::abs(b1.slope0)) < 0.05 * std::abs(b1.slope0) + 1e-6);
    prev = r;
  }
}
