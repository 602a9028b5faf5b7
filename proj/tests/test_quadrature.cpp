#include <cmath>
#include <random>

#include "doctest.h"
#include "starwave/basis.hpp"
#include "starwave/quadrature.hpp"

using namespace starwave;

namespace {

// Independent oracle: int_0^1 x^{b+k} (1-x)^a dx = B(b+k+1, a+1) via lgamma.
double moment(double alpha, double beta, int k) {
  return std::exp(std::lgamma(beta + k + 1.0) + std::lgamma(alpha + 1.0) -
                  std::lgamma(beta + k + alpha + 2.0));
}

}  // namespace

TEST_CASE("one-point rule for N=6 weight sits at the first moment ratio") {
  const QuadratureRule r = gauss_jacobi_rule(1, 2.0, 1.5);
  REQUIRE(r.size() == 1);
  CHECK(r.nodes[0] == doctest::Approx(5.0 / 11.0).epsilon(1e-14));
  CHECK(r.weights[0] == doctest::Approx(16.0 / 315.0).epsilon(1e-14));
  // Cross-check against the Beta-function oracle directly.
  CHECK(r.nodes[0] == doctest::Approx(moment(2.0, 1.5, 1) / moment(2.0, 1.5, 0)).epsilon(1e-14));
}

TEST_CASE("one-point Legendre rule is the midpoint") {
  const QuadratureRule r = gauss_jacobi_rule(1, 0.0, 0.0);
  CHECK(r.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weights sum to the weight integral") {
  for (double alpha : {-0.5, 0.0, 1.25, 2.0, 3.0})
    for (double beta : {-0.5, 0.0, 1.5})
      for (int n : {1, 2, 5, 17, 64}) {
        const QuadratureRule r = gauss_jacobi_rule(n, alpha, beta);
        double s = 0.0;
        for (double w : r.weights) s += w;
        CHECK(s == doctest::Approx(moment(alpha, beta, 0)).epsilon(1e-13));
      }
}

TEST_CASE("monomials of degree <= 2n-1 integrate exactly") {
  for (double alpha : {0.0, 1.25, 2.0, 3.0})
    for (int n : {1, 3, 8, 20}) {
      const QuadratureRule r = gauss_jacobi_rule(n, alpha, 1.5);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        const double exact = moment(alpha, 1.5, k);
        const double got = r.integrate([k](double x) { return std::pow(x, k); });
        CHECK(std::abs(got - exact) < 1e-12 * exact);
      }
    }
}

TEST_CASE("rule invariants: ordered interior nodes, positive weights, interlacing") {
  for (int n = 1; n < 40; ++n) {
    const QuadratureRule a = gauss_jacobi_rule(n, 2.0, 1.5);
    const QuadratureRule b = gauss_jacobi_rule(n + 1, 2.0, 1.5);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.nodes[i] > 0.0);
      CHECK(a.nodes[i] < 1.0);
      CHECK(a.weights[i] > 0.0);
      CHECK(b.nodes[i] < a.nodes[i]);
      CHECK(a.nodes[i] < b.nodes[i + 1]);
    }
  }
}

TEST_CASE("non-integrable weights are rejected") {
  CHECK_THROWS_AS(gauss_jacobi_rule(4, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_jacobi_rule(4, 0.0, -1.5), std::invalid_argument);
  CHECK_THROWS_AS(gauss_jacobi_rule(0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("degree-0 basis element is 1/||1||") {
  const JacobiBasis b = JacobiBasis::for_state_space(6.0, 8);
  const double expected = 1.0 / std::sqrt(16.0 / 315.0);  // 4.43706...
  for (double x : {0.0, 0.3, 0.99}) CHECK(b.eval(0, x) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(4.43706).epsilon(1e-5));
  CHECK_THROWS_AS(b.eval(8, 0.5), std::out_of_range);
  CHECK_THROWS_AS(b.eval(-1, 0.5), std::out_of_range);
}

TEST_CASE("Gram matrix under the rule is the identity") {
  for (double n_param : {4.5, 5.0, 6.0, 8.0}) {
    const Discretization d(n_param, 48);
    const Eigen::MatrixXd g = d.values().transpose() * d.weights().asDiagonal() * d.values();
    CHECK((g - Eigen::MatrixXd::Identity(48, 48)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("analyze/synthesize round trips") {
  const Discretization d(6.0, 16);
  SUBCASE("constant one") {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.nodes());
    const Eigen::VectorXd c = analyze(d.rule(), d.basis(), {ones.data(), static_cast<std::size_t>(ones.size())});
    CHECK(c[0] == doctest::Approx(std::sqrt(16.0 / 315.0)).epsilon(1e-13));
    CHECK(c.tail(15).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("unit coordinates") {
    for (int k = 0; k < 16; ++k) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(16, k);
      Eigen::VectorXd vals(d.nodes());
      for (int q = 0; q < d.nodes(); ++q) vals[q] = synthesize(d.basis(), e, d.x()[q]);
      const Eigen::VectorXd back =
          analyze(d.rule(), d.basis(), {vals.data(), static_cast<std::size_t>(vals.size())});
      CHECK((back - e).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("random polynomial of degree size-1") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      // Monomial coefficients -> values -> coefficients -> values.
      std::vector<double> mono(16);
      for (double& m : mono) m = u(rng);
      Eigen::VectorXd vals(d.nodes());
      for (int q = 0; q < d.nodes(); ++q) {
        double s = 0.0;
        for (int k = 15; k >= 0; --k) s = s * d.x()[q] + mono[static_cast<std::size_t>(k)];
        vals[q] = s;
      }
      const Eigen::VectorXd c = d.project(vals);
      double err = 0.0;
      for (int q = 0; q < d.nodes(); ++q) err = std::max(err, std::abs(synthesize(d.basis(), c, d.x()[q]) - vals[q]));
      CHECK(err < 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    std::vector<double> bad(3, 1.0);
    CHECK_THROWS_AS(analyze(d.rule(), d.basis(), bad), std::invalid_argument);
    CHECK_THROWS_AS(synthesize(d.basis(), Eigen::VectorXd::Zero(3), 0.5), std::invalid_argument);
  }
}

TEST_CASE("basis derivatives agree with central differences") {
  const JacobiBasis b = JacobiBasis::for_state_space(6.0, 12);
  Eigen::MatrixXd d, dp, dm;
  const double x = 0.37, h = 1e-5;
  b.eval_derivatives(x, 2, d);
  b.eval_derivatives(x + h, 0, dp);
  b.eval_derivatives(x - h, 0, dm);
  for (int k = 0; k < 12; ++k) CHECK(d(1, k) == doctest::Approx((dp(0, k) - dm(0, k)) / (2 * h)).epsilon(1e-7));
}
