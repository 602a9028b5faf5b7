#include <cmath>
#include <random>

#include "doctest.h"
#include "starwave/errors.hpp"
#include "starwave/nonlinear.hpp"
#include "starwave/spectrum.hpp"

using namespace starwave;

namespace {

Eigen::VectorXd shape(const Discretization& d, double amp, double a, double b) {
  const Eigen::ArrayXd x = d.x().array();
  return d.project((amp * (1.0 + a * x + b * x * x * x)).matrix());
}

StatePair random_w(const Discretization& d, std::mt19937_64& rng, double amp, double dt, int steps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::VectorXd y = shape(d, amp, u(rng), u(rng)), v = shape(d, amp, u(rng), u(rng));
  const double f = 1.0 + u(rng);
  StatePair w;
  w.h.dt = w.k.dt = dt;
  for (int s = 0; s <= steps; ++s) {
    const double t = s * dt;
    w.h.slices.push_back(std::sin(f * t) * y);
    w.k.slices.push_back(std::sin(2 * t) * v);
  }
  return w;
}

// First positive eigenpair, sup-normalized.
std::pair<double, Eigen::VectorXd> first_mode(const Discretization& d, const ModelSpec& model) {
  const auto pairs = solve_eigen(d, model.coeffs, 3);
  const EigenPair& p = first_positive(pairs);
  const SupNorm sup(d);
  return {p.lambda, p.phi.coeffs / sup(p.phi.coeffs)};
}

StatePair scaled(const StatePair& a, double c) {
  StatePair out = a;
  for (auto& s : out.h.slices) s *= c;
  for (auto& s : out.k.slices) s *= c;
  return out;
}

}  // namespace

TEST_CASE("residual vanishes at rest") {
  const Discretization d(6.0, 16);
  const ModelSpec model = default_model(6.0);
  const BackgroundPair bg = zero_background(d, 0.01, 10);
  CHECK(residual_norm(residual_P(d, model, bg.pair, bg)) == 0.0);
  const NewtonResult nr = newton_solve(d, model, bg, {});
  CHECK(nr.trace.iterations == 0);
  CHECK(SupNorm(d)(nr.w.h) == 0.0);
}

TEST_CASE("split residual equals the residual of the full state") {
  const Discretization d(6.0, 20);
  std::mt19937_64 rng(7);
  for (const ModelSpec& model : {default_model(6.0), variant_model_zJ(6.0)}) {
    const double dt = 0.01;
    BackgroundPair bg;
    bg.pair = random_w(d, rng, 0.01, dt, 20);
    const StatePair w = random_w(d, rng, 0.005, dt, 20);
    const StatePair a = residual_P(d, model, w, bg);
    const StatePair b = full_residual(d, model, add_states(bg.pair, w));
    StatePair diff = add_states(a, scaled(b, -1.0));
    CHECK(residual_norm(diff) < 1e-12 * residual_norm(b));
  }
}

TEST_CASE("linearized periodic seed leaves a quadratic residual") {
  const Discretization d(6.0, 24);
  const ModelSpec model = default_model(6.0);
  const auto [lambda, phi] = first_mode(d, model);
  CHECK(lambda == doctest::Approx(5.5).epsilon(1e-10));
  const BackgroundPair zero = zero_background(d, 1.0 / 400, 400);
  double prev = 0.0;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    const BackgroundPair bg = periodic_background(d, model, phi, lambda, eps, 0.3, 1.0 / 400, 400);
    const double r = residual_norm(residual_P(d, model, zero.pair, bg));
    if (prev > 0.0) CHECK(prev / r == doctest::Approx(4.0).epsilon(0.05));
    prev = r;
  }
}

TEST_CASE("residual is Frechet differentiable with derivative DP") {
  const Discretization d(6.0, 20);
  const ModelSpec model = variant_model_zJ(6.0);
  std::mt19937_64 rng(11);
  const double dt = 0.02;
  const int steps = 10;
  BackgroundPair bg;
  bg.pair = random_w(d, rng, 0.01, dt, steps);
  const StatePair dir = random_w(d, rng, 1.0, dt, steps);
  const StatePair zero = zero_background(d, dt, steps).pair;
  const StatePair r0 = residual_P(d, model, zero, bg);
  const int m = d.size();
  double prev = 0.0;
  for (double h : {1e-3, 5e-4, 2.5e-4}) {
    const StatePair w = scaled(dir, h);
    const StatePair r = residual_P(d, model, w, bg);
    double mismatch = 0.0;
    for (int s = 0; s < steps; ++s) {
      const auto [y, v] = midpoint_background(bg.pair, s);
      Eigen::VectorXd u0(2 * m), u1(2 * m);
      u0 << w.h.slices[s], w.k.slices[s];
      u1 << w.h.slices[s + 1], w.k.slices[s + 1];
      const Eigen::VectorXd lin = (u1 - u0) / dt + assemble_DP(d, model, y, v).block() * (0.5 * (u0 + u1));
      Eigen::VectorXd dr(2 * m);
      dr << r.h.slices[s] - r0.h.slices[s], r.k.slices[s] - r0.k.slices[s];
      mismatch = std::max(mismatch, (dr - lin).norm());
    }
    if (prev > 0.0) CHECK(prev / mismatch == doctest::Approx(4.0).epsilon(0.1));
    prev = mismatch;
  }
}

TEST_CASE("nonlinear evolution") {
  const Discretization d(6.0, 24);
  const ModelSpec model = default_model(6.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(d.size());
  EvolveOptions opts;
  opts.dt = 1.0 / 400;
  opts.steps = 400;
  const SupNorm sup(d);

  SUBCASE("zero data stays zero") {
    const StatePair u = evolve_nonlinear(d, model, z, z, opts);
    CHECK(sup(u.h) == 0.0);
    CHECK(sup(u.k) == 0.0);
  }
  SUBCASE("small eigenmode data follows the linear oscillation") {
    const auto [lambda, phi] = first_mode(d, model);
    std::vector<double> ratio;
    for (double eps : {1e-3, 5e-4}) {
      const StatePair u = evolve_nonlinear(d, model, eps * phi, z, opts);
      double err = 0.0;
      for (int s = 0; s <= opts.steps; ++s)
        err = std::max(err, sup(Eigen::VectorXd(u.h.slices[s] - eps * std::cos(std::sqrt(lambda) * s * opts.dt) * phi)));
      ratio.push_back(err / (eps * eps));
    }
    CHECK(ratio[0] == doctest::Approx(ratio[1]).epsilon(0.05));
  }
  SUBCASE("second order in time") {
    const Eigen::VectorXd y0 = shape(d, 0.01, -0.5, 0.3), v0 = shape(d, 0.01, 0.2, -0.4);
    auto run = [&](int steps) {
      EvolveOptions o = opts;
      o.steps = steps;
      o.dt = 0.5 / steps;
      const StatePair u = evolve_nonlinear(d, model, y0, v0, o);
      return Eigen::VectorXd(u.h.slices.back());
    };
    const Eigen::VectorXd ref = run(1600);
    const double e1 = sup(Eigen::VectorXd(run(100) - ref)), e2 = sup(Eigen::VectorXd(run(200) - ref));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("leaving the U-box reports the time") {
    const Eigen::VectorXd big = shape(d, 0.2, 0.0, 0.0);
    try {
      evolve_nonlinear(d, model, big, z, opts);
      FAIL("expected a U-box exit");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
  }
}

TEST_CASE("Newton iteration on the periodic seed") {
  const Discretization d(6.0, 24);
  const ModelSpec model = default_model(6.0);
  const auto [lambda, phi] = first_mode(d, model);
  const int steps = 400;
  const double dt = 1.0 / steps;
  const SupNorm sup(d);
  std::vector<double> c;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    const BackgroundPair bg = periodic_background(d, model, phi, lambda, eps, 0.0, dt, steps);
    const NewtonResult nr = newton_solve(d, model, bg, {});
    const auto& r = nr.trace.residual;
    CHECK(r.back() < 1e-10);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] <= r[i - 1]);
    CHECK(sup(nr.w.h.slices[0]) == 0.0);
    CHECK(residual_norm(full_residual(d, model, add_states(bg.pair, nr.w))) < 1e-9);
    c.push_back(sup(nr.w.h) / (eps * eps));
    if (eps == 1e-2) {
      REQUIRE(r.size() >= 3);
      CHECK(r[2] / r[1] < r[1] / r[0]);
    }
  }
  CHECK(c[0] / c[2] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("truncated updates reach the same solution") {
  const Discretization d(6.0, 24);
  const ModelSpec model = default_model(6.0);
  const auto [lambda, phi] = first_mode(d, model);
  const BackgroundPair bg = periodic_background(d, model, phi, lambda, 1e-2, 0.4, 1.0 / 400, 400);
  const NewtonResult plain = newton_solve(d, model, bg, {});
  NewtonOptions o;
  o.nash_moser = true;
  o.theta0 = 2.0;
  o.rho = 2.0;
  const NewtonResult nm = newton_solve(d, model, bg, o);
  CHECK(nm.trace.theta.front() == 2.0);
  CHECK(nm.trace.theta.size() > 1);
  CHECK(nm.trace.theta[1] == 4.0);
  const SupNorm sup(d);
  const StatePair diff = add_states(nm.w, scaled(plain.w, -1.0));
  CHECK(sup(diff.h) < 1e-8 * sup(plain.w.h));
}

TEST_CASE("periodic and Cauchy drivers") {
  const Discretization d(6.0, 24);
  const ModelSpec model = default_model(6.0);
  SUBCASE("zero amplitude") {
    PeriodicSetup s;
    s.steps = 100;
    const PeriodicResult r = periodic_experiment(d, model, s, {0.0}, {});
    CHECK(r.rows[0].error_y == 0.0);
    CHECK(r.lambda == doctest::Approx(5.5));
  }
  SUBCASE("Cauchy problem: Newton and direct routes agree") {
    const Eigen::VectorXd psi0 = shape(d, 1e-3, -1.0, 0.5), psi1 = shape(d, 1e-3, 0.5, 1.0);
    const CauchyResult r = cauchy_solve(d, model, psi0, psi1, 1.0, 400, {});
    CHECK(r.initial_defect == 0.0);
    CHECK(r.discrepancy < 1e-6);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(d.size());
    const CauchyResult r0 = cauchy_solve(d, model, z, z, 0.1, 50, {});
    CHECK(SupNorm(d)(r0.newton.h) == 0.0);
    CHECK(r0.discrepancy == 0.0);
  }
  SUBCASE("slope fit") {
    CHECK(loglog_slope({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0));
  }
}
