#include <cmath>
#include <random>

#include "doctest.h"
#include "starwave/errors.hpp"
#include "starwave/norms.hpp"

using namespace starwave;

namespace {

Eigen::VectorXd coeffs_of(const Discretization& d, const std::function<double(double)>& f) {
  Eigen::VectorXd v(d.nodes());
  for (int i = 0; i < d.nodes(); ++i) v[i] = f(d.x()[i]);
  return d.project(v);
}

TimeField static_field(const Discretization& d, const std::function<double(double)>& f) {
  return TimeField{0.0, {coeffs_of(d, f)}};
}

TimeField separable(const Discretization& d, const std::function<double(double)>& f,
                    const std::function<double(double)>& g, double dt, int steps) {
  const Eigen::VectorXd c = coeffs_of(d, f);
  TimeField u{dt, {}};
  for (int s = 0; s <= steps; ++s) u.slices.push_back(g(s * dt) * c);
  return u;
}

// Random field: degree <= 6 in x, a few time harmonics on [0, 2 pi].
TimeField random_band_limited(const Discretization& d, std::mt19937_64& rng, int steps) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double dt = 2.0 * std::acos(-1.0) / steps;
  Eigen::MatrixXd a(3, 7), b(3, 7);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 7; ++k) {
      a(i, k) = g(rng);
      b(i, k) = g(rng);
    }
  TimeField u{dt, {}};
  for (int s = 0; s <= steps; ++s) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d.size());
    for (int i = 0; i < 3; ++i) c.head(7) += a.row(i).transpose() * std::cos(i * s * dt) + b.row(i).transpose() * std::sin(i * s * dt);
    u.slices.push_back(c);
  }
  return u;
}

}  // namespace

TEST_CASE("jet arithmetic") {
  const Jet x = Jet::variable(0.5, 6);
  const Jet e = exp(x);
  for (int i = 0; i <= 6; ++i) CHECK(e.derivative(i) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  const Jet r = sqrt(x);
  CHECK(r.derivative(1) == doctest::Approx(0.5 / std::sqrt(0.5)));
  CHECK(r.derivative(2) == doctest::Approx(-0.25 * std::pow(0.5, -1.5)));
  const Jet q = Jet::constant(1.0, 6) / x;
  CHECK(q.derivative(3) == doctest::Approx(-6.0 / std::pow(0.5, 4)));
  CHECK((r * r - x).coeffs()[4] == doctest::Approx(0.0));
}

TEST_CASE("cutoff plateaus and smoothness") {
  CHECK(omega(0.0) == 1.0);
  CHECK(omega(1.0 / 3.0) == 1.0);
  CHECK(omega(2.0 / 3.0) == 0.0);
  CHECK(omega(0.9) == 0.0);
  CHECK(omega(0.5) == doctest::Approx(0.5));
  for (double x = 0.36; x < 0.645; x += 0.01) {
    CHECK(omega(x) > 0.0);
    CHECK(omega(x) < 1.0);
  }
  // one-sided derivatives vanish near the junctions
  const Jet j0 = omega_jet(1.0 / 3.0 + 1e-3, 6), j1 = omega_jet(2.0 / 3.0 - 1e-3, 6);
  for (int i = 1; i <= 6; ++i) {
    CHECK(std::abs(j0.derivative(i)) < 1e-100);
    CHECK(std::abs(j1.derivative(i)) < 1e-100);
  }
  const double h = 1e-5, x = 0.47;
  const Jet jm = omega_jet(x, 2);
  CHECK(jm.derivative(1) == doctest::Approx((omega(x + h) - omega(x - h)) / (2 * h)).epsilon(1e-7));
  CHECK(jm.derivative(2) == doctest::Approx((omega(x + h) - 2 * omega(x) + omega(x - h)) / (h * h)).epsilon(1e-4));
}

TEST_CASE("cutoff split") {
  const Discretization d(6.0, 16);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(d.nodes());
  const auto [u0, u1] = cutoff_split(d, one);
  for (int i = 0; i < d.nodes(); ++i) {
    const double x = d.x()[i];
    if (x < 1.0 / 3.0) {
      CHECK(u0[i] == 1.0);
      CHECK(u1[i] == 0.0);
    }
    if (x > 2.0 / 3.0) {
      CHECK(u0[i] == 0.0);
      CHECK(u1[i] == 1.0);
    }
  }
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXd u(d.nodes());
  for (auto& v : u) v = g(rng);
  const auto [a, b] = cutoff_split(d, u);
  for (int i = 0; i < d.nodes(); ++i) CHECK(std::abs(a[i] + b[i] - u[i]) <= 1e-16 * std::abs(u[i]));
}

TEST_CASE("weighted norms and brackets of simple functions") {
  const Discretization d(6.0, 16);
  const NormEvaluator ev(d);
  Eigen::VectorXd one = Eigen::VectorXd::Zero(d.size());
  one[0] = d.basis().norm_of_one();
  CHECK(ev.bracket(0, 0, one) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
  CHECK(ev.bracket(1, 0, one) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  for (int mu = 0; mu < 2; ++mu)
    for (int ell = 1; ell <= 5; ++ell) CHECK(std::abs(ev.bracket(mu, ell, one)) < 1e-11);
  // Delta_[0] x^2 = 7x,  Ddot_[0] x = sqrt(x),  Delta_[1] X^2 = (N+2) X
  const Eigen::VectorXd x2 = coeffs_of(d, [](double x) { return x * x; });
  const Eigen::VectorXd x1 = coeffs_of(d, [](double x) { return x; });
  const Eigen::VectorXd X2 = coeffs_of(d, [](double x) { return (1 - x) * (1 - x); });
  CHECK(ev.bracket(0, 2, x2) == doctest::Approx(7.0 * std::sqrt(2.0 / 9.0)).epsilon(1e-11));
  CHECK(ev.bracket(0, 1, x1) == doctest::Approx(std::sqrt(2.0 / 7.0)).epsilon(1e-11));
  CHECK(ev.bracket(1, 2, X2) == doctest::Approx(8.0 * std::sqrt(0.2)).epsilon(1e-11));
  CHECK(ev.weighted_norm(0, [](double) { return 1.0; }) == doctest::Approx(std::sqrt(0.4)));
}

TEST_CASE("time derivatives in the graded norms") {
  CHECK(fd_weights(1.0, {0.0, 1.0, 2.0}, 2).row(2).isApprox(Eigen::RowVector3d(1.0, -2.0, 1.0)));
  const Discretization d(6.0, 12);
  const NormEvaluator ev(d);
  const int steps = 600;
  const double dt = 0.01;
  const TimeField u = separable(d, [](double) { return 1.0; }, [](double t) { return std::cos(t); }, dt, steps);
  CHECK(ev.inf_n(0, u, 2, Piece::whole) == doctest::Approx(1.0).epsilon(1e-6));
  const double T = steps * dt;
  const double c2 = T / 2 + std::sin(2 * T) / 4;
  // (j,k) = (0,0), (1,0) contribute 2/5 int cos^2; (0,1) vanishes
  CHECK(ev.two_n(0, u, 1, Piece::whole) == doctest::Approx(std::sqrt(2 * 0.4 * c2)).epsilon(1e-4));
  TimeField short_u = u;
  short_u.slices.resize(5);
  CHECK_THROWS_AS(ev.inf_n(0, short_u, 3, Piece::whole), NumericalError);
}

TEST_CASE("graded report is monotone and non-negative") {
  const Discretization d(6.0, 12);
  const NormEvaluator ev(d);
  std::mt19937_64 rng(5);
  const TimeField u = random_band_limited(d, rng, 120);
  const GradedNormReport rep = ev.report(u, 2);
  for (const auto& e : rep.table) {
    CHECK(e.sup_value >= 0.0);
    CHECK(e.l2_value >= 0.0);
  }
  for (std::size_t n = 1; n < rep.inf.size(); ++n) {
    CHECK(rep.inf[n] >= rep.inf[n - 1]);
    CHECK(rep.two[n] >= rep.two[n - 1]);
  }
  CHECK(rep.inf[2] == doctest::Approx(ev.inf_n(u, 2)));
  CHECK(rep.two[2] == doctest::Approx(ev.two_n(u, 2)));
}

TEST_CASE("graded norm equivalence ratios stay bounded") {
  const Discretization d(6.0, 12);
  NormOptions o;
  o.aux_points = 50;
  const NormEvaluator ev(d, o);
  std::mt19937_64 rng(17);
  std::vector<double> r1, r2, r3;
  for (int trial = 0; trial < 50; ++trial) {
    const TimeField u = random_band_limited(d, rng, 96);
    r1.push_back(ev.two_n(u, 1) / ev.inf_n(u, 1));
    r2.push_back(ev.inf_n(u, 0) / ev.two_n(u, 3));
    PairField h{u, u};
    for (auto& s : h.k.slices) s *= 0.5;
    r3.push_back(ev.pointwise_n(h, 2) / ev.pair_inf_n(h, 1));
  }
  for (const auto* r : {&r1, &r2, &r3}) {
    const double lo_all = *std::min_element(r->begin(), r->end());
    const double hi_all = *std::max_element(r->begin(), r->end());
    const double lo_half = *std::min_element(r->begin(), r->begin() + 25);
    const double hi_half = *std::max_element(r->begin(), r->begin() + 25);
    CHECK(lo_all > 0.0);
    CHECK(std::isfinite(hi_all / lo_all));
    // doubling the sample widens the range only mildly
    CHECK((hi_all / lo_all) < 4.0 * (hi_half / lo_half));
  }
}

TEST_CASE("pair grades") {
  const Discretization d(6.0, 12);
  const NormEvaluator ev(d);
  const Eigen::VectorXd one = coeffs_of(d, [](double) { return 1.0; });
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.size());
  // h = 0, k = 1: ||h||_0 = <k^[0]>_0 and <k^[1]>_0 combined
  const PairField p{{0.0, {zero}}, {0.0, {one}}};
  const double expect = std::sqrt(std::pow(ev.bracket(0, 0, one, Piece::inner), 2) +
                                  std::pow(ev.bracket(1, 0, one, Piece::outer), 2));
  CHECK(ev.pair_k(p, 0, 0) == doctest::Approx(expect));
  CHECK(ev.pair_sup_n(p, 0, 1.0) == doctest::Approx(expect));
  CHECK(ev.pair_int_n(p, 0) == doctest::Approx(expect));
  CHECK(ev.pointwise_n(p, 0) == doctest::Approx(1.0));
  CHECK(ev.pair_k(p, 0, 2) >= ev.pair_k(p, 0, 1));
}

TEST_CASE("support bound between the two Laplacians") {
  // u = p(x) psi(x) with psi supported in [1/6, 5/6]
  const double n_param = 6.0;
  auto jet_u = [](double x0, int order) {
    const Jet a = omega_jet(x0 - 1.0 / 6.0, order);
    const Jet b = Jet::constant(1.0, order) - omega_jet(x0 + 1.0 / 6.0, order);
    const Jet x = Jet::variable(x0, order);
    return a * b * (1.0 + x * x);
  };
  auto delta = [&](int mu, const Jet& f, double x0) {
    const Jet d1 = f.diff(), d2 = d1.diff();
    const Jet x = Jet::variable(x0, d2.order());
    if (mu == 0) return x * d2 + 2.5 * d1.truncated(d2.order());
    return (Jet::constant(1.0, d2.order()) - x) * d2 + (-0.5 * n_param) * d1.truncated(d2.order());
  };
  const int m = 3;
  for (int mu = 0; mu < 2; ++mu) {
    std::vector<double> sup(m + 1, 0.0), other(m + 1, 0.0);
    for (int i = 1; i < 400; ++i) {
      const double x0 = i / 400.0;
      Jet a = jet_u(x0, 2 * m), b = a;
      for (int k = 0; k <= m; ++k) {
        sup[k] = std::max(sup[k], std::abs(a.value()));
        other[k] = std::max(other[k], std::abs(b.value()));
        if (k < m) {
          a = delta(mu, a, x0);
          b = delta(1 - mu, b, x0);
        }
      }
    }
    double rhs = 0.0;
    for (int k = 0; k <= m; ++k) rhs += other[k];
    CHECK(sup[m] / rhs < 10.0);
    CHECK(sup[m] > 0.0);
  }
}
