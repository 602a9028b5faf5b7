#include "starwave/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starwave/errors.hpp"
#include "starwave/operators.hpp"

namespace starwave {

namespace {

Eigen::ArrayXd xx_of(const Discretization& disc) {
  return disc.x().array() * (1.0 - disc.x().array());
}

Eigen::ArrayXd drift_of(const Discretization& disc) {
  return 2.5 * (1.0 - disc.x().array()) - 0.5 * disc.n_param() * disc.x().array();
}

Eigen::VectorXd poly_at_nodes(const Discretization& disc, const Polynomial& p) {
  Eigen::VectorXd out(disc.nodes());
  for (int i = 0; i < disc.nodes(); ++i) out[i] = p(disc.x()[i]);
  return out;
}

Eigen::MatrixXd diag_times(const Eigen::VectorXd& d, const Eigen::MatrixXd& m) { return d.asDiagonal() * m; }

}  // namespace

NodalState nodal_state(const Discretization& disc, const CoefficientFns& coeffs, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& v) {
  if (y.size() != disc.size() || v.size() != disc.size())
    throw std::invalid_argument("nodal_state: coefficient vectors must match the basis size");
  NodalState s;
  const Eigen::ArrayXd x = disc.x().array();
  const Eigen::ArrayXd dy = (disc.d1() * y).array();
  const Eigen::ArrayXd d2y = (disc.d2() * y).array();
  s.y = disc.values() * y;
  s.v = disc.values() * v;
  s.z = (x * dy).matrix();
  s.w = (x * (disc.d1() * v).array()).matrix();
  const Eigen::ArrayXd xx = x * (1.0 - x);
  const Eigen::ArrayXd l1 = poly_at_nodes(disc, coeffs.ell1).array();
  const Eigen::ArrayXd l0 = poly_at_nodes(disc, coeffs.L0).array();
  s.Ly = (-(xx * d2y) - drift_of(disc) * dy + l1 * xx * dy + l0 * s.y.array()).matrix();
  return s;
}

void require_in_box(const Discretization& disc, const NodalState& s, double radius) {
  for (int i = 0; i < disc.nodes(); ++i) {
    const double m = std::max({std::abs(s.y[i]), std::abs(s.z[i]), std::abs(s.v[i]), std::abs(s.w[i])});
    if (!(m < radius))
      throw NumericalError("state exits the U-box (|.| = " + std::to_string(m) + " >= " +
                           std::to_string(radius) + ") at x=" + std::to_string(disc.x()[i]));
  }
}

CoefficientFields coefficient_fields(const Discretization& disc, const ModelSpec& model, const NodalState& s) {
  const int q = disc.nodes();
  CoefficientFields f;
  for (Eigen::VectorXd* v : {&f.J, &f.H1, &f.q, &f.a01, &f.a00, &f.a11, &f.a10, &f.a21, &f.a20, &f.b1, &f.b0})
    v->resize(q);
  for (int i = 0; i < q; ++i) {
    const double x = disc.x()[i];
    const double xs = 1.0 - x;
    const JEval j = model.J(x, s.y[i], s.z[i]);
    const H1Eval h1 = model.H1(x, s.y[i], s.z[i], s.v[i]);
    const H2Eval h2 = model.H2(x, s.y[i], s.z[i], s.v[i], s.w[i]);
    const double ly = s.Ly[i];
    f.J[i] = j.value;
    f.H1[i] = h1.value;
    f.q[i] = h1.value / j.value;
    f.a01[i] = -j.dz * s.v[i] / xs;
    f.a00[i] = -j.dy * s.v[i];
    f.a11[i] = (h1.dz * ly + h2.dz) / xs;
    f.a10[i] = h1.dy * ly + h2.dy;
    f.a21[i] = h2.dw / xs;
    f.a20[i] = h1.dv * ly + h2.dv;
    f.b1[i] = h1.value * model.coeffs.ell1(x) + f.a11[i];
    f.b0[i] = h1.value * model.coeffs.L0(x) + f.a10[i];
  }
  return f;
}

Eigen::MatrixXd LinearizedOperator::block() const {
  const Eigen::Index m = a1.rows();
  Eigen::MatrixXd b(2 * m, 2 * m);
  b << a1, negJ, A, a2;
  return b;
}

LinearizedOperator assemble_DP(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& v) {
  const NodalState s = nodal_state(disc, model.coeffs, y, v);
  require_in_box(disc, s, model.U_radius);
  LinearizedOperator op;
  op.fields = coefficient_fields(disc, model, s);
  const CoefficientFields& f = op.fields;
  const Eigen::MatrixXd chk = check_d_at_nodes(disc);
  const Eigen::MatrixXd lam = lambda_at_nodes(disc);
  const Eigen::MatrixXd& V = disc.values();
  op.a1 = disc.galerkin(diag_times(f.a01, chk) + diag_times(f.a00, V));
  op.a2 = disc.galerkin(diag_times(f.a21, chk) + diag_times(f.a20, V));
  op.negJ = -disc.galerkin(diag_times(f.J, V));
  op.A = disc.galerkin(-diag_times(f.H1, lam) + diag_times(f.b1, chk) + diag_times(f.b0, V));
  return op;
}

Eigen::VectorXd nonlinear_rhs(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& v) {
  const NodalState s = nodal_state(disc, model.coeffs, y, v);
  require_in_box(disc, s, model.U_radius);
  const int q = disc.nodes();
  Eigen::VectorXd f1(q), f2(q);
  for (int i = 0; i < q; ++i) {
    const double x = disc.x()[i];
    const double j = model.J(x, s.y[i], s.z[i]).value;
    const double h1 = model.H1(x, s.y[i], s.z[i], s.v[i]).value;
    const double h2 = model.H2(x, s.y[i], s.z[i], s.v[i], s.w[i]).value;
    f1[i] = -j * s.v[i];
    f2[i] = h1 * s.Ly[i] + h2;
  }
  Eigen::VectorXd out(2 * disc.size());
  out << disc.project(f1), disc.project(f2);
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> midpoint_background(const StatePair& background, int step) {
  const auto& ys = background.h.slices;
  const auto& vs = background.k.slices;
  if (ys.empty() || ys.size() != vs.size()) throw std::invalid_argument("background: inconsistent slices");
  if (ys.size() == 1) return {ys[0], vs[0]};
  if (step + 1 >= static_cast<int>(ys.size())) throw std::out_of_range("background: too few time slices");
  return {0.5 * (ys[step] + ys[step + 1]), 0.5 * (vs[step] + vs[step + 1])};
}

std::vector<Eigen::VectorXd> midpoint_integrate(const std::function<Eigen::MatrixXd(int)>& op,
                                                bool constant_operator, const ForcingFn& forcing,
                                                const Eigen::VectorXd& u0, double dt, int steps) {
  if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("midpoint_integrate: bad time grid");
  const Eigen::Index n = u0.size();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(u0);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd minus;
  for (int s = 0; s < steps; ++s) {
    if (s == 0 || !constant_operator) {
      const Eigen::MatrixXd b = op(s);
      if (b.rows() != n || b.cols() != n) throw std::invalid_argument("midpoint_integrate: operator size");
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      lu.compute(eye + 0.5 * dt * b);
      minus = eye - 0.5 * dt * b;
    }
    Eigen::VectorXd rhs = minus * out.back();
    if (forcing) rhs += dt * forcing(s, (s + 0.5) * dt);
    Eigen::VectorXd next = lu.solve(rhs);
    if (!next.allFinite()) throw NumericalError("midpoint step " + std::to_string(s) + ": linear solve failed");
    out.push_back(std::move(next));
  }
  return out;
}

double max_frequency(const Discretization& disc, const CoefficientFields& f) {
  const double m = disc.size() - 1;
  const double lam = m * (m + 0.5 * (disc.n_param() + 3.0));
  return std::sqrt(lam * (f.H1.array() * f.J.array()).abs().maxCoeff());
}

namespace {

StatePair split_series(const std::vector<Eigen::VectorXd>& us, Eigen::Index m, double dt) {
  StatePair p;
  p.h.dt = p.k.dt = dt;
  for (const auto& u : us) {
    p.h.slices.push_back(u.head(m));
    p.k.slices.push_back(u.tail(m));
  }
  return p;
}

void check_background(const StatePair& bg, int steps) {
  const std::size_t n = bg.h.slices.size();
  if (n != 1 && n != static_cast<std::size_t>(steps) + 1)
    throw std::invalid_argument("background must have 1 or steps+1 slices");
}

}  // namespace

StatePair solve_linear_ivp(const Discretization& disc, const ModelSpec& model, const StatePair& background,
                           const ForcingFn& forcing, const Eigen::VectorXd& u0, const IvpOptions& opts) {
  check_background(background, opts.steps);
  const int m = disc.size();
  if (u0.size() != 2 * m) throw std::invalid_argument("solve_linear_ivp: initial state size");
  auto op = [&](int s) {
    const auto [y, v] = midpoint_background(background, s);
    const LinearizedOperator lin = assemble_DP(disc, model, y, v);
    const double nu = max_frequency(disc, lin.fields);
    if (opts.dt * nu >= opts.cfl)
      throw NumericalError("time step too large: dt sqrt(lambda_max) = " + std::to_string(opts.dt * nu) +
                           " >= " + std::to_string(opts.cfl));
    return lin.block();
  };
  const auto us = midpoint_integrate(op, background.h.slices.size() == 1, forcing, u0, opts.dt, opts.steps);
  return split_series(us, m, opts.dt);
}

double h_norm(const Discretization& disc, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) {
  const Eigen::ArrayXd w = disc.weights().array();
  const Eigen::ArrayXd p = (disc.values() * phi).array();
  const Eigen::ArrayXd dp = (disc.d1() * phi).array();
  const Eigen::ArrayXd s = (disc.values() * psi).array();
  return std::sqrt((w * (p * p + xx_of(disc) * dp * dp + s * s)).sum());
}

EnergyReport energy_audit(const Discretization& disc, const ModelSpec& model, const StatePair& background,
                          const StatePair& solution, const ForcingFn& forcing) {
  const int steps = static_cast<int>(solution.h.slices.size()) - 1;
  check_background(background, steps);
  const double dt = solution.h.dt;
  const int m = disc.size();
  const Eigen::ArrayXd w = disc.weights().array();
  const Eigen::ArrayXd x = disc.x().array();
  const Eigen::ArrayXd xx = xx_of(disc);
  const Eigen::ArrayXd s = xx.sqrt();
  const Eigen::ArrayXd gamma = drift_of(disc);
  const double n_param = disc.n_param();
  const bool fixed = background.h.slices.size() == 1;

  auto fields_at = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& v) {
    return coefficient_fields(disc, model, nodal_state(disc, model.coeffs, y, v));
  };
  auto deriv = [&](const Eigen::VectorXd& f) { return disc.nodal_derivative(f).array().eval(); };

  std::vector<Eigen::ArrayXd> q_node;
  for (std::size_t i = 0; i < background.h.slices.size(); ++i)
    q_node.push_back(fields_at(background.h.slices[i], background.k.slices[i]).q.array());
  auto q_at = [&](int n) -> const Eigen::ArrayXd& { return q_node[fixed ? 0 : n]; };

  EnergyReport rep;
  for (int n = 0; n <= steps; ++n) {
    const Eigen::ArrayXd k = (disc.values() * solution.k.slices[n]).array();
    const Eigen::ArrayXd dh = (disc.d1() * solution.h.slices[n]).array();
    rep.energy.push_back((w * (k * k + q_at(n) * xx * dh * dh)).sum());
  }
  for (int n = 0; n < steps; ++n) {
    const double t = (n + 0.5) * dt;
    const auto [y, v] = midpoint_background(background, n);
    const CoefficientFields f = fields_at(y, v);
    const Eigen::ArrayXd q = f.q.array();
    const Eigen::VectorXd hbar = 0.5 * (solution.h.slices[n] + solution.h.slices[n + 1]);
    const Eigen::VectorXd kbar = 0.5 * (solution.k.slices[n] + solution.k.slices[n + 1]);
    const Eigen::ArrayXd h = (disc.values() * hbar).array();
    const Eigen::ArrayXd k = (disc.values() * kbar).array();
    const Eigen::ArrayXd hd = s * (disc.d1() * hbar).array();  // Ddot h
    const Eigen::ArrayXd qt = fixed ? Eigen::ArrayXd::Zero(q.size()).eval() : ((q_at(n + 1) - q_at(n)) / dt).eval();

    const Eigen::ArrayXd a01 = f.a01.array(), a00 = f.a00.array(), a21 = f.a21.array();
    const Eigen::ArrayXd alpha = q * a01;
    const Eigen::ArrayXd alpha_star = -0.25 * ((3.0 - (n_param + 1.0) * x) * alpha + 2.0 * xx * deriv(alpha.matrix()));
    const Eigen::ArrayXd beta1 = alpha_star - 0.5 * qt + q * (xx * deriv(f.a01) + a00);
    const Eigen::ArrayXd beta2 = q * s * deriv(f.a00);
    const Eigen::ArrayXd beta3 = s * deriv(f.H1) + s * f.b1.array() - q * s * deriv(f.J);
    const Eigen::ArrayXd beta4 = f.b0.array();
    const Eigen::ArrayXd beta5 = f.a20.array() - 0.5 * (xx * deriv(f.a21) + gamma * a21);

    const double p[5] = {(w * beta1 * hd * hd).sum(), (w * beta2 * hd * h).sum(), (w * beta3 * hd * k).sum(),
                         (w * beta4 * h * k).sum(), (w * beta5 * k * k).sum()};
    double rhs = 0.0;
    double rhs_terms[2] = {0.0, 0.0};
    if (forcing) {
      const Eigen::VectorXd g = forcing(n, t);
      const Eigen::ArrayXd g1d = s * (disc.d1() * g.head(m)).array();
      const Eigen::ArrayXd g2 = (disc.values() * g.tail(m)).array();
      rhs_terms[0] = (w * q * hd * g1d).sum();
      rhs_terms[1] = (w * k * g2).sum();
      rhs = rhs_terms[0] + rhs_terms[1];
    }
    const double half_de = (rep.energy[n + 1] - rep.energy[n]) / (2.0 * dt);
    double lhs = half_de;
    for (int i = 0; i < 5; ++i) {
      lhs += p[i];
      rep.beta[i].push_back(p[i]);
      rep.max_term = std::max(rep.max_term, std::abs(p[i]));
    }
    rep.max_term = std::max({rep.max_term, std::abs(half_de), std::abs(rhs_terms[0]), std::abs(rhs_terms[1])});
    rep.t.push_back(t);
    rep.half_dE.push_back(half_de);
    rep.rhs.push_back(rhs);
    rep.residual.push_back(std::abs(lhs - rhs));
    rep.max_residual = std::max(rep.max_residual, rep.residual.back());
  }
  const double e0 = rep.energy.front();
  for (double e : rep.energy)
    if (e0 > 0.0) rep.relative_drift = std::max(rep.relative_drift, std::abs(e - e0) / e0);
  return rep;
}

Eigen::MatrixXd TwoPieceOperator::block() const {
  const Eigen::Index m = c11.rows();
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  coupling.topLeftCorner(m, m) = c11;
  coupling.bottomLeftCorner(m, m) = c21;
  coupling.bottomRightCorner(m, m) = c22;
  Eigen::MatrixXd b(4 * m, 4 * m);
  b << piece[0].block(), -coupling, coupling, piece[1].block();
  return b;
}

TwoPieceOperator assemble_two_piece(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& v) {
  const LinearizedOperator base = assemble_DP(disc, model, y, v);
  const CoefficientFields& f = base.fields;
  const int q = disc.nodes();
  Eigen::ArrayXd om(q), dom(q), d2om(q);
  for (int i = 0; i < q; ++i) {
    const Jet j = omega_jet(disc.x()[i], 2);
    om[i] = j.value();
    dom[i] = j.derivative(1);
    d2om[i] = j.derivative(2);
  }
  const Eigen::ArrayXd x = disc.x().array();
  const Eigen::ArrayXd xx = xx_of(disc);
  const Eigen::ArrayXd chk_om = xx * dom;
  const Eigen::ArrayXd lam_om = xx * d2om + drift_of(disc) * dom;
  const Eigen::ArrayXd H1 = f.H1.array(), b1 = f.b1.array();
  const Eigen::MatrixXd chk = check_d_at_nodes(disc);
  const Eigen::MatrixXd lam = lambda_at_nodes(disc);
  const Eigen::MatrixXd& V = disc.values();
  const double n_param = disc.n_param();

  TwoPieceOperator tp;
  for (int mu = 0; mu < 2; ++mu) {
    const double sgn = mu == 0 ? 1.0 : -1.0;
    LinearizedOperator& p = tp.piece[mu];
    p.fields = f;
    const Eigen::VectorXd c0_a1 = (f.a00.array() - sgn * f.a01.array() * chk_om).matrix();
    const Eigen::VectorXd c0_a2 = (f.a20.array() - sgn * f.a21.array() * chk_om).matrix();
    const Eigen::VectorXd c1_A = (b1 + sgn * 2.0 * H1 * dom).matrix();
    const Eigen::VectorXd c0_A = (f.b0.array() + sgn * (H1 * lam_om - b1 * chk_om)).matrix();
    p.a1 = disc.galerkin(diag_times(f.a01, chk) + diag_times(c0_a1, V));
    p.a2 = disc.galerkin(diag_times(f.a21, chk) + diag_times(c0_a2, V));
    p.negJ = base.negJ;
    p.A = disc.galerkin(-diag_times(f.H1, lam) + diag_times(c1_A, chk) + diag_times(c0_A, V));
    tp.b0[mu] = c0_A;
  }
  tp.b2[0] = (H1 * (1.0 - x)).matrix();
  tp.b1[0] = (0.5 * n_param * H1 + (b1 + 2.0 * H1 * dom) * (1.0 - x)).matrix();
  tp.b2[1] = (H1 * x).matrix();
  tp.b1[1] = (2.5 * H1 - (b1 - 2.0 * H1 * dom) * x).matrix();

  tp.c11_coef = (f.a01.array() * chk_om).matrix();
  tp.c22_coef = (f.a21.array() * chk_om).matrix();
  tp.c21_first = (-2.0 * H1 * dom).matrix();
  tp.c21_zeroth = (b1 * chk_om - H1 * lam_om).matrix();
  tp.c11 = disc.galerkin(diag_times(tp.c11_coef, V));
  tp.c22 = disc.galerkin(diag_times(tp.c22_coef, V));
  tp.c21 = disc.galerkin(diag_times(tp.c21_first, chk) + diag_times(tp.c21_zeroth, V));
  return tp;
}

double coupling_leak(const Discretization& disc, const TwoPieceOperator& op) {
  double worst = 0.0;
  for (int i = 0; i < disc.nodes(); ++i) {
    const double x = disc.x()[i];
    if (x >= 1.0 / 3.0 && x <= 2.0 / 3.0) continue;
    worst = std::max({worst, std::abs(op.c11_coef[i]), std::abs(op.c22_coef[i]), std::abs(op.c21_first[i]),
                      std::abs(op.c21_zeroth[i])});
  }
  return worst;
}

TwoPieceSolution solve_two_piece_ivp(const Discretization& disc, const ModelSpec& model,
                                     const StatePair& background, const ForcingFn& forcing,
                                     const Eigen::VectorXd& u0, const IvpOptions& opts) {
  check_background(background, opts.steps);
  const int m = disc.size();
  if (u0.size() != 2 * m) throw std::invalid_argument("solve_two_piece_ivp: initial state size");
  Eigen::VectorXd om(disc.nodes());
  for (int i = 0; i < disc.nodes(); ++i) om[i] = omega(disc.x()[i]);
  auto split = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd out(4 * m);
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd part = g.segment(c * m, m);
      const Eigen::VectorXd inner = disc.project(om.asDiagonal() * disc.to_nodes(part));
      out.segment(c * m, m) = inner;
      out.segment(2 * m + c * m, m) = part - inner;
    }
    return out;
  };
  auto op = [&](int s) {
    const auto [y, v] = midpoint_background(background, s);
    return assemble_two_piece(disc, model, y, v).block();
  };
  ForcingFn split_forcing;
  if (forcing) split_forcing = [&](int s, double t) { return split(forcing(s, t)); };
  const auto us = midpoint_integrate(op, background.h.slices.size() == 1, split_forcing, split(u0), opts.dt,
                                     opts.steps);
  TwoPieceSolution sol;
  std::vector<Eigen::VectorXd> a, b;
  for (const auto& u : us) {
    a.push_back(u.head(2 * m));
    b.push_back(u.tail(2 * m));
  }
  sol.piece[0] = split_series(a, m, opts.dt);
  sol.piece[1] = split_series(b, m, opts.dt);
  return sol;
}

namespace {

double piece_grade(const NormEvaluator& ev, int mu, const Eigen::VectorXd& h, const Eigen::VectorXd& k, int n) {
  double s = 0.0;
  for (int ell = 0; ell <= n; ++ell) {
    const double a = ev.bracket(mu, ell + 1, h), b = ev.bracket(mu, ell, k);
    s += a * a + b * b;
  }
  return std::sqrt(s);
}

}  // namespace

double elliptic_ratio(const Discretization& disc, const NormEvaluator& ev, const TwoPieceOperator& op, int mu,
                      const Eigen::VectorXd& h, const Eigen::VectorXd& k, int n) {
  const int m = disc.size();
  Eigen::VectorXd u(2 * m);
  u << h, k;
  const Eigen::VectorXd au = op.piece[mu].block() * u;
  const LinearizedOperator& p = op.piece[mu];
  const CoefficientFields& f = p.fields;
  double a_norm = 0.0;
  for (const Eigen::VectorXd* c : {&op.b0[mu], &op.b1[mu], &op.b2[mu], &f.a01, &f.a00, &f.a21, &f.a20, &f.J})
    a_norm = std::max(a_norm, ev.dot_sup(mu, disc.project(*c), n + 4));
  const double num = piece_grade(ev, mu, h, k, n + 1);
  const double den = piece_grade(ev, mu, au.head(m), au.tail(m), n) + (1.0 + a_norm) * piece_grade(ev, mu, h, k, 0);
  return num / den;
}

TameDiagnostic tame_diagnostic(const NormEvaluator& ev, const StatePair& h, const StatePair& g, const StatePair& w,
                               int m, int r) {
  auto pair_two = [&](const StatePair& p, int n) {
    const double a = ev.two_n(p.h, n), b = ev.two_n(p.k, n);
    return std::sqrt(a * a + b * b);
  };
  TameDiagnostic d;
  d.h_norm = pair_two(h, m);
  d.g_norm = pair_two(g, m);
  d.w_norm = pair_two(w, m + r);
  d.ratio = d.h_norm / (1.0 + d.g_norm + d.w_norm);
  return d;
}

}  // namespace starwave
