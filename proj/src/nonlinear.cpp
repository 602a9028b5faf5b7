#include "starwave/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starwave/errors.hpp"
#include "starwave/spectrum.hpp"

namespace starwave {

namespace {

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

void check_pair(const StatePair& p, const char* what) {
  if (p.h.slices.empty() || p.h.slices.size() != p.k.slices.size())
    throw std::invalid_argument(std::string(what) + ": inconsistent slices");
}

Eigen::VectorXd j_rest(const Discretization& disc, const ModelSpec& model) {
  Eigen::VectorXd j(disc.nodes());
  for (int i = 0; i < disc.nodes(); ++i) j[i] = model.J(disc.x()[i], 0.0, 0.0).value;
  return j;
}

StatePair empty_like(double dt) {
  StatePair p;
  p.h.dt = p.k.dt = dt;
  return p;
}

}  // namespace

BackgroundPair zero_background(const Discretization& disc, double dt, int steps) {
  BackgroundPair bg;
  bg.provenance = "custom";
  bg.pair = empty_like(dt);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(disc.size());
  bg.pair.h.slices.assign(static_cast<std::size_t>(steps) + 1, z);
  bg.pair.k.slices.assign(static_cast<std::size_t>(steps) + 1, z);
  return bg;
}

BackgroundPair periodic_background(const Discretization& disc, const ModelSpec& model,
                                   const Eigen::VectorXd& phi, double lambda, double eps,
                                   double theta0, double dt, int steps) {
  if (!(lambda > 0.0)) throw std::invalid_argument("periodic_background: lambda must be positive");
  const double om = std::sqrt(lambda);
  const Eigen::VectorXd phi_nodes = disc.to_nodes(phi);
  const Eigen::VectorXd v_shape =
      disc.project((om * phi_nodes.array() / j_rest(disc, model).array()).matrix());
  BackgroundPair bg;
  bg.provenance = "periodic";
  bg.pair = empty_like(dt);
  for (int n = 0; n <= steps; ++n) {
    const double t = n * dt;
    bg.pair.h.slices.push_back(eps * std::sin(om * t + theta0) * phi);
    bg.pair.k.slices.push_back(eps * std::cos(om * t + theta0) * v_shape);
  }
  return bg;
}

BackgroundPair cauchy_background(const Discretization& disc, const ModelSpec& model,
                                 const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1, double dt,
                                 int steps) {
  const Eigen::VectorXd jpsi1 =
      disc.project((j_rest(disc, model).array() * disc.to_nodes(psi1).array()).matrix());
  BackgroundPair bg;
  bg.provenance = "cauchy";
  bg.pair = empty_like(dt);
  for (int n = 0; n <= steps; ++n) {
    bg.pair.h.slices.push_back(psi0 + (n * dt) * jpsi1);
    bg.pair.k.slices.push_back(psi1);
  }
  return bg;
}

StatePair add_states(const StatePair& a, const StatePair& b) {
  check_pair(a, "add_states");
  check_pair(b, "add_states");
  if (a.h.slices.size() != b.h.slices.size()) throw std::invalid_argument("add_states: time grids differ");
  StatePair out = empty_like(a.h.dt);
  for (std::size_t n = 0; n < a.h.slices.size(); ++n) {
    out.h.slices.push_back(a.h.slices[n] + b.h.slices[n]);
    out.k.slices.push_back(a.k.slices[n] + b.k.slices[n]);
  }
  return out;
}

StatePair residual_P(const Discretization& disc, const ModelSpec& model, const StatePair& w,
                     const BackgroundPair& bg) {
  check_pair(w, "residual_P");
  check_pair(bg.pair, "residual_P");
  const auto& ws = w.h.slices;
  if (ws.size() != bg.pair.h.slices.size()) throw std::invalid_argument("residual_P: time grids differ");
  const double dt = bg.pair.h.dt;
  const int q = disc.nodes();
  StatePair r = empty_like(dt);
  for (std::size_t n = 0; n + 1 < ws.size(); ++n) {
    const Eigen::VectorXd ys = 0.5 * (bg.pair.h.slices[n] + bg.pair.h.slices[n + 1]);
    const Eigen::VectorXd vs = 0.5 * (bg.pair.k.slices[n] + bg.pair.k.slices[n + 1]);
    const Eigen::VectorXd yt = 0.5 * (w.h.slices[n] + w.h.slices[n + 1]);
    const Eigen::VectorXd vt = 0.5 * (w.k.slices[n] + w.k.slices[n + 1]);
    const NodalState sb = nodal_state(disc, model.coeffs, ys, vs);
    const NodalState sp = nodal_state(disc, model.coeffs, yt, vt);
    const NodalState sf = nodal_state(disc, model.coeffs, ys + yt, vs + vt);
    require_in_box(disc, sf, model.U_radius);
    Eigen::VectorXd p1(q), p2(q), c1(q), c2(q);
    for (int i = 0; i < q; ++i) {
      const double x = disc.x()[i];
      const double jb = model.J(x, sb.y[i], sb.z[i]).value;
      const double jf = model.J(x, sf.y[i], sf.z[i]).value;
      const double h1b = model.H1(x, sb.y[i], sb.z[i], sb.v[i]).value;
      const double h1f = model.H1(x, sf.y[i], sf.z[i], sf.v[i]).value;
      const double h2b = model.H2(x, sb.y[i], sb.z[i], sb.v[i], sb.w[i]).value;
      const double h2f = model.H2(x, sf.y[i], sf.z[i], sf.v[i], sf.w[i]).value;
      p1[i] = -jf * sp.v[i] - (jf - jb) * sb.v[i];
      p2[i] = h1f * sp.Ly[i] + (h1f - h1b) * sb.Ly[i] + (h2f - h2b);
      c1[i] = jb * sb.v[i];
      c2[i] = -(h1b * sb.Ly[i] + h2b);
    }
    const Eigen::VectorXd dy = (w.h.slices[n + 1] - w.h.slices[n]) / dt;
    const Eigen::VectorXd dv = (w.k.slices[n + 1] - w.k.slices[n]) / dt;
    const Eigen::VectorXd dys = (bg.pair.h.slices[n + 1] - bg.pair.h.slices[n]) / dt;
    const Eigen::VectorXd dvs = (bg.pair.k.slices[n + 1] - bg.pair.k.slices[n]) / dt;
    // c = (-y*_t + J v*, -v*_t - H1 L y* - H2) at the background.
    r.h.slices.push_back(dy + disc.project(p1) - (-dys + disc.project(c1)));
    r.k.slices.push_back(dv + disc.project(p2) - (-dvs + disc.project(c2)));
  }
  return r;
}

StatePair full_residual(const Discretization& disc, const ModelSpec& model, const StatePair& u) {
  check_pair(u, "full_residual");
  const double dt = u.h.dt;
  const int m = disc.size();
  StatePair r = empty_like(dt);
  for (std::size_t n = 0; n + 1 < u.h.slices.size(); ++n) {
    const Eigen::VectorXd f =
        nonlinear_rhs(disc, model, 0.5 * (u.h.slices[n] + u.h.slices[n + 1]),
                      0.5 * (u.k.slices[n] + u.k.slices[n + 1]));
    r.h.slices.push_back((u.h.slices[n + 1] - u.h.slices[n]) / dt + f.head(m));
    r.k.slices.push_back((u.k.slices[n + 1] - u.k.slices[n]) / dt + f.tail(m));
  }
  return r;
}

double residual_norm(const StatePair& r) {
  double out = 0.0;
  for (std::size_t n = 0; n < r.h.slices.size(); ++n)
    out = std::max(out, std::sqrt(r.h.slices[n].squaredNorm() + r.k.slices[n].squaredNorm()));
  return out;
}

StatePair evolve_nonlinear(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& y0,
                           const Eigen::VectorXd& v0, const EvolveOptions& opts) {
  const int m = disc.size();
  if (y0.size() != m || v0.size() != m) throw std::invalid_argument("evolve_nonlinear: initial data size");
  if (!(opts.dt > 0.0) || opts.steps < 0) throw std::invalid_argument("evolve_nonlinear: bad time grid");
  const double dt = opts.dt;
  StatePair out = empty_like(dt);
  out.h.slices.push_back(y0);
  out.k.slices.push_back(v0);
  Eigen::VectorXd u = stack(y0, v0);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  for (int s = 0; s < opts.steps; ++s) {
    const double t = s * dt;
    try {
      const LinearizedOperator lin = assemble_DP(disc, model, u.head(m), u.tail(m));
      const double nu = max_frequency(disc, lin.fields);
      if (dt * nu >= opts.cfl)
        throw NumericalError("time step too large: dt sqrt(lambda_max) = " + std::to_string(dt * nu));
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(eye + 0.5 * dt * lin.block());
      // Linearly implicit predictor, then chord corrections on
      // G(u') = u' - u + dt F((u + u')/2).
      Eigen::VectorXd next = u - dt * lu.solve(nonlinear_rhs(disc, model, u.head(m), u.tail(m)));
      bool done = false;
      for (int it = 0; it < opts.max_inner && !done; ++it) {
        const Eigen::VectorXd mid = 0.5 * (u + next);
        const Eigen::VectorXd g = next - u + dt * nonlinear_rhs(disc, model, mid.head(m), mid.tail(m));
        const Eigen::VectorXd delta = lu.solve(g);
        next -= delta;
        if (!next.allFinite()) break;
        done = delta.lpNorm<Eigen::Infinity>() <= opts.inner_tol;
      }
      if (!done)
        throw NumericalError("inner iteration did not converge at t=" + std::to_string(t));
      u = next;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (step " + std::to_string(s) + ", t=" +
                           std::to_string(t) + ")");
    }
    out.h.slices.push_back(u.head(m));
    out.k.slices.push_back(u.tail(m));
  }
  return out;
}

NewtonResult newton_solve(const Discretization& disc, const ModelSpec& model, const BackgroundPair& bg,
                          const NewtonOptions& opts) {
  check_pair(bg.pair, "newton_solve");
  const int m = disc.size();
  const int steps = static_cast<int>(bg.pair.h.slices.size()) - 1;
  const double dt = bg.pair.h.dt;
  if (steps < 1 || !(dt > 0.0)) throw std::invalid_argument("newton_solve: background needs a time grid");
  NewtonResult res;
  res.w = zero_background(disc, dt, steps).pair;
  StatePair r = residual_P(disc, model, res.w, bg);
  double rn = residual_norm(r);
  res.trace.residual.push_back(rn);
  double theta = opts.theta0;
  for (int k = 0; rn >= opts.tol; ++k) {
    if (k >= opts.max_iter)
      throw NumericalError("newton_solve: max_iter reached with residual " + std::to_string(rn));
    const StatePair full = add_states(bg.pair, res.w);
    auto op = [&](int s) {
      const Eigen::VectorXd y = 0.5 * (full.h.slices[s] + full.h.slices[s + 1]);
      const Eigen::VectorXd v = 0.5 * (full.k.slices[s] + full.k.slices[s + 1]);
      const LinearizedOperator lin = assemble_DP(disc, model, y, v);
      const double nu = max_frequency(disc, lin.fields);
      if (dt * nu >= opts.cfl)
        throw NumericalError("time step too large: dt sqrt(lambda_max) = " + std::to_string(dt * nu));
      return lin.block();
    };
    ForcingFn forcing = [&](int s, double) -> Eigen::VectorXd {
      return -stack(r.h.slices[s], r.k.slices[s]);
    };
    std::vector<Eigen::VectorXd> delta =
        midpoint_integrate(op, false, forcing, Eigen::VectorXd::Zero(2 * m), dt, steps);
    if (opts.nash_moser) {
      const int keep = std::min(m, static_cast<int>(std::floor(theta)) + 1);
      for (auto& d : delta) {
        d.segment(keep, m - keep).setZero();
        d.tail(m - keep).setZero();
      }
    }
    double dnorm = 0.0;
    for (const auto& d : delta) dnorm = std::max(dnorm, d.norm());

    double f = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, f *= 0.5) {
      StatePair trial = res.w;
      for (int s = 0; s <= steps; ++s) {
        trial.h.slices[s] += f * delta[s].head(m);
        trial.k.slices[s] += f * delta[s].tail(m);
      }
      StatePair rt;
      try {
        rt = residual_P(disc, model, trial, bg);
      } catch (const NumericalError&) {
        continue;  // left the U-box: shorten the step
      }
      const double tn = residual_norm(rt);
      if (tn <= rn) {
        res.w = std::move(trial);
        r = std::move(rt);
        rn = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NumericalError("newton_solve: residual increased after " + std::to_string(opts.max_halvings) +
                           " halvings (residual " + std::to_string(rn) + ")");
    res.trace.step_norm.push_back(dnorm);
    res.trace.theta.push_back(opts.nash_moser ? theta : 0.0);
    res.trace.factor.push_back(f);
    res.trace.residual.push_back(rn);
    res.trace.iterations = k + 1;
    theta *= opts.rho;
  }
  return res;
}

SupNorm::SupNorm(const Discretization& disc, int extra) {
  const int m = disc.size();
  eval_.resize(disc.nodes() + extra, m);
  eval_.topRows(disc.nodes()) = disc.values();
  for (int p = 0; p < extra; ++p) {
    const double x = (p + 1.0) / (extra + 1.0);
    for (int k = 0; k < m; ++k) eval_(disc.nodes() + p, k) = disc.basis().eval(k, x);
  }
}

double SupNorm::operator()(const Eigen::VectorXd& coeffs) const {
  return (eval_ * coeffs).lpNorm<Eigen::Infinity>();
}

double SupNorm::operator()(const TimeField& f) const {
  double out = 0.0;
  for (const auto& c : f.slices) out = std::max(out, (*this)(c));
  return out;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size() || eps.size() < 2) throw std::invalid_argument("loglog_slope: need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0)) throw NumericalError("loglog_slope: nonpositive data");
    const double lx = std::log(eps[i]), ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PeriodicResult periodic_experiment(const Discretization& disc, const ModelSpec& model,
                                   const PeriodicSetup& setup, const std::vector<double>& eps,
                                   const NewtonOptions& opts) {
  if (setup.mode < 1) throw std::invalid_argument("periodic_experiment: mode index starts at 1");
  if (setup.steps < 1 || !(setup.T > 0.0)) throw std::invalid_argument("periodic_experiment: bad time grid");
  const auto pairs = solve_eigen(disc, model.coeffs, setup.mode + 1);
  int seen = 0;
  const EigenPair* pick = nullptr;
  for (const auto& p : pairs)
    if (p.lambda > 1e-8 && ++seen == setup.mode) {
      pick = &p;
      break;
    }
  if (!pick) throw NumericalError("periodic_experiment: requested mode was not computed");

  const SupNorm sup(disc);
  PeriodicResult out;
  out.lambda = pick->lambda;
  out.phi = pick->phi.coeffs / sup(pick->phi.coeffs);
  if (disc.basis().jet(out.phi, 0.0, 0)[0] < 0.0) out.phi = -out.phi;

  const double dt = setup.T / setup.steps;
  std::vector<double> e_pos, ey, ev;
  for (double e : eps) {
    PeriodicRow row;
    row.eps = e;
    const BackgroundPair bg = periodic_background(disc, model, out.phi, out.lambda, e, setup.theta0, dt, setup.steps);
    const NewtonResult nr = newton_solve(disc, model, bg, opts);
    // y - eps Y1 is exactly the correction w.
    row.error_y = sup(nr.w.h);
    row.error_v = sup(nr.w.k);
    row.iterations = nr.trace.iterations;
    row.final_residual = nr.trace.residual.back();
    if (e > 0.0) {
      row.ratio_y = row.error_y / (e * e);
      row.ratio_v = row.error_v / (e * e);
      e_pos.push_back(e);
      ey.push_back(row.error_y);
      ev.push_back(row.error_v);
    }
    out.rows.push_back(row);
  }
  if (e_pos.size() >= 2) {
    out.slope_y = loglog_slope(e_pos, ey);
    out.slope_v = loglog_slope(e_pos, ev);
  }
  return out;
}

CauchyResult cauchy_solve(const Discretization& disc, const ModelSpec& model, const Eigen::VectorXd& psi0,
                          const Eigen::VectorXd& psi1, double T, int steps, const NewtonOptions& opts) {
  if (steps < 1 || !(T > 0.0)) throw std::invalid_argument("cauchy_solve: bad time grid");
  const double dt = T / steps;
  const BackgroundPair bg = cauchy_background(disc, model, psi0, psi1, dt, steps);
  CauchyResult out;
  const NewtonResult nr = newton_solve(disc, model, bg, opts);
  out.trace = nr.trace;
  out.newton = add_states(bg.pair, nr.w);

  EvolveOptions eo;
  eo.dt = dt;
  eo.steps = steps;
  eo.cfl = opts.cfl;
  out.direct = evolve_nonlinear(disc, model, psi0, psi1, eo);

  const SupNorm sup(disc);
  for (int s = 0; s <= steps; ++s) {
    out.discrepancy = std::max({out.discrepancy, sup(Eigen::VectorXd(out.newton.h.slices[s] - out.direct.h.slices[s])),
                                sup(Eigen::VectorXd(out.newton.k.slices[s] - out.direct.k.slices[s]))});
  }
  out.initial_defect = std::max(sup(Eigen::VectorXd(out.newton.h.slices[0] - psi0)),
                                sup(Eigen::VectorXd(out.newton.k.slices[0] - psi1)));
  return out;
}

}  // namespace starwave
