#include "starwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starwave/errors.hpp"

namespace starwave {

double omega(double x) {
  const double s = 3.0 * x - 1.0;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double phi = 1.0 / (1.0 - s) - 1.0 / s;
  if (phi >= 0.0) {
    const double e = std::exp(-phi);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(phi));
}

Jet omega_jet(double x0, int order) {
  const Jet s = -1.0 + 3.0 * Jet::variable(x0, order);
  if (s.value() <= 0.0) return Jet::constant(1.0, order);
  if (s.value() >= 1.0) return Jet::constant(0.0, order);
  const Jet one = Jet::constant(1.0, order);
  const Jet phi = one / (one - s) - one / s;
  if (phi.value() >= 0.0) {
    const Jet e = exp(-phi);
    return e / (one + e);
  }
  return one / (one + exp(phi));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> cutoff_split(const Discretization& disc,
                                                         const Eigen::VectorXd& nodal) {
  if (nodal.size() != disc.nodes()) throw std::invalid_argument("cutoff_split: expected nodal values");
  Eigen::VectorXd u0(nodal.size());
  for (Eigen::Index i = 0; i < nodal.size(); ++i) u0[i] = omega(disc.x()[i]) * nodal[i];
  Eigen::VectorXd u1 = nodal - u0;
  return {u0, u1};
}

Grading parse_grading(const std::string& name) {
  if (name == "inf_n") return Grading::inf_n;
  if (name == "two_n") return Grading::two_n;
  if (name == "bracket") return Grading::bracket;
  if (name == "pair_k") return Grading::pair_k;
  if (name == "pair_sup_n") return Grading::pair_sup_n;
  if (name == "pair_int_n") return Grading::pair_int_n;
  if (name == "pointwise_n") return Grading::pointwise_n;
  throw std::invalid_argument("unknown grading '" + name + "'");
}

Eigen::MatrixXd fd_weights(double z, const std::vector<double>& grid, int max_order) {
  const int n = static_cast<int>(grid.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(max_order + 1, n);
  double c1 = 1.0, c4 = grid[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = grid[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = grid[i] - grid[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

Jet piece_factor(Piece piece, double x0, int order) {
  switch (piece) {
    case Piece::whole: return Jet::constant(1.0, order);
    case Piece::inner: return omega_jet(x0, order);
    case Piece::outer: return Jet::constant(1.0, order) - omega_jet(x0, order);
  }
  return Jet::constant(1.0, order);
}

// Delta_[0] = x D^2 + 5/2 D;  Delta_[1] = (1-x) D^2 - N/2 D.
Jet apply_delta(int mu, const Jet& f, double x0, double n_param) {
  const Jet d1 = f.diff();
  const Jet d2 = d1.diff();
  const int ord = d2.order();
  const Jet x = Jet::variable(x0, ord);
  if (mu == 0) return x * d2 + 2.5 * d1.truncated(ord);
  return (Jet::constant(1.0, ord) - x) * d2 + (-0.5 * n_param) * d1.truncated(ord);
}

// Ddot_[0] = sqrt(x) D;  Ddot_[1] = sqrt(X) d/dX = -sqrt(1-x) D.
Jet apply_dot(int mu, const Jet& f, double x0) {
  const Jet d1 = f.diff();
  const int ord = d1.order();
  const Jet x = Jet::variable(x0, ord);
  if (mu == 0) return sqrt(x) * d1;
  return -(sqrt(Jet::constant(1.0, ord) - x) * d1);
}

struct Stencil {
  int npts = 1;
  int half = 0;
};

Stencil stencil_for(int d, int accuracy) {
  Stencil s;
  if (d == 0) return s;
  s.npts = d + accuracy;
  if (s.npts % 2 == 0) ++s.npts;
  s.half = s.npts / 2;
  return s;
}

// d-th time derivative of each column at the selected rows.
Eigen::MatrixXd time_derivative(const Eigen::MatrixXd& table, int d, int accuracy, double dt,
                                const std::vector<int>& rows) {
  const int m = static_cast<int>(table.rows());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), table.cols());
  if (d == 0) {
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = table.row(rows[r]);
    return out;
  }
  if (m == 1) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), table.cols());
  const Stencil s = stencil_for(d, accuracy);
  if (s.npts > m)
    throw NumericalError("time derivative of order " + std::to_string(d) + " needs " +
                         std::to_string(s.npts) + " time slices, grid has " + std::to_string(m));
  std::vector<double> grid(static_cast<std::size_t>(s.npts));
  const double scale = std::pow(dt, -d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int i = rows[r];
    const int start = std::clamp(i - s.half, 0, m - s.npts);
    for (int q = 0; q < s.npts; ++q) grid[q] = start + q;
    const Eigen::MatrixXd w = fd_weights(static_cast<double>(i), grid, d);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(table.cols());
    for (int q = 0; q < s.npts; ++q) acc += w(d, q) * table.row(start + q);
    out.row(r) = scale * acc;
  }
  return out;
}

std::vector<int> all_rows(int m) {
  std::vector<int> r(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) r[i] = i;
  return r;
}

// Rows where a centered stencil for derivative d fits.
std::vector<int> interior_rows(int m, int d, int accuracy) {
  if (d == 0 || m == 1) return all_rows(m);
  const Stencil s = stencil_for(d, accuracy);
  if (s.npts > m)
    throw NumericalError("time derivative of order " + std::to_string(d) + " needs " +
                         std::to_string(s.npts) + " time slices, grid has " + std::to_string(m));
  std::vector<int> r;
  for (int i = s.half; i < m - s.half; ++i) r.push_back(i);
  return r;
}

double trapezoid(const Eigen::VectorXd& v, double dt) {
  if (v.size() == 1) return v[0];
  return dt * (v.sum() - 0.5 * (v[0] + v[v.size() - 1]));
}

}  // namespace

struct NormEvaluator::Tables {
  std::vector<Eigen::MatrixXd> delta;     // Delta^k f
  std::vector<Eigen::MatrixXd> dotdelta;  // Ddot Delta^m f
  std::vector<Eigen::MatrixXd> dotpow;    // Ddot^k f
  // bracket ell table: ell = 2m -> delta[m], ell = 2m+1 -> dotdelta[m]
  const Eigen::MatrixXd& bracket(int ell) const {
    return ell % 2 == 0 ? delta.at(ell / 2) : dotdelta.at(ell / 2);
  }
};

NormEvaluator::NormEvaluator(const Discretization& disc, NormOptions opts) : disc_(disc), opts_(opts) {
  for (int i = 0; i < disc.nodes(); ++i) sup_points_.push_back(disc.x()[i]);
  for (int i = 0; i < opts.aux_points; ++i) sup_points_.push_back((i + 0.5) / opts.aux_points);
  const int q = opts.weight_rule > 0 ? opts.weight_rule : 3 * disc.size();
  rule_[0] = gauss_jacobi_rule(q, 0.0, 1.5);
  rule_[1] = gauss_jacobi_rule(q, 0.5 * disc.n_param() - 1.0, 0.0);
}

double NormEvaluator::horizon(const TimeField& u) const {
  return u.is_static() ? opts_.horizon : u.dt * u.steps();
}

NormEvaluator::Tables NormEvaluator::tabulate(const TimeField& u, int mu, Piece piece,
                                              const std::vector<double>& pts, int order) const {
  if (u.slices.empty()) throw std::invalid_argument("NormEvaluator: empty field");
  if (!u.is_static() && !(u.dt > 0.0)) throw std::invalid_argument("NormEvaluator: time step must be positive");
  const int m = static_cast<int>(u.slices.size());
  const int np = static_cast<int>(pts.size());
  Tables t;
  t.delta.assign(order / 2 + 1, Eigen::MatrixXd(m, np));
  t.dotdelta.assign(order >= 1 ? (order - 1) / 2 + 1 : 0, Eigen::MatrixXd(m, np));
  t.dotpow.assign(order + 1, Eigen::MatrixXd(m, np));
  const double n_param = disc_.n_param();
  for (int p = 0; p < np; ++p) {
    const double x0 = pts[p];
    const Jet factor = piece_factor(piece, x0, order);
    for (int s = 0; s < m; ++s) {
      const Jet f = Jet(disc_.basis().jet(u.slices[s], x0, order)) * factor;
      Jet g = f;
      for (std::size_t k = 0; k < t.delta.size(); ++k) {
        t.delta[k](s, p) = g.value();
        if (k < t.dotdelta.size()) t.dotdelta[k](s, p) = apply_dot(mu, g, x0).value();
        if (k + 1 < t.delta.size()) g = apply_delta(mu, g, x0, n_param);
      }
      g = f;
      for (std::size_t k = 0; k < t.dotpow.size(); ++k) {
        t.dotpow[k](s, p) = g.value();
        if (k + 1 < t.dotpow.size()) g = apply_dot(mu, g, x0);
      }
    }
  }
  return t;
}

double NormEvaluator::weighted_norm(int mu, const std::function<double(double)>& f) const {
  return std::sqrt(rule_[mu].integrate([&](double x) { return f(x) * f(x); }));
}

double NormEvaluator::bracket(int mu, int ell, const Eigen::VectorXd& coeffs, Piece piece) const {
  if (ell < 0) throw std::invalid_argument("bracket: negative index");
  const TimeField u{0.0, {coeffs}};
  const Tables t = tabulate(u, mu, piece, rule_[mu].nodes, ell);
  const Eigen::MatrixXd& v = t.bracket(ell);
  double s = 0.0;
  for (std::size_t i = 0; i < rule_[mu].size(); ++i) s += rule_[mu].weights[i] * v(0, i) * v(0, i);
  return std::sqrt(s);
}

double NormEvaluator::inf_n(int mu, const TimeField& u, int n, Piece piece) const {
  const Tables t = tabulate(u, mu, piece, sup_points_, 2 * n);
  const int m = static_cast<int>(u.slices.size());
  double best = 0.0;
  for (int j = 0; j <= n; ++j) {
    const std::vector<int> rows = interior_rows(m, 2 * j, 2 * n + 2);
    for (int k = 0; j + k <= n; ++k)
      best = std::max(best, time_derivative(t.delta[k], 2 * j, 2 * n + 2, u.dt, rows).cwiseAbs().maxCoeff());
  }
  return best;
}

double NormEvaluator::two_n(int mu, const TimeField& u, int n, Piece piece) const {
  const Tables t = tabulate(u, mu, piece, rule_[mu].nodes, 2 * n);
  const int m = static_cast<int>(u.slices.size());
  const Eigen::Map<const Eigen::VectorXd> w(rule_[mu].weights.data(),
                                            static_cast<Eigen::Index>(rule_[mu].size()));
  const double span = horizon(u);
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; j + k <= n; ++k) {
      const Eigen::MatrixXd d = time_derivative(t.delta[k], 2 * j, 2 * n + 2, u.dt, all_rows(m));
      const Eigen::VectorXd sq = d.cwiseAbs2() * w;
      total += u.is_static() ? span * sq[0] : trapezoid(sq, u.dt);
    }
  }
  return std::sqrt(total);
}

double NormEvaluator::inf_n(const TimeField& u, int n) const {
  return std::max(inf_n(0, u, n, Piece::inner), inf_n(1, u, n, Piece::outer));
}

double NormEvaluator::two_n(const TimeField& u, int n) const {
  const double a = two_n(0, u, n, Piece::inner), b = two_n(1, u, n, Piece::outer);
  return std::sqrt(a * a + b * b);
}

double NormEvaluator::pair_k(const PairField& h, int slice, int k) const {
  double total = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const Piece piece = mu == 0 ? Piece::inner : Piece::outer;
    const TimeField hs{0.0, {h.h.slices.at(slice)}}, ks{0.0, {h.k.slices.at(slice)}};
    const Tables th = tabulate(hs, mu, piece, rule_[mu].nodes, k + 1);
    const Tables tk = tabulate(ks, mu, piece, rule_[mu].nodes, k);
    for (int ell = 0; ell <= k; ++ell) {
      for (std::size_t i = 0; i < rule_[mu].size(); ++i) {
        const double a = th.bracket(ell + 1)(0, i), b = tk.bracket(ell)(0, i);
        total += rule_[mu].weights[i] * (a * a + b * b);
      }
    }
  }
  return std::sqrt(total);
}

double NormEvaluator::pair_sup_n(const PairField& h, int n, double tau) const {
  const int m = static_cast<int>(h.h.slices.size());
  if (static_cast<int>(h.k.slices.size()) != m) throw std::invalid_argument("pair field: component grids differ");
  const std::vector<int> rows = interior_rows(m, n, 2 * n + 2);
  double total = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const Piece piece = mu == 0 ? Piece::inner : Piece::outer;
    const Tables th = tabulate(h.h, mu, piece, rule_[mu].nodes, n + 1);
    const Tables tk = tabulate(h.k, mu, piece, rule_[mu].nodes, n);
    const Eigen::Map<const Eigen::VectorXd> w(rule_[mu].weights.data(),
                                              static_cast<Eigen::Index>(rule_[mu].size()));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));
    for (int j = 0; j <= n; ++j) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));
      for (int k = 0; j + k <= n; ++k) {
        // ||.||_[mu]k^2 accumulates one more bracket pair per k.
        acc += time_derivative(th.bracket(k + 1), j, 2 * n + 2, h.h.dt, rows).cwiseAbs2() * w;
        acc += time_derivative(tk.bracket(k), j, 2 * n + 2, h.k.dt, rows).cwiseAbs2() * w;
        sum += acc.cwiseSqrt();
      }
    }
    double best = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (h.h.is_static() || rows[r] * h.h.dt <= tau + 1e-12 * std::max(1.0, tau)) best = std::max(best, sum[r]);
    total += best * best;
  }
  return std::sqrt(total);
}

double NormEvaluator::pair_int_n(const PairField& h, int n) const {
  const int m = static_cast<int>(h.h.slices.size());
  if (static_cast<int>(h.k.slices.size()) != m) throw std::invalid_argument("pair field: component grids differ");
  const std::vector<int> rows = all_rows(m);
  double total = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const Piece piece = mu == 0 ? Piece::inner : Piece::outer;
    const Tables th = tabulate(h.h, mu, piece, rule_[mu].nodes, n + 1);
    const Tables tk = tabulate(h.k, mu, piece, rule_[mu].nodes, n);
    const Eigen::Map<const Eigen::VectorXd> w(rule_[mu].weights.data(),
                                              static_cast<Eigen::Index>(rule_[mu].size()));
    for (int j = 0; j <= n; ++j) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
      for (int k = 0; j + k <= n; ++k) {
        acc += time_derivative(th.bracket(k + 1), j, 2 * n + 2, h.h.dt, rows).cwiseAbs2() * w;
        acc += time_derivative(tk.bracket(k), j, 2 * n + 2, h.k.dt, rows).cwiseAbs2() * w;
        total += h.h.is_static() ? horizon(h.h) * acc[0] : trapezoid(acc, h.h.dt);
      }
    }
  }
  return std::sqrt(total);
}

double NormEvaluator::pointwise_n(const PairField& h, int n) const {
  double best = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const Piece piece = mu == 0 ? Piece::inner : Piece::outer;
    for (const TimeField* f : {&h.h, &h.k}) {
      const Tables t = tabulate(*f, mu, piece, sup_points_, n);
      const int m = static_cast<int>(f->slices.size());
      for (int j = 0; j <= n; ++j) {
        const std::vector<int> rows = interior_rows(m, j, 2 * n + 2);
        for (int k = 0; j + k <= n; ++k)
          best = std::max(best, time_derivative(t.dotpow[k], j, 2 * n + 2, f->dt, rows).cwiseAbs().maxCoeff());
      }
    }
  }
  return best;
}

double NormEvaluator::pair_inf_n(const PairField& h, int n) const {
  return std::max(inf_n(h.h, n), inf_n(h.k, n));
}

double NormEvaluator::dot_sup(int mu, const Eigen::VectorXd& coeffs, int k_max) const {
  const TimeField u{0.0, {coeffs}};
  const Tables t = tabulate(u, mu, Piece::whole, sup_points_, k_max);
  double best = 0.0;
  for (int k = 0; k <= k_max; ++k) best = std::max(best, t.dotpow[k].cwiseAbs().maxCoeff());
  return best;
}

GradedNormReport NormEvaluator::report(const TimeField& u, int n_max) const {
  GradedNormReport rep;
  rep.time_slices = static_cast<int>(u.slices.size());
  rep.dt = u.dt;
  rep.horizon = horizon(u);
  const int m = rep.time_slices;
  std::vector<double> sup_by(static_cast<std::size_t>(n_max) + 1, 0.0), l2_by(sup_by);
  for (int mu = 0; mu < 2; ++mu) {
    const Piece piece = mu == 0 ? Piece::inner : Piece::outer;
    const Tables ts = tabulate(u, mu, piece, sup_points_, 2 * n_max);
    const Tables tq = tabulate(u, mu, piece, rule_[mu].nodes, 2 * n_max);
    const Eigen::Map<const Eigen::VectorXd> w(rule_[mu].weights.data(),
                                              static_cast<Eigen::Index>(rule_[mu].size()));
    for (int j = 0; j <= n_max; ++j) {
      const std::vector<int> rows = interior_rows(m, 2 * j, 2 * n_max + 2);
      for (int k = 0; j + k <= n_max; ++k) {
        GradedNormEntry e{mu, j, k};
        e.sup_value = time_derivative(ts.delta[k], 2 * j, 2 * n_max + 2, u.dt, rows).cwiseAbs().maxCoeff();
        const Eigen::VectorXd sq =
            time_derivative(tq.delta[k], 2 * j, 2 * n_max + 2, u.dt, all_rows(m)).cwiseAbs2() * w;
        e.l2_value = u.is_static() ? rep.horizon * sq[0] : trapezoid(sq, u.dt);
        rep.table.push_back(e);
        for (int n = j + k; n <= n_max; ++n) {
          sup_by[n] = std::max(sup_by[n], e.sup_value);
          l2_by[n] += e.l2_value;
        }
      }
    }
  }
  for (int n = 0; n <= n_max; ++n) {
    rep.inf.push_back(sup_by[n]);
    rep.two.push_back(std::sqrt(l2_by[n]));
  }
  return rep;
}

}  // namespace starwave
