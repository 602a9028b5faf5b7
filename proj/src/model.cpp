#include "starwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "starwave/errors.hpp"

namespace starwave {

ModelSpec default_model(double n_param) {
  if (!(n_param > 4.0)) throw std::invalid_argument("default_model: N must exceed 4");
  ModelSpec m;
  m.name = "default";
  m.coeffs.n_param = n_param;
  m.J = [](double, double y, double) { return JEval{1.0 + y, 1.0, 0.0}; };
  m.H1 = [](double, double y, double, double) {
    const double inv = 1.0 / (1.0 + y);
    return H1Eval{inv, -inv * inv, 0.0, 0.0};
  };
  m.H2 = [](double x, double y, double z, double, double w) {
    const double s = 1.0 - x;
    return H2Eval{y * y + s * (z * z + w * w), 2.0 * y, 2.0 * s * z, 0.0, 2.0 * s * w};
  };
  return m;
}

ModelSpec variant_model_zJ(double n_param) {
  ModelSpec m = default_model(n_param);
  m.name = "variant_zJ";
  m.J = [](double x, double y, double z) { return JEval{1.0 + y + (1.0 - x) * z, 1.0, 1.0 - x}; };
  m.H1 = [](double x, double y, double z, double) {
    const double inv = 1.0 / (1.0 + y + (1.0 - x) * z);
    return H1Eval{inv, -inv * inv, -(1.0 - x) * inv * inv, 0.0};
  };
  return m;
}

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Value and the partials in (y, z, v, w).
struct PolyEval {
  double value = 0.0, dy = 0.0, dz = 0.0, dv = 0.0, dw = 0.0;
};

PolyEval eval_monomials(const std::vector<Monomial>& terms, double x, double y, double z, double v, double w) {
  PolyEval e;
  for (const Monomial& t : terms) {
    const double bx = t.coeff * ipow(x, t.px);
    const double fy = ipow(y, t.py), fz = ipow(z, t.pz), fv = ipow(v, t.pv), fw = ipow(w, t.pw);
    e.value += bx * fy * fz * fv * fw;
    if (t.py > 0) e.dy += bx * t.py * ipow(y, t.py - 1) * fz * fv * fw;
    if (t.pz > 0) e.dz += bx * fy * t.pz * ipow(z, t.pz - 1) * fv * fw;
    if (t.pv > 0) e.dv += bx * fy * fz * t.pv * ipow(v, t.pv - 1) * fw;
    if (t.pw > 0) e.dw += bx * fy * fz * fv * t.pw * ipow(w, t.pw - 1);
  }
  return e;
}

}  // namespace

ModelSpec polynomial_model(std::string name, std::vector<Monomial> j, std::vector<Monomial> h1,
                           std::vector<Monomial> h2, bool h1_inverse_j, CoefficientFns coeffs) {
  for (const Monomial& t : j)
    if (t.pv != 0 || t.pw != 0) throw std::invalid_argument("polynomial_model: J may depend on x, y, z only");
  for (const Monomial& t : h1)
    if (t.pw != 0) throw std::invalid_argument("polynomial_model: H1 may not depend on w");
  for (const auto* terms : {&j, &h1, &h2})
    for (const Monomial& t : *terms)
      if (t.px < 0 || t.py < 0 || t.pz < 0 || t.pv < 0 || t.pw < 0)
        throw std::invalid_argument("polynomial_model: negative exponent");
  ModelSpec m;
  m.name = std::move(name);
  m.coeffs = std::move(coeffs);
  m.J = [j](double x, double y, double z) {
    const PolyEval e = eval_monomials(j, x, y, z, 0.0, 0.0);
    return JEval{e.value, e.dy, e.dz};
  };
  if (h1_inverse_j) {
    m.H1 = [j](double x, double y, double z, double) {
      const PolyEval e = eval_monomials(j, x, y, z, 0.0, 0.0);
      const double inv = 1.0 / e.value;
      return H1Eval{inv, -e.dy * inv * inv, -e.dz * inv * inv, 0.0};
    };
  } else {
    m.H1 = [h1](double x, double y, double z, double v) {
      const PolyEval e = eval_monomials(h1, x, y, z, v, 0.0);
      return H1Eval{e.value, e.dy, e.dz, e.dv};
    };
  }
  m.H2 = [h2](double x, double y, double z, double v, double w) {
    const PolyEval e = eval_monomials(h2, x, y, z, v, w);
    return H2Eval{e.value, e.dy, e.dz, e.dv, e.dw};
  };
  return m;
}

ModelSpec named_model(const std::string& name, double n_param) {
  if (name == "default") return default_model(n_param);
  if (name == "variant_zJ") return variant_model_zJ(n_param);
  throw ConfigError("unknown model '" + name + "'");
}

bool AssumptionReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const AssumptionItem& i) { return i.pass; });
}

const AssumptionItem& AssumptionReport::item(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return i;
  throw std::out_of_range("no assumption item '" + name + "'");
}

namespace {

struct Sample {
  double y, yp, ypp, v, vp;
};

void require_finite(double v, const std::string& what, double x) {
  if (!std::isfinite(v))
    throw NumericalError(what + " not finite inside the U-box at x=" + std::to_string(x));
}

double l_apply(const CoefficientFns& c, double x, const Sample& s) {
  return -x * (1.0 - x) * s.ypp - lambda_drift(c.n_param, x) * s.yp + c.ell1(x) * x * (1.0 - x) * s.yp +
         c.L0(x) * s.y;
}

}  // namespace

AssumptionReport check_assumptions(const ModelSpec& model, const AssumptionOptions& opts) {
  AssumptionReport rep;
  const double n_param = model.coeffs.n_param;
  const double r = model.U_radius;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> box(-0.5 * r, 0.5 * r);
  std::vector<Sample> samples(static_cast<std::size_t>(opts.samples));
  for (Sample& s : samples) s = {box(rng), box(rng), box(rng), box(rng), box(rng)};
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(i / 200.0);

  {
    AssumptionItem b0;
    b0.name = "B0";
    b0.pass = n_param > 4.0;
    b0.residual = b0.pass ? 0.0 : 4.0 - n_param;
    b0.detail = "N = " + std::to_string(n_param);
    rep.items.push_back(b0);
  }

  {
    // H2 in A^2: value and gradient vanish at the origin; quadratic decay along rays.
    AssumptionItem b1;
    b1.name = "B1";
    double worst = 0.0, at = 0.0, ray = 0.0;
    for (double x : grid) {
      const H2Eval h = model.H2(x, 0.0, 0.0, 0.0, 0.0);
      const double res = std::abs(h.value) + std::abs(h.dy) + std::abs(h.dz) + std::abs(h.dv) + std::abs(h.dw);
      require_finite(res, "H2", x);
      if (res > worst) {
        worst = res;
        at = x;
      }
      for (const Sample& s : samples) {
        const JEval j = model.J(x, s.y, x * s.yp);
        const H1Eval h1 = model.H1(x, s.y, x * s.yp, s.v);
        const H2Eval h2 = model.H2(x, s.y, x * s.yp, s.v, x * s.vp);
        require_finite(j.value + j.dy + j.dz, "J", x);
        require_finite(h1.value + h1.dy + h1.dz + h1.dv, "H1", x);
        require_finite(h2.value + h2.dy + h2.dz + h2.dv + h2.dw, "H2", x);
      }
    }
    for (double x : {0.0, 0.5, 1.0}) {
      for (const Sample& s : samples) {
        const double p2 = s.y * s.y + s.yp * s.yp + s.v * s.v + s.vp * s.vp;
        if (p2 == 0.0) continue;
        for (double t : {1e-1, 1e-2}) {
          const double h = model.H2(x, t * s.y, t * x * s.yp, t * s.v, t * x * s.vp).value;
          ray = std::max(ray, std::abs(h) / (t * t * p2));
        }
      }
    }
    b1.residual = worst;
    b1.location = at;
    b1.pass = worst <= opts.tol && std::isfinite(ray);
    b1.detail = "max |H2|/|p|^2 on rays = " + std::to_string(ray);
    rep.items.push_back(b1);
  }

  {
    AssumptionItem b2;
    b2.name = "B2";
    double worst = 0.0, at = 0.0, jmin = INFINITY, jmax = -INFINITY;
    for (double x : grid) {
      const double j = model.J(x, 0.0, 0.0).value;
      const double h = model.H1(x, 0.0, 0.0, 0.0).value;
      require_finite(j + h, "J, H1", x);
      jmin = std::min(jmin, j);
      jmax = std::max(jmax, j);
      const double res = std::abs(h - 1.0 / j);
      if (res > worst) {
        worst = res;
        at = x;
      }
    }
    b2.residual = worst;
    b2.location = at;
    b2.pass = worst <= opts.tol && jmin > 0.0;
    std::ostringstream os;
    os << "J(x,0,0) in [" << jmin << ", " << jmax << "]";
    b2.detail = os.str();
    rep.items.push_back(b2);
  }

  {
    // f / (1-x) must stay bounded as x -> 1 for f = dzJ, (dzH1) L y + dzH2, dwH2.
    AssumptionItem b3;
    b3.name = "B3";
    const double xs[3] = {0.9, 0.99, 0.999};
    const char* names[3] = {"dzJ", "dzH1*Ly+dzH2", "dwH2"};
    double ratio[3][3] = {};
    for (int q = 0; q < 3; ++q) {
      const double x = xs[q];
      for (const Sample& s : samples) {
        const double z = x * s.yp, w = x * s.vp;
        const JEval j = model.J(x, s.y, z);
        const H1Eval h1 = model.H1(x, s.y, z, s.v);
        const H2Eval h2 = model.H2(x, s.y, z, s.v, w);
        const double f[3] = {j.dz, h1.dz * l_apply(model.coeffs, x, s) + h2.dz, h2.dw};
        for (int k = 0; k < 3; ++k) ratio[k][q] = std::max(ratio[k][q], std::abs(f[k]) / (1.0 - x));
      }
    }
    bool ok = true;
    double worst = 0.0;
    std::ostringstream os;
    for (int k = 0; k < 3; ++k) {
      const bool grows = ratio[k][2] > opts.growth_limit * ratio[k][0] + opts.tol;
      if (grows) ok = false;
      worst = std::max(worst, grows ? ratio[k][2] : 0.0);
      os << names[k] << "/(1-x): " << ratio[k][0] << ", " << ratio[k][1] << ", " << ratio[k][2]
         << (grows ? " (unbounded)" : "") << "; ";
    }
    b3.pass = ok;
    b3.residual = worst;
    b3.location = ok ? 0.0 : xs[2];
    b3.detail = os.str();
    rep.items.push_back(b3);
  }

  {
    AssumptionItem fd;
    fd.name = "derivatives";
    const double h = 1e-6;
    double worst = 0.0, at = 0.0;
    auto note = [&](double analytic, double numeric, double x) {
      const double e = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
      if (e > worst) {
        worst = e;
        at = x;
      }
    };
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (std::size_t i = 0; i < std::min<std::size_t>(samples.size(), 16); ++i) {
        const Sample& s = samples[i];
        const double y = s.y, z = x * s.yp, v = s.v, w = x * s.vp;
        const JEval j = model.J(x, y, z);
        note(j.dy, (model.J(x, y + h, z).value - model.J(x, y - h, z).value) / (2 * h), x);
        note(j.dz, (model.J(x, y, z + h).value - model.J(x, y, z - h).value) / (2 * h), x);
        const H1Eval a = model.H1(x, y, z, v);
        note(a.dy, (model.H1(x, y + h, z, v).value - model.H1(x, y - h, z, v).value) / (2 * h), x);
        note(a.dz, (model.H1(x, y, z + h, v).value - model.H1(x, y, z - h, v).value) / (2 * h), x);
        note(a.dv, (model.H1(x, y, z, v + h).value - model.H1(x, y, z, v - h).value) / (2 * h), x);
        const H2Eval b = model.H2(x, y, z, v, w);
        note(b.dy, (model.H2(x, y + h, z, v, w).value - model.H2(x, y - h, z, v, w).value) / (2 * h), x);
        note(b.dz, (model.H2(x, y, z + h, v, w).value - model.H2(x, y, z - h, v, w).value) / (2 * h), x);
        note(b.dv, (model.H2(x, y, z, v + h, w).value - model.H2(x, y, z, v - h, w).value) / (2 * h), x);
        note(b.dw, (model.H2(x, y, z, v, w + h).value - model.H2(x, y, z, v, w - h).value) / (2 * h), x);
      }
    }
    fd.residual = worst;
    fd.location = at;
    fd.pass = worst <= opts.fd_tol;
    fd.detail = "max relative mismatch of analytic partials vs central differences";
    rep.items.push_back(fd);
  }
  return rep;
}

}  // namespace starwave
