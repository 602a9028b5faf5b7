#pragma once

#include <functional>
#include <string>
#include <vector>

#include "starwave/operators.hpp"

namespace starwave {

// Values and first partials of the nonlinear coefficients. The arguments are
// y, z = x y_x, v, w = x v_x.
struct JEval {
  double value = 0.0, dy = 0.0, dz = 0.0;
};
struct H1Eval {
  double value = 0.0, dy = 0.0, dz = 0.0, dv = 0.0;
};
struct H2Eval {
  double value = 0.0, dy = 0.0, dz = 0.0, dv = 0.0, dw = 0.0;
};

/// One instance of y_t - J v = 0, v_t + H1 L y + H2 = 0.
struct ModelSpec {
  std::string name;
  std::function<JEval(double x, double y, double z)> J;
  std::function<H1Eval(double x, double y, double z, double v)> H1;
  std::function<H2Eval(double x, double y, double z, double v, double w)> H2;
  CoefficientFns coeffs;
  double U_radius = 0.1;
  double eps0 = 0.05;
};

/// J = 1 + y, H1 = 1/(1+y), H2 = y^2 + (1-x)(z^2 + w^2), ell1 = L0 = 0.
ModelSpec default_model(double n_param);
/// J = 1 + y + (1-x) z, H1 = 1/J, H2 as in the default model.
ModelSpec variant_model_zJ(double n_param);

/// c x^px y^py z^pz v^pv w^pw
struct Monomial {
  double coeff = 0.0;
  int px = 0, py = 0, pz = 0, pv = 0, pw = 0;
};

/// Model with polynomial J, H1, H2; when `h1_inverse_j` is set H1 = 1/J and
/// `h1` is ignored. Monomials of J may not involve v or w, those of H1 not w.
ModelSpec polynomial_model(std::string name, std::vector<Monomial> j, std::vector<Monomial> h1,
                           std::vector<Monomial> h2, bool h1_inverse_j, CoefficientFns coeffs);

/// Model selected by name: "default" or "variant_zJ".
ModelSpec named_model(const std::string& name, double n_param);

struct AssumptionItem {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double location = 0.0;  ///< x at which the worst residual occurred
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionItem> items;  ///< B0, B1, B2, B3, derivatives
  bool all_pass() const;
  const AssumptionItem& item(const std::string& name) const;
};

struct AssumptionOptions {
  int samples = 64;
  unsigned long long seed = 12345;
  double tol = 1e-12;
  double growth_limit = 3.0;  ///< allowed r(0.999)/r(0.9) for the B3 ratios
  double fd_tol = 1e-6;
};

/// Sampled checks of B0-B3 plus a finite-difference check of the partials.
/// Throws NumericalError when a function is not finite inside the U-box.
AssumptionReport check_assumptions(const ModelSpec& model, const AssumptionOptions& opts = {});

}  // namespace starwave
