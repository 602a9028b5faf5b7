#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "starwave/basis.hpp"
#include "starwave/linearized.hpp"
#include "starwave/model.hpp"

namespace starwave {

struct AcceptanceConfig {
  double n_param = 6.0;
  int basis = 64;
  double T = 1.0;
  int steps = 2000;
  std::uint64_t seed = 20240611;
  int bumps = 20;           ///< random bumps for the transform identities
  int ibp_instances = 100;  ///< random polynomial instances for the integration-by-parts identities
  int forcings = 20;        ///< forcings for the energy-bound constant
  int backgrounds = 3;      ///< random backgrounds for the energy identity
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double value = 0.0;      ///< measured quantity compared against `threshold`
  double threshold = 0.0;
  std::string detail;
};

/// Cubic x-profile scaled so that max(|p|, |x p'|) on a fixed grid equals amp.
struct SmoothShape {
  double c[4] = {0, 0, 0, 0};
  double operator()(double x) const { return c[0] + x * (c[1] + x * (c[2] + x * c[3])); }
  Eigen::VectorXd project(const Discretization& disc) const;
};
SmoothShape random_shape(std::mt19937_64& rng, double amp);

/// (y*, v*) = shapes times low-frequency time profiles, sampled on t_n = n dt.
struct SmoothBackground {
  SmoothShape y0, y1, v0, v1;
  StatePair sample(const Discretization& disc, double dt, int steps) const;
};
SmoothBackground random_background(std::mt19937_64& rng, double amp);

/// Forcing g = (a(x) cos(f1 t + p1), b(x) sin(f2 t + p2)).
struct SmoothForcing {
  SmoothShape a, b;
  double f1 = 1, p1 = 0, f2 = 1, p2 = 0;
  ForcingFn bind(const Discretization& disc) const;
};
SmoothForcing random_forcing(std::mt19937_64& rng);

/// Ratios max_t ||h(t)||_H / int_0^t ||g||_H of the zero-data linear IVP,
/// one per forcing, along a common background.
std::vector<double> energy_bound_constants(const Discretization& disc, const ModelSpec& model,
                                           const SmoothBackground& bg, const std::vector<SmoothForcing>& g,
                                           double T, int steps);

using CriterionFn = std::function<CriterionResult(const AcceptanceConfig&)>;

// Individual criteria; each is deterministic for a fixed config.
CriterionResult criterion_eigenvalues(const AcceptanceConfig& c);
CriterionResult criterion_potential(const AcceptanceConfig& c);
CriterionResult criterion_transform(const AcceptanceConfig& c);
CriterionResult criterion_ibp(const AcceptanceConfig& c);
CriterionResult criterion_energy_identity(const AcceptanceConfig& c);
CriterionResult criterion_energy_bound(const AcceptanceConfig& c);
CriterionResult criterion_periodic(const AcceptanceConfig& c);
CriterionResult criterion_cauchy(const AcceptanceConfig& c);
CriterionResult criterion_two_piece(const AcceptanceConfig& c);
CriterionResult criterion_assumptions(const AcceptanceConfig& c);

/// Criteria 1-10 in order.
std::vector<CriterionFn> acceptance_criteria();

/// CSV rows (id,name,pass,value,threshold,detail) with 17 significant digits.
std::string results_csv(const std::vector<CriterionResult>& r);

/// Runs criteria 1-10, then reruns them and compares the serialized results
/// byte for byte as criterion 11. `progress` is called after each criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& c,
                                            const std::function<void(const CriterionResult&)>& progress = {});

/// "PASS [id] name: value (threshold) detail" or the FAIL form.
std::string summary_line(const CriterionResult& r);

}  // namespace starwave
