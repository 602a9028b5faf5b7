#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "starwave/model.hpp"
#include "starwave/nonlinear.hpp"

namespace starwave::cli {

struct RunConfig {
  double N = 6.0;
  int basis_size = 64;
  double T = 1.0;
  int steps = 2000;  ///< dt = T / steps; a "dt" key overrides
  std::string model = "default";
  std::vector<double> ell1, L0;  ///< monomial coefficients
  std::uint64_t seed = 20240611;
  std::string output = "out";
  double cfl = 0.5;

  int n_eig = 11;
  std::vector<double> q_points;  ///< distances from the ends for the potential report
  int bumps = 3;
  int norm_max = 4;
  int norm_slices = 200;
  double background_amplitude = 0.01;
  double evolve_amplitude = 0.01;
  int mode = 1;
  double theta0 = 0.0;
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
  double cauchy_amplitude = 1e-3;
  NewtonOptions newton;

  double dt() const { return T / steps; }
  /// Model by name with the configured lower-order coefficients.
  ModelSpec make_model() const;
  /// Effective configuration, defaults included.
  nlohmann::json to_json() const;
};

/// Parses a JSON file; an empty path gives the defaults. Throws ConfigError
/// naming the path or the offending key.
RunConfig load_config(const std::string& path);
RunConfig from_json(const nlohmann::json& j);

/// FNV-1a of the canonical dump of the effective configuration (output
/// path excluded), as hex.
std::string config_hash(const RunConfig& c);

/// Rejects configurations whose time step violates dt sqrt(lambda_max) < cfl
/// at rest.
void check_time_step(const RunConfig& c);

}  // namespace starwave::cli
