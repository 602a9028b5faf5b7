#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "starwave/errors.hpp"
#include "starwave/linearized.hpp"

namespace starwave::cli {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const char* known_keys[] = {"N", "basis_size", "T", "steps", "dt", "model", "ell1", "L0", "seed", "output", "cfl",
                            "spectrum", "transform", "norms", "linear", "evolve", "periodic", "cauchy", "newton"};

}  // namespace

ModelSpec RunConfig::make_model() const {
  ModelSpec m = named_model(model, N);
  m.coeffs.ell1 = Polynomial(ell1);
  m.coeffs.L0 = Polynomial(L0);
  m.coeffs.n_param = N;
  return m;
}

json RunConfig::to_json() const {
  json j;
  j["N"] = N;
  j["basis_size"] = basis_size;
  j["T"] = T;
  j["steps"] = steps;
  j["model"] = model;
  j["ell1"] = ell1;
  j["L0"] = L0;
  j["seed"] = seed;
  j["output"] = output;
  j["cfl"] = cfl;
  j["spectrum"] = {{"n_eig", n_eig}, {"q_points", q_points}};
  j["transform"] = {{"bumps", bumps}};
  j["norms"] = {{"n_max", norm_max}, {"slices", norm_slices}};
  j["linear"] = {{"amplitude", background_amplitude}};
  j["evolve"] = {{"amplitude", evolve_amplitude}};
  j["periodic"] = {{"mode", mode}, {"theta0", theta0}, {"eps", eps}};
  j["cauchy"] = {{"amplitude", cauchy_amplitude}};
  j["newton"] = {{"max_iter", newton.max_iter}, {"tol", newton.tol},   {"nash_moser", newton.nash_moser},
                 {"theta0", newton.theta0},     {"rho", newton.rho},   {"max_halvings", newton.max_halvings}};
  return j;
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known_keys) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c;
  read(j, "N", c.N);
  read(j, "basis_size", c.basis_size);
  read(j, "T", c.T);
  read(j, "steps", c.steps);
  read(j, "model", c.model);
  read(j, "ell1", c.ell1);
  read(j, "L0", c.L0);
  read(j, "seed", c.seed);
  read(j, "output", c.output);
  read(j, "cfl", c.cfl);
  if (j.contains("dt")) {
    double dt = 0.0;
    read(j, "dt", dt);
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    c.steps = static_cast<int>(std::lround(c.T / dt));
    if (c.steps < 1 || std::abs(c.steps * dt - c.T) > 1e-9 * c.T)
      throw ConfigError("T must be an integer multiple of dt");
  }
  auto section = [&](const char* name) { return j.contains(name) ? j.at(name) : json::object(); };
  read(section("spectrum"), "n_eig", c.n_eig);
  read(section("spectrum"), "q_points", c.q_points);
  read(section("transform"), "bumps", c.bumps);
  read(section("norms"), "n_max", c.norm_max);
  read(section("norms"), "slices", c.norm_slices);
  read(section("linear"), "amplitude", c.background_amplitude);
  read(section("evolve"), "amplitude", c.evolve_amplitude);
  read(section("periodic"), "mode", c.mode);
  read(section("periodic"), "theta0", c.theta0);
  read(section("periodic"), "eps", c.eps);
  read(section("cauchy"), "amplitude", c.cauchy_amplitude);
  const json nw = section("newton");
  read(nw, "max_iter", c.newton.max_iter);
  read(nw, "tol", c.newton.tol);
  read(nw, "nash_moser", c.newton.nash_moser);
  read(nw, "theta0", c.newton.theta0);
  read(nw, "rho", c.newton.rho);
  read(nw, "max_halvings", c.newton.max_halvings);

  if (!(c.N > 4.0)) throw ConfigError("N must exceed 4 (got " + std::to_string(c.N) + ")");
  if (c.basis_size < 4) throw ConfigError("basis_size must be at least 4");
  if (!(c.T > 0.0) || c.steps < 1) throw ConfigError("T and steps must be positive");
  if (!section("spectrum").contains("n_eig")) c.n_eig = std::min(c.n_eig, c.basis_size / 4);
  if (c.n_eig < 1 || 4 * c.n_eig > c.basis_size) throw ConfigError("spectrum.n_eig must satisfy 4 n_eig <= basis_size");
  if (c.mode < 1) throw ConfigError("periodic.mode starts at 1");
  if (c.q_points.empty()) c.q_points = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  c.newton.cfl = c.cfl;
  named_model(c.model, c.N);  // validates the name
  return c;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return from_json(json::object());
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string config_hash(const RunConfig& c) {
  // The output location does not change results, so it stays out of the hash.
  json j = c.to_json();
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void check_time_step(const RunConfig& c) {
  const Discretization disc(c.N, c.basis_size);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(disc.size());
  const double nu = max_frequency(disc, assemble_DP(disc, c.make_model(), z, z).fields);
  if (c.dt() * nu >= c.cfl)
    throw ConfigError("time step too large: dt sqrt(lambda_max) = " + std::to_string(c.dt() * nu) + " >= " +
                      std::to_string(c.cfl));
}

}  // namespace starwave::cli
