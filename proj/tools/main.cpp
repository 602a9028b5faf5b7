#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>

#include "CLI11.hpp"
#include "csv.hpp"
#include "run_config.hpp"
#include "starwave/acceptance.hpp"
#include "starwave/bessel_transform.hpp"
#include "starwave/errors.hpp"
#include "starwave/linearized.hpp"
#include "starwave/nonlinear.hpp"
#include "starwave/norms.hpp"
#include "starwave/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace starwave;
using namespace starwave::cli;

namespace {

struct Context {
  RunConfig cfg;
  std::string hash;
  fs::path out;
  std::string command;

  CsvFile csv(const std::string& file, const std::vector<std::string>& columns) const {
    spdlog::info("writing {}", (out / file).string());
    return CsvFile(out / file, hash, command, columns);
  }
  void write_json(const std::string& file, json j) const {
    j["config_hash"] = hash;
    j["command"] = command;
    std::ofstream f(out / file);
    if (!f) throw NumericalError("cannot write " + (out / file).string());
    f << j.dump(2) << "\n";
  }
};

// One-line verdict of a subcommand.
struct Verdict {
  bool pass = false;
  std::string summary;
};

json trace_json(const NewtonTrace& t) {
  return {{"iterations", t.iterations}, {"residual", t.residual}, {"step_norm", t.step_norm},
          {"theta", t.theta},           {"factor", t.factor}};
}

Verdict run_spectrum(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  const CoefficientFns coeffs = c.make_model().coeffs;
  const auto pairs = solve_eigen(disc, coeffs, c.n_eig);
  const bool closed_form = c.ell1.empty() && c.L0.empty();
  CsvFile eig = ctx.csv("eig.csv", {"index", "lambda", "lambda_closed_form", "residual", "phi_at_0", "phi_at_1"});
  double worst = 0.0;
  for (const auto& p : pairs) {
    const int n = p.index - 1;
    const double exact = closed_form ? n * (n + 0.5 * (c.N + 3.0)) : std::nan("");
    double c0 = std::nan(""), c1 = std::nan("");
    try {
      const BoundaryConstants b = boundary_constants(disc, p);
      c0 = b.c0;
      c1 = b.c1;
    } catch (const NumericalError& e) {
      spdlog::warn("eigenfunction {}: {}", p.index, e.what());
    }
    eig.row({std::to_string(p.index), num(p.lambda), num(exact), num(p.residual), num(c0), num(c1)});
    if (closed_form) worst = std::max(worst, std::abs(p.lambda - exact) / std::max(1.0, exact));
  }
  const double half_pi = std::numbers::pi / 2;
  const double right_limit = (c.N - 1.0) * (c.N - 3.0) / 4.0;
  CsvFile lv = ctx.csv("liouville.csv", {"distance", "x", "xi", "q", "scaled", "limit"});
  double dev = 0.0;
  for (double d : c.q_points) {
    const double xl = d, xr = 1.0 - d;
    const double ql = liouville_potential(coeffs, xl), qr = liouville_potential(coeffs, xr);
    const double sl = std::pow(liouville_xi(xl) + half_pi, 2) * ql;
    const double sr = std::pow(half_pi - liouville_xi(xr), 2) * qr;
    lv.row({num(d), num(xl), num(liouville_xi(xl)), num(ql), num(sl), num(2.0)});
    lv.row({num(d), num(xr), num(liouville_xi(xr)), num(qr), num(sr), num(right_limit)});
    if (d == *std::min_element(c.q_points.begin(), c.q_points.end()))
      dev = std::max(std::abs(sl / 2.0 - 1.0), std::abs(sr / right_limit - 1.0));
  }
  const bool pass = worst < 1e-8 && dev < 0.01;
  return {pass, "spectrum: " + std::to_string(pairs.size()) + " eigenpairs, lambda_2 = " + num(pairs.size() > 1 ? pairs[1].lambda : 0.0) +
                    (closed_form ? ", closed-form error " + num(worst) : "") + ", asymptote deviation " + num(dev)};
}

Verdict run_transform(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  std::mt19937_64 rng(c.seed);
  std::vector<double> xi;
  for (double v = 0.05; v < 60.0; v *= 1.4) xi.push_back(v);
  CsvFile out = ctx.csv("transform.csv", {"bump", "radius", "sharpness", "diag_error", "involution_error", "xi_cutoff"});
  double diag_all = 0.0, inv_all = 0.0;
  for (int b = 0; b < c.bumps; ++b) {
    const SmoothBump u = random_bump(rng);
    const auto fu = forward_F([&](double x) { return u.value(x); }, u.radius, xi, c.N);
    const auto fd = forward_F([&](double x) { return u.minus_delta(x, c.N); }, u.radius, xi, c.N);
    double diag = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
      if (std::abs(fu[i]) > 1e-8) diag = std::max(diag, std::abs(fd[i] / fu[i] / (4.0 * xi[i]) - 1.0));
    const InvolutionResult r = involution_check([&](double x) { return u.value(x); }, u.radius, c.N);
    out.row({std::to_string(b), num(u.radius), num(u.sharpness), num(diag), num(r.relative_error), num(r.xi_cutoff)});
    diag_all = std::max(diag_all, diag);
    inv_all = std::max(inv_all, r.relative_error);
    spdlog::debug("bump {}: diag {} involution {}", b, diag, r.relative_error);
  }
  return {diag_all < 1e-6 && inv_all < 1e-5,
          "transform-check: diagonalization " + num(diag_all) + ", involution " + num(inv_all)};
}

Verdict run_norms(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  std::mt19937_64 rng(c.seed);
  const Eigen::VectorXd a = random_shape(rng, 1.0).project(disc), b = random_shape(rng, 1.0).project(disc);
  TimeField u;
  u.dt = c.T / c.norm_slices;
  for (int s = 0; s <= c.norm_slices; ++s) {
    const double t = s * u.dt;
    u.slices.push_back(std::cos(t) * a + std::sin(2 * t) * b);
  }
  NormOptions no;
  no.horizon = c.T;
  const NormEvaluator ev(disc, no);
  const GradedNormReport rep = ev.report(u, c.norm_max);
  CsvFile table = ctx.csv("norms_table.csv", {"mu", "j", "k", "sup_value", "l2_value"});
  for (const auto& e : rep.table)
    table.row({std::to_string(e.mu), std::to_string(e.j), std::to_string(e.k), num(e.sup_value), num(e.l2_value)});
  CsvFile comp = ctx.csv("norms.csv", {"n", "inf_norm", "two_norm"});
  bool monotone = true;
  for (std::size_t n = 0; n < rep.inf.size(); ++n) {
    comp.row({std::to_string(n), num(rep.inf[n]), num(rep.two[n])});
    if (n > 0) monotone = monotone && rep.inf[n] >= rep.inf[n - 1] && rep.two[n] >= rep.two[n - 1];
  }
  return {monotone, "norms: graded report up to n = " + std::to_string(c.norm_max) + ", top inf-norm " +
                        num(rep.inf.back()) + (monotone ? "" : ", NOT monotone")};
}

Verdict run_linear(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  const ModelSpec model = c.make_model();
  std::mt19937_64 rng(c.seed);
  const StatePair bg = random_background(rng, c.background_amplitude).sample(disc, c.dt(), c.steps);
  const ForcingFn g = random_forcing(rng).bind(disc);
  const StatePair sol =
      solve_linear_ivp(disc, model, bg, g, Eigen::VectorXd::Zero(2 * disc.size()), {c.dt(), c.steps, c.cfl});
  const EnergyReport rep = energy_audit(disc, model, bg, sol, g);
  CsvFile out = ctx.csv("linear.csv", {"t", "energy", "half_dE", "beta1", "beta2", "beta3", "beta4", "beta5", "rhs",
                                       "residual"});
  for (std::size_t s = 0; s < rep.t.size(); ++s)
    out.row({num(rep.t[s]), num(rep.energy[s + 1]), num(rep.half_dE[s]), num(rep.beta[0][s]), num(rep.beta[1][s]),
             num(rep.beta[2][s]), num(rep.beta[3][s]), num(rep.beta[4][s]), num(rep.rhs[s]), num(rep.residual[s])});
  const double rel = rep.max_residual / rep.max_term;
  ctx.write_json("linear_summary.json", {{"max_residual", rep.max_residual},
                                         {"max_term", rep.max_term},
                                         {"relative_residual", rel},
                                         {"final_energy", rep.energy.back()}});
  return {rel < 1e-7, "linear: energy identity residual / max term = " + num(rel)};
}

Verdict run_evolve(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  const ModelSpec model = c.make_model();
  std::mt19937_64 rng(c.seed);
  const Eigen::VectorXd y0 = random_shape(rng, c.evolve_amplitude).project(disc);
  const Eigen::VectorXd v0 = random_shape(rng, c.evolve_amplitude).project(disc);
  EvolveOptions eo;
  eo.dt = c.dt();
  eo.steps = c.steps;
  eo.cfl = c.cfl;
  const StatePair u = evolve_nonlinear(disc, model, y0, v0, eo);
  const StatePair r = full_residual(disc, model, u);
  const SupNorm sup(disc);
  CsvFile out = ctx.csv("evolve.csv", {"t", "sup_y", "sup_v", "residual"});
  double worst = 0.0;
  for (int s = 0; s <= c.steps; ++s) {
    double res = 0.0;
    if (s > 0) res = std::sqrt(r.h.slices[s - 1].squaredNorm() + r.k.slices[s - 1].squaredNorm());
    worst = std::max(worst, res);
    out.row({num(s * c.dt()), num(sup(u.h.slices[s])), num(sup(u.k.slices[s])), num(res)});
  }
  return {std::isfinite(worst) && worst < 1e-6, "evolve: " + std::to_string(c.steps) +
                                                    " midpoint steps, max step residual " + num(worst)};
}

Verdict run_periodic(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  PeriodicSetup s;
  s.mode = c.mode;
  s.theta0 = c.theta0;
  s.T = c.T;
  s.steps = c.steps;
  const PeriodicResult r = periodic_experiment(disc, c.make_model(), s, c.eps, c.newton);
  CsvFile out = ctx.csv("periodic.csv", {"eps", "error_y", "ratio_y", "error_v", "ratio_v", "iterations", "final_residual"});
  for (const auto& row : r.rows)
    out.row({num(row.eps), num(row.error_y), num(row.ratio_y), num(row.error_v), num(row.ratio_v),
             std::to_string(row.iterations), num(row.final_residual)});
  const bool fitted = r.rows.size() >= 2;
  ctx.write_json("periodic_summary.json",
                 {{"lambda", r.lambda}, {"slope_y", r.slope_y}, {"slope_v", r.slope_v}, {"fitted", fitted}});
  return {!fitted || std::abs(r.slope_y - 2.0) <= 0.2,
          "periodic: lambda = " + num(r.lambda) + ", slope " + num(r.slope_y) + " (target 2 +- 0.2)"};
}

Verdict run_cauchy(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Discretization disc(c.N, c.basis_size);
  std::mt19937_64 rng(c.seed);
  const Eigen::VectorXd psi0 = random_shape(rng, c.cauchy_amplitude).project(disc);
  const Eigen::VectorXd psi1 = random_shape(rng, c.cauchy_amplitude).project(disc);
  const CauchyResult r = cauchy_solve(disc, c.make_model(), psi0, psi1, c.T, c.steps, c.newton);
  const SupNorm sup(disc);
  CsvFile out = ctx.csv("cauchy.csv", {"t", "sup_y", "sup_v", "difference"});
  for (int s = 0; s <= c.steps; ++s) {
    const double d = std::max(sup(Eigen::VectorXd(r.newton.h.slices[s] - r.direct.h.slices[s])),
                              sup(Eigen::VectorXd(r.newton.k.slices[s] - r.direct.k.slices[s])));
    out.row({num(s * c.dt()), num(sup(r.newton.h.slices[s])), num(sup(r.newton.k.slices[s])), num(d)});
  }
  ctx.write_json("cauchy_trace.json", {{"trace", trace_json(r.trace)},
                                       {"discrepancy", r.discrepancy},
                                       {"initial_defect", r.initial_defect}});
  return {r.discrepancy < 1e-6 && r.initial_defect == 0.0,
          "cauchy: Newton vs direct discrepancy " + num(r.discrepancy) + " after " +
              std::to_string(r.trace.iterations) + " Newton iterations"};
}

Verdict run_assumptions(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  AssumptionOptions o;
  o.seed = c.seed;
  const AssumptionReport rep = check_assumptions(c.make_model(), o);
  CsvFile out = ctx.csv("assumptions.csv", {"name", "pass", "residual", "location", "detail"});
  std::string failed;
  for (const auto& it : rep.items) {
    out.row({it.name, it.pass ? "1" : "0", num(it.residual), num(it.location), quoted(it.detail)});
    if (!it.pass) failed += " " + it.name;
  }
  return {rep.all_pass(), "assumptions: model '" + c.model + "' " + (rep.all_pass() ? "satisfies B0-B3" : "violates" + failed)};
}

Verdict run_all(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  AcceptanceConfig a;
  a.n_param = c.N;
  a.basis = c.basis_size;
  a.T = c.T;
  a.steps = c.steps;
  a.seed = c.seed;
  int failed = 0;
  const auto results = run_acceptance(a, [&](const CriterionResult& r) {
    std::cout << summary_line(r) << std::endl;
    if (!r.pass) ++failed;
  });
  {
    std::ofstream f(ctx.out / "acceptance.csv");
    if (!f) throw NumericalError("cannot write acceptance.csv");
    f << "# config_hash=" << ctx.hash << " command=all\n" << results_csv(results);
  }
  return {failed == 0, "all: " + std::to_string(results.size() - failed) + " of " + std::to_string(results.size()) +
                           " criteria pass"};
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("starwave");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("STARWAVE_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Spectral lab for a singular nonlinear wave system"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  long long seed = -1;
  int threads = 1;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed for randomized suites (overrides the config)");
  app.add_option("--threads", threads, "worker threads (computations here are sequential)");

  const std::map<std::string, std::pair<std::string, std::function<Verdict(const Context&)>>> commands{
      {"spectrum", {"eigenvalue table and potential asymptotics", run_spectrum}},
      {"transform-check", {"transform identities on random bumps", run_transform}},
      {"norms", {"graded-norm report of a sample field", run_norms}},
      {"linear", {"linear IVP with energy audit", run_linear}},
      {"evolve", {"nonlinear evolution", run_evolve}},
      {"periodic", {"periodic-family scaling table", run_periodic}},
      {"cauchy", {"Cauchy problem by Newton and direct evolution", run_cauchy}},
      {"assumptions", {"B0-B3 report of the model", run_assumptions}},
      {"all", {"acceptance suite", run_all}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Context ctx;
    ctx.cfg = load_config(config_path);
    if (seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) ctx.cfg.output = out_dir;
    if (threads != 1) spdlog::info("--threads {} requested; running sequentially", threads);
    check_time_step(ctx.cfg);
    ctx.hash = config_hash(ctx.cfg);
    ctx.out = ctx.cfg.output;
    ctx.command = command;
    fs::create_directories(ctx.out);
    spdlog::info("{}: config hash {}", command, ctx.hash);
    const Verdict v = commands.at(command).second(ctx);
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.summary << std::endl;
    return v.pass ? 0 : 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << std::endl;
    return 2;
  }
}
