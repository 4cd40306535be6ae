// fracflow: config-driven solvers for linear fractional differential
// equations of Caputo / Riemann-Liouville type and their jump-kernel
// generalizations. See README.md for the config schema.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fracflow/config.hpp"
#include "fracflow/csv.hpp"
#include "fracflow/parallel.hpp"
#include "fracflow/paths.hpp"
#include "fracflow/quadrature.hpp"
#include "fracflow/solve_mc.hpp"
#include "fracflow/solve_quad.hpp"
#include "fracflow/special.hpp"
#include "fracflow/stable.hpp"
#include "fracflow/validation.hpp"

namespace {

using namespace fracflow;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

// horizon-exhausted paths beyond this fraction turn a run into a numerical
// failure rather than a silently biased answer
constexpr double kTruncationThreshold = 0.2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void deliver(const std::string& contents, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(contents.c_str(), stdout);
  } else {
    write_file(out_path, contents);
  }
}

int emit_curve(const SolutionCurve& curve, const std::string& out_path,
               bool method_column, bool report) {
  deliver(solution_curve_csv(curve, method_column), out_path);
  if (report) {
    for (const auto& w : curve.warnings)
      std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  double worst_trunc = 0.0;
  for (const auto& pt : curve.points)
    worst_trunc = std::max(worst_trunc, pt.truncated_fraction);
  if (worst_trunc > kTruncationThreshold) {
    std::fprintf(stderr,
                 "error: %.1f%% of paths exhausted the horizon; result "
                 "unreliable\n",
                 100.0 * worst_trunc);
    return kExitNumerical;
  }
  return kExitOk;
}

int run_solve(OperatorKind kind, const std::string& config_path,
              const std::string& out_flag, int workers) {
  RunConfig rc = parse_run_config(read_file(config_path), kind);
  if (workers > 0) rc.mc.workers = workers;
  const std::string out = out_flag.empty() ? rc.output : out_flag;

  SolutionCurve curve;
  if (kind == OperatorKind::mixed) {
    if (rc.method == Method::mc) {
      curve = solve_mixed_mc(rc.problem, rc.grid.points2d, rc.mc);
    } else {
      curve = solve_mixed_quad(rc.beta, rc.beta2, rc.problem.lambda,
                               rc.problem.g2, rc.problem.phi,
                               rc.grid.points2d);
    }
  } else {
    switch (rc.method) {
      case Method::mc:
        curve = (kind == OperatorKind::caputo)
                    ? solve_caputo_mc(rc.problem, rc.grid.points, rc.mc)
                    : solve_rl_mc(rc.problem, rc.grid.points, rc.mc);
        break;
      case Method::quad: {
        auto g = rc.problem.g ? rc.problem.g : [](double) { return 0.0; };
        curve = (kind == OperatorKind::caputo)
                    ? solve_caputo_quad(rc.beta, rc.problem.lambda, g,
                                        rc.problem.u_a, rc.problem.a,
                                        rc.grid.points,
                                        rc.problem.g_breakpoints)
                    : solve_rl_quad(rc.beta, rc.problem.lambda, g,
                                    rc.problem.a, rc.grid.points,
                                    rc.problem.g_breakpoints);
        break;
      }
      case Method::closed_form: {
        auto g = rc.problem.g ? rc.problem.g : [](double) { return 0.0; };
        // the rl problem is the same closed form with zero boundary value
        const double u_a =
            (kind == OperatorKind::caputo) ? rc.problem.u_a : 0.0;
        curve = solve_caputo_closed_form(rc.beta, rc.problem.lambda, g, u_a,
                                         rc.problem.a, rc.grid.points,
                                         rc.problem.g_breakpoints);
        break;
      }
    }
  }
  return emit_curve(curve, out, rc.method != Method::mc, rc.report);
}

int run_ml(const std::string& config_path, const std::string& out_flag) {
  MlConfig mc = parse_ml_config(read_file(config_path));
  std::vector<std::vector<double>> rows;
  for (double z : mc.grid) {
    const double v = (mc.beta2 > 0.0) ? mittag_leffler2(mc.beta, mc.beta2, z)
                                      : mittag_leffler(mc.beta, z);
    rows.push_back({z, v});
  }
  deliver(table_csv({"z", "value"}, rows),
          out_flag.empty() ? mc.output : out_flag);
  return kExitOk;
}

int run_density(const std::string& config_path, const std::string& out_flag) {
  DensityConfig dc = parse_density_config(read_file(config_path));
  StableParams p(dc.beta);
  std::vector<std::vector<double>> rows;
  for (double x : dc.grid)
    rows.push_back({x, stable_density(p, x), stable_cdf(p, x)});
  deliver(table_csv({"x", "pdf", "cdf"}, rows),
          out_flag.empty() ? dc.output : out_flag);
  return kExitOk;
}

int run_exit_law(const std::string& config_path, const std::string& out_flag,
                 int workers) {
  ExitLawConfig ec = parse_exit_law_config(read_file(config_path));
  if (workers > 0) ec.mc.workers = workers;
  const std::string out = out_flag.empty() ? ec.output : out_flag;
  if (ec.kernel_beta > 0.0) {
    // constant order: density table plus the transform value
    const double lap =
        laplace_exit_quad(ec.kernel_beta, ec.lambda, ec.t, ec.a);
    std::vector<std::vector<double>> rows;
    for (double s : ec.grid)
      rows.push_back(
          {s, exit_time_density_stable(ec.kernel_beta, ec.t, ec.a, s), lap});
    deliver(table_csv({"s", "density", "laplace_at_lambda"}, rows), out);
    return kExitOk;
  }
  // general kernel: Monte Carlo exit samples
  std::vector<std::string> warnings;
  const double horizon =
      ec.mc.horizon_override > 0.0
          ? ec.mc.horizon_override
          : horizon_policy(ec.kernel, ec.lambda, ec.a,
                           std::max(ec.t, ec.a + 1.0), &warnings);
  std::vector<std::vector<double>> rows;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < ec.mc.n_paths; ++i) {
    PathRng rng(ec.mc.master_seed, i);
    SimOptions opt;
    opt.ds = ec.mc.ds;
    opt.horizon = horizon;
    opt.eps_cut = ec.mc.eps_cut_frac * (std::max(ec.t, ec.a + 1.0) - ec.a);
    auto sample = simulate_path(ec.kernel, ec.t, ec.a, opt, rng);
    if (!sample.exited) ++truncated;
    rows.push_back({static_cast<double>(i), sample.exit_time});
  }
  deliver(table_csv({"path_id", "tau"}, rows), out);
  for (const auto& w : warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (truncated >
      kTruncationThreshold * static_cast<double>(ec.mc.n_paths)) {
    std::fprintf(stderr, "error: horizon exhausted on %zu paths\n",
                 truncated);
    return kExitNumerical;
  }
  return kExitOk;
}

int run_validate(const std::string& config_path, const std::string& out_flag,
                 int workers) {
  ValidateConfig vc;
  if (!config_path.empty()) vc = parse_validate_config(read_file(config_path));
  BatteryConfig bc;
  bc.n_paths = vc.n_paths;
  bc.ds = vc.ds;
  bc.master_seed = vc.master_seed;
  bc.full = !vc.quick;
  if (workers > 0) bc.workers = workers;
  auto results = run_battery(bc);
  deliver(render_report(results), out_flag.empty() ? vc.output : out_flag);
  return all_pass(results) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracflow: probabilistic and quadrature solvers for linear "
               "fractional differential equations"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int workers = 0;

  auto add_common = [&](CLI::App* sub, bool config_required = true) {
    auto* copt =
        sub->add_option("--config", config_path, "JSON configuration file");
    if (config_required) copt->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--workers", workers,
                    "worker-thread cap (results are unaffected)");
  };

  auto* caputo =
      app.add_subcommand("solve-caputo", "solve the Caputo-type problem");
  add_common(caputo);
  auto* rl = app.add_subcommand("solve-rl",
                                "solve the Riemann-Liouville-type problem");
  add_common(rl);
  auto* mixed =
      app.add_subcommand("solve-mixed", "solve the mixed 2-d problem");
  add_common(mixed);
  auto* exitlaw =
      app.add_subcommand("exit-law", "exit-time density table or samples");
  add_common(exitlaw);
  auto* ml = app.add_subcommand("ml", "Mittag-Leffler evaluation table");
  add_common(ml);
  auto* density =
      app.add_subcommand("density", "one-sided stable density/cdf table");
  add_common(density);
  auto* validate = app.add_subcommand(
      "validate", "run the cross-engine validation battery");
  add_common(validate, /*config_required=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(caputo))
      return run_solve(OperatorKind::caputo, config_path, out_path, workers);
    if (app.got_subcommand(rl))
      return run_solve(OperatorKind::rl, config_path, out_path, workers);
    if (app.got_subcommand(mixed))
      return run_solve(OperatorKind::mixed, config_path, out_path, workers);
    if (app.got_subcommand(ml)) return run_ml(config_path, out_path);
    if (app.got_subcommand(density)) return run_density(config_path, out_path);
    if (app.got_subcommand(exitlaw))
      return run_exit_law(config_path, out_path, workers);
    if (app.got_subcommand(validate))
      return run_validate(config_path, out_path, workers);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const QuadratureError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::overflow_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
