// Command-line surface: solve | branch | certify | reproduce-figure.
// Exit codes: 0 success; 1 no solution found where one was requested;
// 2 configuration error; 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "minkbvp/certificates.hpp"
#include "minkbvp/config.hpp"
#include "minkbvp/continuation.hpp"
#include "minkbvp/csvio.hpp"
#include "minkbvp/figures.hpp"

namespace {

using namespace minkbvp;

struct CommonOpts {
  std::string config_path;
  double lambda_override = std::numeric_limits<double>::quiet_NaN();
  double kappa_override = std::numeric_limits<double>::quiet_NaN();
  std::string out_dir_override;
};

ProblemConfig load_config(const CommonOpts& opts) {
  ProblemConfig cfg = parse_config_file(opts.config_path);
  if (!std::isnan(opts.lambda_override)) {
    if (!(opts.lambda_override > 0.0)) throw config_error("--lambda must be positive");
    cfg.lambda = opts.lambda_override;
  }
  if (!std::isnan(opts.kappa_override)) {
    if (cfg.kind != NonlinearityKind::power_exp)
      throw config_error("--kappa only applies to the power_exp nonlinearity");
    if (!(opts.kappa_override > 0.0)) throw config_error("--kappa must be positive");
    cfg.kappa = opts.kappa_override;
  }
  if (!opts.out_dir_override.empty()) cfg.out_dir = opts.out_dir_override;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "problem configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--lambda", opts.lambda_override, "override the weight multiplier lambda");
  cmd->add_option("--kappa", opts.kappa_override,
                  "override the exponential rate kappa (power_exp only)");
  cmd->add_option("--out-dir", opts.out_dir_override, "override the output directory");
}

int cmd_solve(const CommonOpts& opts) {
  ProblemConfig cfg = load_config(opts);
  Problem p = make_problem(cfg);
  std::vector<Solution> sols;
  if (cfg.bc == BoundaryCondition::neumann) {
    sols = solve_neumann(p, make_scan_range(cfg));
  } else {
    sols = solve_periodic(p);
  }
  ensure_directory(cfg.out_dir);
  std::string table = (std::filesystem::path(cfg.out_dir) / "solutions.csv").string();
  write_solutions_csv(table, sols);
  std::cout << "solutions = " << sols.size() << "\n";
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const Solution& s = sols[i];
    char name[32];
    std::snprintf(name, sizeof name, "solution_%02zu.csv", i);
    std::string tpath = (std::filesystem::path(cfg.out_dir) / name).string();
    write_trajectory_csv(tpath, s.trajectory, cfg.grid_points);
    std::cout << "solution " << i << ": u0 = " << csv_num(s.u0()) << ", v0 = " << csv_num(s.v0())
              << ", sup_norm = " << csv_num(s.sup_norm)
              << ", bc_residual = " << csv_num(s.certificate.bc_residual)
              << ", weak_residual = " << csv_num(s.certificate.weak_residual) << "\n";
  }
  std::cout << "wrote " << table << "\n";
  return sols.empty() ? 1 : 0;
}

struct BranchOpts {
  std::string param = "lambda";
  double start = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;
  int direction = -1;
  int root_index = 0;
  std::vector<double> marks;
};

int cmd_branch(const CommonOpts& opts, const BranchOpts& bopts) {
  ProblemConfig cfg = load_config(opts);
  if (cfg.bc != BoundaryCondition::neumann)
    throw config_error("branch tracing works on the neumann problem");
  BranchParam which;
  if (bopts.param == "lambda")
    which = BranchParam::lambda;
  else if (bopts.param == "kappa")
    which = BranchParam::kappa;
  else
    throw config_error("--param must be lambda or kappa");
  if (which == BranchParam::kappa && cfg.kind != NonlinearityKind::power_exp)
    throw config_error("--param kappa needs the power_exp nonlinearity");

  ProblemConfig start_cfg = cfg;
  if (which == BranchParam::lambda)
    start_cfg.lambda = bopts.start;
  else
    start_cfg.kappa = bopts.start;
  Problem at_start = make_problem(start_cfg);
  auto sols = solve_neumann(at_start, make_scan_range(start_cfg));
  if (sols.empty()) {
    std::cerr << "no solution found at the start parameter " << csv_num(bopts.start) << "\n";
    return 1;
  }
  std::size_t idx = static_cast<std::size_t>(
      std::min<long>(std::max(0, bopts.root_index), static_cast<long>(sols.size()) - 1));

  Problem base = make_problem(cfg);
  TraceOptions topt;
  topt.step = cfg.branch_step;
  topt.sup_ceiling = cfg.sup_ceiling;
  topt.marks = bopts.marks;
  Branch br = trace_branch(base, which, bopts.start, sols[idx],
                           {bopts.range_min, bopts.range_max}, bopts.direction, topt);

  ensure_directory(cfg.out_dir);
  std::string path = (std::filesystem::path(cfg.out_dir) / "branch.csv").string();
  write_branch_csv(path, br);
  std::cout << "points = " << br.points.size() << "\ntermination = " << br.termination
            << "\nfolds = " << br.folds.size() << "\n";
  for (const Fold& f : br.folds)
    std::cout << "fold: param = " << csv_num(f.param) << ", u0 = " << csv_num(f.u0) << "\n";
  std::cout << "wrote " << path << "\n";
  return br.points.size() > 1 ? 0 : 1;
}

int cmd_certify(const CommonOpts& opts, bool as_json) {
  ProblemConfig cfg = load_config(opts);
  Problem p = make_problem(cfg);

  // A first solve supplies the sup-norm that scales the small-amplitude
  // probe radius; certification proceeds without it if nothing is found.
  double first_sup = std::numeric_limits<double>::quiet_NaN();
  std::vector<Solution> sols;
  try {
    sols = cfg.bc == BoundaryCondition::neumann ? solve_neumann(p, make_scan_range(cfg))
                                                : solve_periodic(p);
  } catch (const error&) {
  }
  if (!sols.empty()) first_sup = sols.front().sup_norm;

  ConstantsResult cr = compute_constants(p.weight, p.nonlinearity, first_sup);

  nlohmann::ordered_json j;
  j["status"] = cr.ok ? "ok" : "failed";
  j["threshold_pass"] = cr.threshold.pass;
  j["threshold_K"] = cr.threshold.threshold;
  j["tail_growth_estimate"] = cr.threshold.estimate;
  j["threshold_margin"] = cr.threshold.margin;
  j["solutions_found"] = sols.size();
  if (!cr.ok) {
    j["failure"] = cr.failure;
  } else {
    const CertificateConstants& c = cr.constants;
    j["K"] = c.K;
    for (std::size_t i = 0; i < c.delta.size(); ++i) {
      std::string sfx = "_" + std::to_string(i + 1);
      j["A" + sfx] = c.window_area[i];
      j["gamma" + sfx] = c.gamma_delta[i];
      j["delta" + sfx] = c.delta[i];
      j["beta" + sfx] = c.beta[i];
    }
    j["epsilon"] = c.epsilon;
    j["R_star"] = c.R_star;
    j["R"] = c.R;
    j["r"] = c.r;
    j["alpha0"] = c.alpha0;
    j["log_alpha0"] = c.log_alpha0;

    try {
      j["degree"] = brouwer_degree_averaged(p.weight, p.nonlinearity, c.r);
    } catch (const domain_error& e) {
      j["degree_error"] = e.what();
    }

    std::vector<double> thetas;
    for (int k = 1; k <= 10; ++k) thetas.push_back(0.1 * k);
    ProbeReport small = probe_small_amplitude_gap(p, cfg.bc, c.r, thetas);
    j["probe_small_amplitude"] = small.statement;

    std::vector<double> alphas;
    for (int k = 0; k < 20; ++k) alphas.push_back(c.alpha0 * k / 19.0);
    ProbeReport large = probe_large_amplitude_gap(p, cfg.bc, c.R, alphas);
    j["probe_large_amplitude"] = large.statement;

    ProbeReport sat = probe_saturated_forcing(p, cfg.bc, c.R, c.alpha0);
    j["probe_saturated_forcing"] = sat.statement;
  }

  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto& [key, value] : j.items()) {
      std::cout << key << " = ";
      if (value.is_string())
        std::cout << value.get<std::string>();
      else
        std::cout << value.dump();
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_figure(int which, std::string out_dir) {
  if (out_dir.empty()) out_dir = "figure" + std::to_string(which);
  FigureResult res = reproduce_figure(which, out_dir);
  for (const std::string& f : res.files) std::cout << "wrote " << f << "\n";
  for (const AnchorComparison& c : res.comparisons)
    std::cout << c.label << ": reference = " << csv_num(c.reference)
              << ", measured = " << csv_num(c.measured)
              << ", rel_delta = " << csv_num(c.rel_delta) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann/periodic solver and branch tracer for the prescribed-curvature "
               "equation with a sign-changing weight"};
  app.require_subcommand(1);

  CommonOpts solve_opts, branch_opts_common, certify_opts;
  BranchOpts bopts;
  bool as_json = false;
  int fig_which = 0;
  std::string fig_out;

  CLI::App* solve = app.add_subcommand("solve", "find all solutions at fixed parameters");
  add_common(solve, solve_opts);

  CLI::App* branch = app.add_subcommand("branch", "trace a solution branch in a parameter");
  add_common(branch, branch_opts_common);
  branch->add_option("--param", bopts.param, "continuation parameter: lambda or kappa")
      ->required();
  branch->add_option("--start", bopts.start, "parameter value of the starting solution")
      ->required();
  branch->add_option("--min", bopts.range_min, "lower end of the parameter range")->required();
  branch->add_option("--max", bopts.range_max, "upper end of the parameter range")->required();
  branch->add_option("--direction", bopts.direction, "initial direction: +1 or -1");
  branch->add_option("--root-index", bopts.root_index,
                     "which start solution to follow (by increasing u0)");
  branch->add_option("--marks", bopts.marks, "parameter stations to insert exactly")
      ->delimiter(',');

  CLI::App* certify = app.add_subcommand("certify", "compute the existence-certificate "
                                                    "constants, degree, and probes");
  add_common(certify, certify_opts);
  certify->add_flag("--json", as_json, "emit the report as JSON");

  CLI::App* fig = app.add_subcommand("reproduce-figure", "regenerate a benchmark figure dataset");
  fig->add_option("--which", fig_which, "figure index: 1, 2, or 3")
      ->required()
      ->check(CLI::Range(1, 3));
  fig->add_option("--out-dir", fig_out, "output directory (default figure<N>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (branch->parsed()) return cmd_branch(branch_opts_common, bopts);
    if (certify->parsed()) return cmd_certify(certify_opts, as_json);
    if (fig->parsed()) return cmd_figure(fig_which, fig_out);
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
