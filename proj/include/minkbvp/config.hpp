#pragma once
// Line-oriented configuration format: top-level `key = value` entries and
// named `{ ... }` blocks, `#` comments, newline or `;` separators, list
// values in brackets. Unknown keys are rejected with their line number.

#include <string>
#include <vector>

#include "minkbvp/bvp.hpp"
#include "minkbvp/nonlinearity.hpp"
#include "minkbvp/weight.hpp"

namespace minkbvp {

struct ProblemConfig {
  // weight block: either a step weight (T, breaks, values) or a samples file
  bool weight_sampled = false;
  double T = 0.0;
  std::vector<double> breaks;
  std::vector<double> values;
  std::string samples_file;

  // nonlinearity block
  NonlinearityKind kind = NonlinearityKind::exp_power;
  double p = 2.0;
  double kappa = 0.0;  // meaningful only for power_exp
  double lambda = 1.0;

  // top level
  BoundaryCondition bc = BoundaryCondition::neumann;

  // solver block
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double scan_min = 1e-3;
  double scan_max = 0.0;  // 0 = unresolved; defaults to 10 + T
  int scan_points = 0;    // 0 = unresolved; defaults to 600 * (scan_max - scan_min)
  double branch_step = 0.02;
  double sup_ceiling = 50.0;

  // output block
  std::string out_dir = "out";
  int grid_points = 401;
};

/// Parse and validate; throws config_error naming the offending key and line.
/// Scan defaults are resolved when the period is known (step weights).
ProblemConfig parse_config(const std::string& text);

/// Reads the file, parses, resolves samples_file relative to the config's
/// directory (and requires it to exist), and resolves all scan defaults.
ProblemConfig parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(parse(text))) == parse(text).
/// Numbers are written with 17 significant digits.
std::string serialize_config(const ProblemConfig& cfg);

WeightFunction make_weight(const ProblemConfig& cfg);
Nonlinearity make_nonlinearity(const ProblemConfig& cfg);
Problem make_problem(const ProblemConfig& cfg);
ScanRange make_scan_range(const ProblemConfig& cfg);

}  // namespace minkbvp
