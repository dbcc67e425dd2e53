#pragma once
// Pseudo-arclength continuation of Neumann solution branches in a problem
// parameter (the weight multiplier lambda or the exponential rate kappa),
// fold detection, and the slow-blow-up probe for lambda -> 0+.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minkbvp/bvp.hpp"

namespace minkbvp {

enum class BranchParam { lambda, kappa };

struct BranchPoint {
  double param = 0.0;
  double u0 = 0.0;          // u(0) of the shooting solution
  double sup_norm = 0.0;
  double bc_residual = 0.0; // normalized shooting defect
  bool is_fold = false;
};

struct Fold {
  double param = 0.0;  // refined by quadratic interpolation
  double u0 = 0.0;
  std::size_t index = 0;  // index of the straddling middle point
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<Fold> folds;
  int direction = +1;       // initial tangent sign in the parameter
  std::string termination;  // why the trace stopped
};

struct TraceOptions {
  double step = 0.02;          // arclength step in normalized (param, u0) units
  double sup_ceiling = 50.0;   // stop when sup_norm exceeds this
  std::vector<double> marks;   // exact parameter stations to insert as points
  std::size_t max_points = 20000;
};

/// Trace the branch through `start` (a certified Neumann solution at
/// start_param). The parameter is normalized by its range and u0 by 1; the
/// predictor is the secant tangent (initially (initial_direction, 0)), the
/// corrector is Newton on the shooting residual augmented with the arclength
/// plane constraint. Step halving on corrector failure down to step/64,
/// doubling after five easy successes up to 4x step. Crossed `marks` are
/// inserted as exactly-corrected points. Terminates on range exit (with an
/// exactly-corrected boundary point when reachable), sup-norm ceiling, step
/// underflow, or the point budget; the reason lands in Branch::termination.
Branch trace_branch(const Problem& p, BranchParam which, double start_param,
                    const Solution& start, std::pair<double, double> range,
                    int initial_direction, const TraceOptions& opt = {});

/// Indices where the parameter reverses direction, refined by a quadratic
/// fit through the three straddling points. Requires >= 3 points.
std::vector<Fold> detect_folds(const std::vector<BranchPoint>& points);
std::vector<Fold> detect_folds(const Branch& b);

struct BlowupRow {
  double lambda = 0.0;
  double u0 = 0.0;
  double sup_norm = 0.0;
};

/// Follow the Neumann branch down a decreasing positive lambda sequence by
/// natural continuation (geometric sub-steps, secant-seeded Newton) and
/// report (lambda, u0, sup_norm) at each requested value. Truncation (the
/// continuation stalling) is reported through *truncation_reason, not thrown.
std::vector<BlowupRow> blowup_probe(const Problem& p, const std::vector<double>& lambdas,
                                    std::string* truncation_reason = nullptr);

}  // namespace minkbvp
