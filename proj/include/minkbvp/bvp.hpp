#pragma once
// Neumann and periodic boundary value problems for the curvature equation,
// solved by shooting: bracketing scans + hybrid root refinement for Neumann,
// damped Newton on the 2-D period map for periodic conditions. Every
// returned solution carries a residual certificate.

#include <functional>
#include <string>
#include <vector>

#include "minkbvp/common.hpp"
#include "minkbvp/nonlinearity.hpp"
#include "minkbvp/phase_flow.hpp"
#include "minkbvp/weight.hpp"

namespace minkbvp {

enum class BoundaryCondition { neumann, periodic };

/// One boundary value problem instance. lambda multiplies the weight.
struct Problem {
  WeightFunction weight;
  Nonlinearity nonlinearity;
  double lambda = 1.0;
  Tolerances tol{};
};

/// Numerical certificate attached to a solution. Residuals are normalized:
/// the boundary defect by max(1, sup |v|) along the trajectory (the shooting
/// map's output scale), the weak residual per test window by
/// max(1, local field magnitude x window length).
struct SolutionCertificate {
  double bc_residual = 0.0;
  double weak_residual = 0.0;   // max over 63 hat test functions on 64 cells
  double min_u = 0.0;
  double max_abs_slope = 0.0;   // sup |u'| < 1 structurally
};

struct Solution {
  Trajectory trajectory;
  BoundaryCondition bc = BoundaryCondition::neumann;
  double sup_norm = 0.0;   // sup |u|
  double max_point = 0.0;  // time where u attains its maximum
  SolutionCertificate certificate;

  double u0() const { return trajectory.start_state().u; }
  double v0() const { return trajectory.start_state().v; }
  bool positive() const { return certificate.min_u > 0.0; }
};

/// Neumann shooting residual: integrate from (u, v) = (c, 0) over [0, T] and
/// return v(T). Integration blow-up propagates as numeric_error.
double neumann_residual(const Problem& p, double c);

struct ScanRange {
  double c_min = 1e-3;
  double c_max = 10.0;
  int n_points = 600;
};

struct ScanFailure {
  double c = 0.0;
  std::string reason;
};

/// Scan the Neumann residual on a uniform grid, bracket every sign change
/// between adjacent valid grid points, refine each bracket by a safeguarded
/// bisection/secant hybrid, and certify the roots. Roots are accepted when
/// the normalized residual drops below 1e-10, deduplicated within 1e-8 in
/// u(0), and returned sorted by u(0). Grid points where integration fails
/// (blow-up) are recorded in *failures and skipped; an empty result is a
/// legitimate outcome, not an error.
std::vector<Solution> solve_neumann(const Problem& p, const ScanRange& scan,
                                    std::vector<ScanFailure>* failures = nullptr);

/// Solve the T-periodic problem. The weight is first rotated so positivity
/// starts at t = 0 (the returned solutions live in that rotated frame; the
/// applied shift is reported through *diagnostics). Guesses are seeded from
/// (i) Neumann solutions, (ii) a coarse grid over (0, c_max] x [-3, 3],
/// (iii) for two-piece constant weights, a symmetric-orbit family
/// parametrized by the maximum value (see nodes below), plus any
/// caller-supplied guesses. Newton iteration on the period map
/// S(u0, v0) = (u(T) - u0, v(T) - v0) with scaled finite-difference Jacobian
/// (step 1e-7 relative), damped by backtracking, at most 50 iterations.
/// Convergence is per component at 10x the integrator's error scale:
/// |S_u| <= 10 (rel_tol max(T, |u0|) + abs_tol) and |S_v| <= 10 (rel_tol
/// max(orbit max |v|, |v0|) + abs_tol), so a defect the integrator resolves
/// as nonzero is never accepted. Iterates leaving the seeded amplitude box,
/// singular Jacobians and integration failures reject the guess with a
/// diagnostic message, and converged orbits whose momentum budget sits below
/// the acceptance floor (indistinguishable from the trivial equilibrium) are
/// dropped with a diagnostic.
std::vector<Solution> solve_periodic(const Problem& p,
                                     const std::vector<PhaseState>& extra_guesses = {},
                                     std::vector<std::string>* diagnostics = nullptr);

/// Certificate for an arbitrary state history on [t0, t1]: boundary defect
/// for the given condition, weak-form residual against hat test functions on
/// a 64-cell partition (Gauss rule per cell, split at weight breakpoints),
/// minimum of u, and maximum |u'|. The function form exists so tests can
/// verify that perturbed trajectories are rejected.
SolutionCertificate verify_solution(const Problem& p, BoundaryCondition bc,
                                    const std::function<PhaseState(double)>& state_at,
                                    double t0, double t1);
SolutionCertificate verify_solution(const Problem& p, BoundaryCondition bc,
                                    const Trajectory& traj);

/// Assemble a Solution record (sup norm, max point, certificate) from a
/// trajectory that already satisfies the boundary condition.
Solution build_solution(const Problem& p, BoundaryCondition bc, Trajectory traj);

}  // namespace minkbvp
