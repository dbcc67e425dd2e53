#pragma once
// First-order phase-plane formulation of the curvature equation
//   (phi(u'))' + theta [ lambda a(t) g(u) + alpha forcing(t) ] = 0,
//   phi(s) = s / sqrt(1 - s^2),
// with the momentum v = phi(u'), which removes the |u'| -> 1 singularity:
//   u' = phi_inv(v) = v / sqrt(1 + v^2),
//   v' = -theta [ lambda a(t) g(u) + alpha forcing(t) ]   for u >= 0,
//   v' = -theta [ -u + alpha forcing(t) ]                  for u <  0
// (the negative-part extension used by the degree argument). Integration is
// adaptive embedded Runge-Kutta (5th order, 4th-order error estimate) with
// steps never straddling a weight or forcing breakpoint, and dense output.

#include <cstddef>
#include <vector>

#include "minkbvp/common.hpp"
#include "minkbvp/nonlinearity.hpp"
#include "minkbvp/weight.hpp"

namespace minkbvp {

/// phi(s) = s / sqrt(1 - s^2); odd, strictly increasing. Requires |s| < 1.
double phi(double s);
/// phi_inv(v) = v / sqrt(1 + v^2); total on the reals, |result| < 1 always
/// (clamped to the largest double below 1 when rounding would reach it).
double phi_inv(double v);

struct PhaseState {
  double u = 0.0;  // solution value
  double v = 0.0;  // momentum, v = phi(u')
  double slope() const { return phi_inv(v); }
};

/// Deformation parameters for the degree homotopies. theta scales the whole
/// field, alpha the forcing term, lambda the weight.
struct HomotopyParams {
  double theta = 1.0;   // in [0, 1]
  double alpha = 0.0;   // >= 0
  double lambda = 1.0;  // > 0
};

struct TrajectoryStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error_estimate = 0.0;  // largest accepted scaled error
};

/// Immutable integration result with a dense-output interpolant. Node times
/// are stored strictly increasing regardless of integration direction.
class Trajectory {
 public:
  double t0() const { return t_req0_; }  // requested start time
  double t1() const { return t_req1_; }  // requested end time

  const std::vector<double>& times() const { return times_; }
  const std::vector<PhaseState>& states() const { return states_; }
  const TrajectoryStats& stats() const { return stats_; }

  /// Dense-output evaluation; t clamped into the covered range.
  PhaseState eval(double t) const;
  double u(double t) const { return eval(t).u; }
  double v(double t) const { return eval(t).v; }
  double slope(double t) const { return eval(t).slope(); }

  PhaseState start_state() const { return eval(t_req0_); }
  PhaseState end_state() const { return eval(t_req1_); }

  /// sup |u| over the trajectory (interior extrema located via the
  /// interpolant, not just node values).
  double sup_norm_u() const;
  /// Largest |v| over nodes and dense samples.
  double max_abs_v() const;
  /// Smallest u over the trajectory (interior extrema located).
  double min_u() const;
  /// Time at which u attains its maximum.
  double argmax_u() const;

 private:
  friend class FlowIntegrator;
  struct Step {
    double tlo = 0.0, thi = 0.0;  // covered interval, tlo < thi
    double t_anchor = 0.0, h = 0.0;  // interpolant parameters (h may be < 0)
    double rc[5][2] = {};            // dense-output coefficients
  };
  PhaseState eval_step(const Step& s, double t) const;
  template <typename F>
  void scan_extrema(F&& visit) const;  // calls visit(t, state) on candidate extrema

  double t_req0_ = 0.0, t_req1_ = 0.0;
  std::vector<double> times_;
  std::vector<PhaseState> states_;
  std::vector<Step> steps_;  // sorted by tlo
  TrajectoryStats stats_;
};

/// Integrate from state s0 at time span_t0 to span_t1 (either direction).
/// The weight (and forcing, when given) extend periodically beyond [0, T].
/// forcing may be null; it is only read when hp.alpha != 0.
/// max_step <= 0 selects the default (shortest weight piece / 10).
/// Throws numeric_error on step-size underflow (stiffness) or when the field
/// or state becomes non-finite (blow-up), carrying the last valid time.
Trajectory integrate(const WeightFunction& w, const Nonlinearity& n, const HomotopyParams& hp,
                     const WeightFunction* forcing, PhaseState s0, double span_t0, double span_t1,
                     Tolerances tol = {}, double max_step = 0.0);

/// First integral on a span where a(t) is constant and alpha = 0, theta = 1:
///   E = sqrt(1 + v^2) + lambda * a_const * G(u)   for u >= 0,
///   E = sqrt(1 + v^2) - u^2 / 2                   for u <  0
/// (the second form matches the negative-part extension of the field).
double energy(const PhaseState& s, const Nonlinearity& n, double a_const, double lambda);

}  // namespace minkbvp
