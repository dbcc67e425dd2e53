#pragma once
// Piecewise representation of the sign-changing coefficient a(t) on [0, T],
// its sign partition, and the window integrals the solver's certificates need.

#include <cstddef>
#include <string>
#include <vector>

#include "minkbvp/common.hpp"

namespace minkbvp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Alternating decomposition of [0, T]: maximal open intervals where a > 0
/// ("positivity") and the complementary intervals where a ≤ 0 a.e.
/// ("negativity"; pieces where a ≡ 0 are merged into these).
struct SignPartition {
  std::vector<Interval> positive;
  std::vector<Interval> negative;
  std::size_t count() const { return positive.size(); }
};

/// One maximal piece of the weight: either constant on [t0, t1], or a
/// piecewise-linear interpolant through sample nodes spanning [t0, t1].
struct WeightPiece {
  double t0 = 0.0, t1 = 0.0;
  bool is_constant = true;
  double value = 0.0;            // constant pieces only
  std::vector<double> ts, vs;    // sampled pieces: nodes (ts.front()==t0, ts.back()==t1)
  std::vector<double> prefix;    // sampled pieces: prefix[j] = integral over [t0, ts[j]]
};

struct NormalizedWeight;

/// Immutable weight function. All methods are const and thread-safe.
class WeightFunction {
 public:
  /// Piecewise-constant weight: `values[k]` on the k-th subinterval of [0, T]
  /// cut at the strictly increasing interior `breaks`.
  static WeightFunction step(double period, const std::vector<double>& breaks,
                             const std::vector<double>& values);

  /// Piecewise-linear interpolant through (ts, values); ts strictly
  /// increasing, at least two nodes. The domain is shifted to start at 0;
  /// the applied shift (original ts.front()) is returned via *origin_out
  /// when non-null.
  static WeightFunction sampled(const std::vector<double>& ts, const std::vector<double>& values,
                                double* origin_out = nullptr);

  double period() const { return period_; }
  const std::vector<WeightPiece>& pieces() const { return pieces_; }
  /// Piece boundaries, including 0 and T.
  const std::vector<double>& edges() const { return edges_; }
  double shortest_piece() const;

  /// Periodic evaluation at any real t.
  double operator()(double t) const;
  /// Value using piece k's own (one-sided) definition; t is clamped into the
  /// piece. Lets the integrator evaluate up to a discontinuity consistently.
  double value_in_piece(std::size_t k, double t) const;
  /// Index of the piece containing t (t wrapped into [0, T); right-open).
  std::size_t piece_index(double t) const;

  /// Exact antiderivative: integral of a over [0, t] for any real t
  /// (periodic extension outside [0, T]).
  double antiderivative(double t) const;
  double integral(double lo, double hi) const { return antiderivative(hi) - antiderivative(lo); }

  /// Integral of a over the full period [0, T].
  double mean_value() const { return total_; }

  /// Sign partition; throws domain_error when a has no positivity interval.
  SignPartition sign_partition() const;

  /// Essential sup of the negative part a^-(t) = max(0, -a(t)).
  double neg_sup_norm() const;
  /// Integral of |a| over [0, T].
  double l1_norm() const;

  /// A_i: minimum over subwindows of length (tau_i - sigma_i)/4 inside the
  /// i-th positivity interval (0-based i) of the window integral of a.
  double window_min_l1(std::size_t i) const;
  /// gamma_i(delta): minimum over t in [sigma_i + delta, tau_i] of the
  /// integral of a over [t - delta, t]. Requires 0 <= delta <= (tau-sigma)/4.
  double gamma(std::size_t i, double delta) const;

  /// Weight shifted in time: result(t) = (*this)(t + shift).
  WeightFunction rotated(double shift) const;

  /// Rotation such that the first positivity interval starts at t = 0 and the
  /// period ends inside a negativity interval (used by the periodic solver).
  /// Returns shift = 0 for weights already in that form. Throws domain_error
  /// when there is no positivity interval.
  NormalizedWeight normalized_start_positive() const;

 private:
  double period_ = 0.0;
  double total_ = 0.0;                 // integral over one period
  std::vector<WeightPiece> pieces_;
  std::vector<double> edges_;          // piece boundaries, size pieces_+1
  std::vector<double> cums_;           // cums_[k] = integral over [0, edges_[k]]

  void finalize();                     // fills edges_, cums_, total_
  double piece_antiderivative(std::size_t k, double t) const;  // over [t0_k, t]
};

/// Result of WeightFunction::normalized_start_positive().
struct NormalizedWeight {
  WeightFunction weight;
  double shift = 0.0;
};

/// Step weight equal to 1 on the positivity set of w and 0 elsewhere (the
/// forcing profile used by the homotopy probes).
WeightFunction positivity_indicator(const WeightFunction& w);

}  // namespace minkbvp
