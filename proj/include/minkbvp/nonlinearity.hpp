#pragma once
// Nonlinearity catalogue g(u) on [0, inf) with primitive G, log-domain
// evaluation past the floating-point overflow threshold, and the growth
// diagnostics used by the existence certificates.

#include <functional>
#include <vector>

#include "minkbvp/weight.hpp"

namespace minkbvp {

enum class NonlinearityKind { power, exp_power, power_exp, custom };

/// g(0) = 0, g > 0 on (0, inf). Builtins:
///   power:     g(u) = s * u^p                  (p > 1)
///   exp_power: g(u) = s * (e^{u^p} - 1)        (p > 1)
///   power_exp: g(u) = s * u^p e^{kappa u}      (p > 1, kappa > 0)
/// where s is an optional positive scale folded into g (and hence into G).
/// All evaluations are pure and thread-safe.
class Nonlinearity {
 public:
  static Nonlinearity power(double p, double scale = 1.0);
  static Nonlinearity exp_power(double p, double scale = 1.0);
  static Nonlinearity power_exp(double p, double kappa, double scale = 1.0);
  /// User-supplied g; g_prime may be null (central finite differences are
  /// used); monotonicity_threshold is the point past which g is nondecreasing.
  static Nonlinearity custom(std::function<double(double)> g,
                             std::function<double(double)> g_prime = nullptr,
                             double monotonicity_threshold = 0.0);

  NonlinearityKind kind() const { return kind_; }
  double p() const { return p_; }
  double kappa() const { return kappa_; }
  double scale() const { return scale_; }
  /// Threshold past which g is nondecreasing (0 for every builtin).
  double monotonicity_threshold() const { return r_hat_; }

  /// g(u); may overflow to +inf for large u (use log_g there). u >= 0.
  double g(double u) const;
  /// g'(u): closed form for builtins, supplied function or central finite
  /// differences for custom nonlinearities.
  double g_prime(double u) const;
  /// Primitive G(u) = integral of g over [0, u]; closed form or series where
  /// available, adaptive quadrature otherwise. u >= 0.
  double G(double u) const;

  /// log g(u) for u > 0; finite far past the overflow threshold of g.
  double log_g(double u) const;
  /// log G(u) for u > 0; asymptotic expansion above the overflow threshold.
  double log_G(double u) const;

  /// g(u)/G(u) for u > 0, computed in the log domain when needed.
  double growth_ratio(double u) const;
  /// g'(u)/g(u) for u > 0 (closed form for builtins).
  double gprime_ratio(double u) const;

 private:
  Nonlinearity() = default;
  NonlinearityKind kind_ = NonlinearityKind::custom;
  double p_ = 0.0, kappa_ = 0.0, scale_ = 1.0, r_hat_ = 0.0;
  std::function<double(double)> custom_g_, custom_gp_;
};

/// Behaviour of g near u = 0: samples q(u) = g(u)/u on the geometric grid
/// 10^-1 .. 10^-8 and probes |g(w u)/g(u) - 1| over w in [0.9, 1.1].
struct ZeroLimitReport {
  std::vector<double> us;          // sample points, decreasing
  std::vector<double> q;           // g(u)/u at each sample
  std::vector<double> oscillation; // sup over the w-window at each sample
  bool q_vanishes = false;         // q(u) -> 0 along the grid
  bool oscillation_regular = false;
  bool pass = false;
};
ZeroLimitReport check_zero_limits(const Nonlinearity& n);

/// Conservative liminf estimates over the last sampled decade.
struct GrowthTail {
  double ratio_g_over_G = 0.0;      // liminf estimate of g/G
  double ratio_gprime_over_g = 0.0; // liminf estimate of g'/g
};
/// Both ratios on a geometric grid in [u_max/100, u_max]; the estimates are
/// the minima over the last decade [u_max/10, u_max]. Requires u_max >= 10.
GrowthTail growth_ratio_tail(const Nonlinearity& n, double u_max);

/// Super-exponential growth condition: liminf g/G must exceed the weight
/// threshold K = (sup of the negative part) / (min over positivity intervals
/// of the best quarter-window integral).
struct ThresholdCheck {
  bool pass = false;
  double threshold = 0.0;  // K computed from the weight
  double estimate = 0.0;   // liminf estimate of g/G
  double margin = 0.0;     // estimate - threshold
};
ThresholdCheck check_growth_threshold(const Nonlinearity& n, const WeightFunction& w,
                                      double u_max = 1000.0);

/// Tail diagnostic for the small-lambda nonexistence regime: estimates
/// limsup |g'(u)| / g(u)^eta on a geometric tail grid. A bounded estimate
/// (log-log slope ~ 0) signals the regime; reported for context only.
struct NonexistenceReport {
  double eta = 0.0;
  double limsup_estimate = 0.0;  // max of the ratio over the last decade
  double log_slope = 0.0;        // d log(ratio) / d log(u) over the last decade
  bool holds = false;            // slope <= 0.05 (ratio not growing)
};
NonexistenceReport check_nonexistence_regime(const Nonlinearity& n, double eta);

}  // namespace minkbvp
