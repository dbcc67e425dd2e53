#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minkbvp/bvp.hpp"
#include "minkbvp/nonlinearity.hpp"
#include "minkbvp/weight.hpp"

namespace minkbvp {

// The constructed constants of the existence certificate. All per-interval
// lists are indexed like SignPartition::positive.
struct CertificateConstants {
  std::vector<double> delta;        // window half-offsets, delta_i in (0, L_i/4)
  std::vector<double> gamma_delta;  // gamma_i(delta_i), minimal window mass at offset delta_i
  std::vector<double> window_area;  // A_i = gamma_i(L_i/4), the widest-window mass
  std::vector<double> beta;         // eps*(delta_i - L_i/2) + L_i/2 - 2*delta_i, all > 0
  double epsilon = 0.0;             // midpoint of the admissible window
  double K = 0.0;                   // growth threshold: neg_sup / min_i A_i
  double R_star = 0.0;              // smallest radius at which both tail estimates hold
  double R = 0.0;                   // max(R_star, monotonicity threshold) + 2 max delta_i + T
  double r = 0.0;                   // small-amplitude probe radius
  double alpha0 = 0.0;              // forcing level beyond every bounded solution
  double log_alpha0 = 0.0;          // log(alpha0), exact even when alpha0 overflows
  double neg_sup = 0.0;             // ess-sup of the negative part of the weight
  double weight_l1 = 0.0;           // L1 norm of the weight over one period
  double forcing_l1 = 0.0;          // L1 norm of the positivity indicator
};

struct ConstantsResult {
  bool ok = false;
  std::string failure;  // names the violated inequality when !ok
  ThresholdCheck threshold;
  CertificateConstants constants;  // valid only when ok
};

// Builds every constant of the certificate for the pair (w, n).
// `first_sup_norm`, when finite, is the sup-norm of a known solution and
// scales the probe radius r = 1e-3 * min(1, first_sup_norm); otherwise
// r = 1e-3.
ConstantsResult compute_constants(
    const WeightFunction& w, const Nonlinearity& n,
    double first_sup_norm = std::numeric_limits<double>::quiet_NaN());

// 1-D Brouwer degree of s -> -f(s) on (-r, r), where f is the averaged
// field: f(s) = g(s) * integral of the weight for s >= 0 and f(s) = -s for
// s < 0. Throws domain_error when f vanishes at either endpoint.
int brouwer_degree_averaged(const WeightFunction& w, const Nonlinearity& n, double r);

struct ProbeHit {
  double parameter = 0.0;  // the theta or alpha value at which the hit occurred
  double u0 = 0.0;
  double v0 = 0.0;
  double sup_norm = 0.0;
};

struct ProbeReport {
  std::vector<ProbeHit> hits;
  int resolution = 0;  // scan points per parameter value
  std::string statement;
  bool empty() const { return hits.empty(); }
};

// Searches for solutions of the theta-scaled problem with sup-norm in
// [0.9 r, 1.1 r]; an empty report means no counterexample to the
// small-amplitude gap was found at this resolution.
ProbeReport probe_small_amplitude_gap(const Problem& p, BoundaryCondition bc, double r,
                                      const std::vector<double>& theta_grid);

// Searches, for each forcing level alpha, for solutions of the forced
// problem with sup-norm in [0.95 R, 1.05 R]; empty means no counterexample
// to the large-amplitude gap was found.
ProbeReport probe_large_amplitude_gap(const Problem& p, BoundaryCondition bc, double R,
                                      const std::vector<double>& alpha_grid);

// At the saturating forcing level alpha0, searches the full amplitude range
// for any solution with sup-norm <= R; empty means none was found.
ProbeReport probe_saturated_forcing(const Problem& p, BoundaryCondition bc, double R,
                                    double alpha0);

struct WedgeReport {
  bool pass = false;
  bool inconclusive = false;  // trajectory shorter than 2*delta
  double t_hat = 0.0;         // location of the trajectory's maximum
  double delta = 0.0;         // half-width excluded around the peak
  double post_max_slope = 0.0;  // max u' on [t_hat + delta, end]; pass needs <= -1+eps
  double pre_min_slope = 0.0;   // min u' on [start, t_hat - delta]; pass needs >= 1-eps
  std::string statement;
};

// Certifies the wedge shape of a trajectory: slope <= -1+eps after the
// peak and >= 1-eps before it, outside a delta-neighborhood of the peak.
// delta <= 0 selects the default max_i L_i / 8 from the partition.
WedgeReport wedge_certificate(const Trajectory& traj, const SignPartition& partition,
                              double eps, double delta = 0.0);

}  // namespace minkbvp
