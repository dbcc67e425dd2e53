#include "minkbvp/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "minkbvp/phase_flow.hpp"

namespace minkbvp {

namespace {

double logsumexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Minimum of log g over [lo, hi], sampled; g need not be monotone.
double min_log_g(const Nonlinearity& n, double lo, double hi) {
  double best = std::numeric_limits<double>::infinity();
  const int m = 32;
  for (int k = 0; k <= m; ++k) {
    double s = lo + (hi - lo) * k / m;
    best = std::min(best, n.log_g(s));
  }
  return best;
}

}  // namespace

ConstantsResult compute_constants(const WeightFunction& w, const Nonlinearity& n,
                                  double first_sup_norm) {
  ConstantsResult res;
  SignPartition part = w.sign_partition();
  res.threshold = check_growth_threshold(n, w);
  if (!res.threshold.pass) {
    res.failure = "growth-threshold inequality violated: tail inf g/G = " +
                  format_double(res.threshold.estimate, 6) +
                  " does not exceed the window threshold K = " +
                  format_double(res.threshold.threshold, 6);
    return res;
  }

  CertificateConstants c;
  c.K = res.threshold.threshold;
  c.neg_sup = w.neg_sup_norm();
  c.weight_l1 = w.l1_norm();
  const double tail_ratio = res.threshold.estimate;

  const std::size_t m = part.positive.size();
  c.delta.resize(m);
  c.gamma_delta.resize(m);
  c.window_area.resize(m);
  c.beta.resize(m);

  // Window offsets: walk the dyadic chain cap*(1 - 2^-k) upward until the
  // tail growth ratio clears the per-interval threshold neg_sup/gamma_i.
  double eps_cap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double L = part.positive[i].length();
    const double cap = L / 4.0;
    c.window_area[i] = w.gamma(i, cap);
    bool found = false;
    for (int k = 1; k <= 48; ++k) {
      double d = cap * (1.0 - std::ldexp(1.0, -k));
      double g = w.gamma(i, d);
      if (g > 0.0 && tail_ratio > c.neg_sup / g) {
        c.delta[i] = d;
        c.gamma_delta[i] = g;
        found = true;
        break;
      }
    }
    if (!found) {
      res.failure =
          "no dyadic window offset within 48 refinements satisfies tail inf g/G > "
          "neg_sup/gamma on positivity interval " +
          std::to_string(i);
      return res;
    }
    eps_cap = std::min(eps_cap, (L - 4.0 * c.delta[i]) / (L - 2.0 * c.delta[i]));
  }
  c.epsilon = 0.5 * eps_cap;
  for (std::size_t i = 0; i < m; ++i) {
    const double L = part.positive[i].length();
    c.beta[i] = c.epsilon * (c.delta[i] - L / 2.0) + L / 2.0 - 2.0 * c.delta[i];
    if (!(c.beta[i] > 0.0)) {
      res.failure = "window margin beta is not positive on positivity interval " +
                    std::to_string(i);
      return res;
    }
  }

  // Radius search: both tail estimates, in log form so that overflow-scale
  // nonlinearities stay exact. For each interval i with offset d, margin b,
  // mass g_i = gamma_i(d) and K_i = neg_sup/g_i, the estimates at radius rho:
  //   (slope estimate)  g_i * min_{s in [rho-d, rho]} g(s) >= phi(1 - eps)
  //   (area estimate)   g(rho-d) > K_i G(rho-d-b) + phi(1 - eps)/g_i
  const double log_phi = std::log(phi(1.0 - c.epsilon));
  auto estimates_hold = [&](double rho) {
    for (std::size_t i = 0; i < m; ++i) {
      double x = rho - c.delta[i];
      if (!(x > 0.0)) return false;
      if (!(std::log(c.gamma_delta[i]) + min_log_g(n, x, rho) >= log_phi)) return false;
      double y = x - c.beta[i];
      if (!(y > 0.0)) return false;
      double ki = c.neg_sup / c.gamma_delta[i];
      double rhs = logsumexp(std::log(ki) + n.log_G(y), log_phi - std::log(c.gamma_delta[i]));
      if (!(n.log_g(x) > rhs)) return false;
    }
    return true;
  };

  double lo = 0.0;
  for (std::size_t i = 0; i < m; ++i) lo = std::max(lo, c.delta[i] + c.beta[i]);
  lo += 1e-12;
  const double r_hat = n.monotonicity_threshold();
  double hi = std::max(std::max(r_hat, 1.0), lo * 2.0);
  if (!estimates_hold(hi)) {
    double prev = hi;
    while (!estimates_hold(hi)) {
      prev = hi;
      hi *= 2.0;
      if (hi > 1e12) {
        res.failure = "radius search exceeded 1e12 without both tail estimates holding";
        return res;
      }
    }
    lo = prev;
  }
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    (estimates_hold(mid) ? hi : lo) = mid;
  }
  c.R_star = hi;

  double max_delta = *std::max_element(c.delta.begin(), c.delta.end());
  c.R = std::max(c.R_star, r_hat) + 2.0 * max_delta + w.period();

  double fs = (std::isfinite(first_sup_norm) && first_sup_norm > 0.0) ? first_sup_norm : 1.0;
  c.r = 1e-3 * std::min(1.0, fs);

  // Forcing level: 1% above weight_l1 * max g over [0, R] / forcing_l1.
  c.forcing_l1 = positivity_indicator(w).l1_norm();
  double max_log_g = -std::numeric_limits<double>::infinity();
  const int samples = 1000;
  // k starts at 1: g vanishes at the origin, so u = 0 can never carry the max.
  for (int k = 1; k <= samples; ++k)
    max_log_g = std::max(max_log_g, n.log_g(c.R * k / samples));
  c.log_alpha0 = std::log(1.01 * c.weight_l1 / c.forcing_l1) + max_log_g;
  c.alpha0 = std::exp(c.log_alpha0);

  for (std::size_t i = 0; i < m; ++i) {
    double cap = part.positive[i].length() / 4.0;
    if (!(c.delta[i] > 0.0 && c.delta[i] < cap)) {
      res.failure = "window offset left its admissible range on interval " + std::to_string(i);
      return res;
    }
  }
  res.ok = true;
  res.constants = c;
  return res;
}

int brouwer_degree_averaged(const WeightFunction& w, const Nonlinearity& n, double r) {
  if (!(r > 0.0)) throw domain_error("degree: radius must be positive");
  double wa = w.integral(0.0, w.period());
  double fp = n.g(r) * wa;  // averaged field at +r
  double fm = -(-r);        // averaged field at -r: -s
  if (fp == 0.0 || fm == 0.0)
    throw domain_error("degree: averaged field vanishes at an endpoint of (-r, r)");
  auto sgn = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
  return (sgn(-fp) - sgn(-fm)) / 2;
}

namespace {

Trajectory probe_shot(const Problem& p, double theta, double alpha,
                      const WeightFunction* forcing, PhaseState s0) {
  HomotopyParams hp;
  hp.theta = theta;
  hp.alpha = alpha;
  hp.lambda = p.lambda;
  return integrate(p.weight, p.nonlinearity, hp, forcing, s0, 0.0, p.weight.period(), p.tol);
}

// Shooting scan for the Neumann problem at fixed (theta, alpha): brackets of
// the terminal v over a start-height grid, refined by bisection. Roots whose
// sup-norm lands in [band_lo, band_hi] become hits tagged with `tag`.
void neumann_scan(const Problem& p, double theta, double alpha, const WeightFunction* forcing,
                  double c_lo, double c_hi, int n_points, double band_lo, double band_hi,
                  double tag, std::vector<ProbeHit>& hits) {
  struct Node {
    double c = 0.0, f = 0.0;
    bool valid = false;
  };
  std::vector<Node> grid(static_cast<std::size_t>(n_points));
  parallel_for(grid.size(), [&](std::size_t k) {
    Node& nd = grid[k];
    nd.c = c_lo + (c_hi - c_lo) * static_cast<double>(k) / (n_points - 1);
    try {
      nd.f = probe_shot(p, theta, alpha, forcing, {nd.c, 0.0}).end_state().v;
      nd.valid = std::isfinite(nd.f);
    } catch (const error&) {
    }
  });
  auto record = [&](double c_root) {
    try {
      Trajectory t = probe_shot(p, theta, alpha, forcing, {c_root, 0.0});
      double sup = t.sup_norm_u();
      if (sup >= band_lo && sup <= band_hi) hits.push_back({tag, c_root, 0.0, sup});
    } catch (const error&) {
    }
  };
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Node &a = grid[k], &b = grid[k + 1];
    if (!a.valid || !b.valid) continue;
    if (a.f == 0.0) {
      record(a.c);
      continue;
    }
    if (a.f * b.f >= 0.0) continue;
    double xa = a.c, xb = b.c, fa = a.f;
    bool ok = true;
    for (int it = 0; it < 60 && ok; ++it) {
      double xm = 0.5 * (xa + xb);
      try {
        double fmid = probe_shot(p, theta, alpha, forcing, {xm, 0.0}).end_state().v;
        if (fmid == 0.0 || !std::isfinite(fmid)) {
          xa = xb = xm;
          break;
        }
        if (fa * fmid < 0.0) {
          xb = xm;
        } else {
          xa = xm;
          fa = fmid;
        }
      } catch (const error&) {
        ok = false;
      }
    }
    if (ok) record(0.5 * (xa + xb));
  }
  if (!grid.empty() && grid.back().valid && grid.back().f == 0.0) record(grid.back().c);
}

// Period-map Newton for the periodic problem at fixed (theta, alpha).
void periodic_seek(const Problem& p, double theta, double alpha, const WeightFunction* forcing,
                   double c_lo, double c_hi, int n_seeds, double band_lo, double band_hi,
                   double tag, std::vector<ProbeHit>& hits) {
  auto defect = [&](PhaseState s, Trajectory* out) {
    Trajectory t = probe_shot(p, theta, alpha, forcing, s);
    if (out) *out = t;
    PhaseState e = t.end_state();
    return std::pair<double, double>{e.u - s.u, e.v - s.v};
  };
  std::vector<PhaseState> seeds;
  for (int k = 0; k < n_seeds; ++k) {
    double u0 = c_lo + (c_hi - c_lo) * (k + 0.5) / n_seeds;
    for (double v0 : {-0.5 * c_lo, 0.0, 0.5 * c_lo}) seeds.push_back({u0, v0});
  }
  std::vector<ProbeHit> found(seeds.size());
  std::vector<char> got(seeds.size(), 0);
  parallel_for(seeds.size(), [&](std::size_t k) {
    PhaseState x = seeds[k];
    try {
      for (int it = 0; it < 40; ++it) {
        Trajectory traj;
        auto [s1, s2] = defect(x, &traj);
        double scale = std::max({1.0, std::abs(x.u), std::abs(x.v)});
        if (std::hypot(s1, s2) <= 1e-10 * scale) {
          double sup = traj.sup_norm_u();
          if (sup >= band_lo && sup <= band_hi) {
            found[k] = {tag, x.u, x.v, sup};
            got[k] = 1;
          }
          return;
        }
        double hu = 1e-7 * std::max(1.0, std::abs(x.u));
        double hv = 1e-7 * std::max(1.0, std::abs(x.v));
        auto [a1, a2] = defect({x.u + hu, x.v}, nullptr);
        auto [b1, b2] = defect({x.u, x.v + hv}, nullptr);
        double j00 = (a1 - s1) / hu, j01 = (b1 - s1) / hv;
        double j10 = (a2 - s2) / hu, j11 = (b2 - s2) / hv;
        double det = j00 * j11 - j01 * j10;
        if (!(std::abs(det) > 1e-14)) return;
        x.u += (-s1 * j11 + s2 * j01) / det;
        x.v += (-s2 * j00 + s1 * j10) / det;
      }
    } catch (const error&) {
    }
  });
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!got[k]) continue;
    bool dup = false;
    for (const ProbeHit& h : hits)
      if (std::hypot(h.u0 - found[k].u0, h.v0 - found[k].v0) <
              1e-6 * std::max(1.0, std::abs(found[k].u0)) &&
          h.parameter == tag)
        dup = true;
    if (!dup) hits.push_back(found[k]);
  }
}

std::string probe_statement(const std::vector<ProbeHit>& hits, int resolution) {
  if (hits.empty())
    return "no counterexample found at resolution " + std::to_string(resolution);
  return "counterexample found: " + std::to_string(hits.size()) +
         " candidate(s) in the excluded band";
}

}  // namespace

ProbeReport probe_small_amplitude_gap(const Problem& p, BoundaryCondition bc, double r,
                                      const std::vector<double>& theta_grid) {
  if (!(r > 0.0)) throw domain_error("probe: radius must be positive");
  ProbeReport rep;
  rep.resolution = 200;
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta <= 1.0))
      throw domain_error("probe: theta values must lie in (0, 1]");
    if (bc == BoundaryCondition::neumann)
      neumann_scan(p, theta, 0.0, nullptr, 0.5 * r, 1.5 * r, rep.resolution, 0.9 * r, 1.1 * r,
                   theta, rep.hits);
    else
      periodic_seek(p, theta, 0.0, nullptr, 0.5 * r, 1.5 * r, 24, 0.9 * r, 1.1 * r, theta,
                    rep.hits);
  }
  rep.statement = probe_statement(rep.hits, rep.resolution);
  return rep;
}

ProbeReport probe_large_amplitude_gap(const Problem& p, BoundaryCondition bc, double R,
                                      const std::vector<double>& alpha_grid) {
  if (!(R > 0.0)) throw domain_error("probe: radius must be positive");
  WeightFunction forcing = positivity_indicator(p.weight);
  ProbeReport rep;
  rep.resolution = 200;
  for (double alpha : alpha_grid) {
    if (!(alpha >= 0.0)) throw domain_error("probe: forcing levels must be nonnegative");
    if (bc == BoundaryCondition::neumann)
      neumann_scan(p, 1.0, alpha, &forcing, 0.9 * R, 1.1 * R, rep.resolution, 0.95 * R,
                   1.05 * R, alpha, rep.hits);
    else
      periodic_seek(p, 1.0, alpha, &forcing, 0.9 * R, 1.1 * R, 24, 0.95 * R, 1.05 * R, alpha,
                    rep.hits);
  }
  rep.statement = probe_statement(rep.hits, rep.resolution);
  return rep;
}

ProbeReport probe_saturated_forcing(const Problem& p, BoundaryCondition bc, double R,
                                    double alpha0) {
  if (!(R > 0.0)) throw domain_error("probe: radius must be positive");
  if (!(alpha0 >= 0.0) || !std::isfinite(alpha0))
    throw domain_error("probe: the forcing level must be finite and nonnegative");
  WeightFunction forcing = positivity_indicator(p.weight);
  ProbeReport rep;
  rep.resolution = 200;
  double c_hi = 1.05 * R;
  double c_lo = c_hi / rep.resolution;
  if (bc == BoundaryCondition::neumann)
    neumann_scan(p, 1.0, alpha0, &forcing, c_lo, c_hi, rep.resolution, 0.0, R, alpha0,
                 rep.hits);
  else
    periodic_seek(p, 1.0, alpha0, &forcing, c_lo, c_hi, 24, 0.0, R, alpha0, rep.hits);
  rep.statement = probe_statement(rep.hits, rep.resolution);
  return rep;
}

WedgeReport wedge_certificate(const Trajectory& traj, const SignPartition& partition,
                              double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw domain_error("wedge: eps must lie in (0, 1)");
  WedgeReport rep;
  if (delta <= 0.0) {
    double lmax = 0.0;
    for (const Interval& iv : partition.positive) lmax = std::max(lmax, iv.length());
    delta = lmax / 8.0;
  }
  rep.delta = delta;
  const double a = std::min(traj.t0(), traj.t1());
  const double b = std::max(traj.t0(), traj.t1());
  if (b - a < 2.0 * delta) {
    rep.inconclusive = true;
    rep.statement = "trajectory shorter than twice the peak exclusion width";
    return rep;
  }
  rep.t_hat = traj.argmax_u();

  auto extreme_slope = [&](double lo, double hi, bool want_max) {
    double best = want_max ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    const int samples = 256;
    for (int k = 0; k <= samples; ++k) {
      double t = lo + (hi - lo) * k / samples;
      double s = traj.eval(t).slope();
      best = want_max ? std::max(best, s) : std::min(best, s);
    }
    return best;
  };

  const double post_lo = rep.t_hat + delta;
  const double pre_hi = rep.t_hat - delta;
  bool post_ok = true, pre_ok = true;
  if (post_lo <= b) {
    rep.post_max_slope = extreme_slope(post_lo, b, true);
    post_ok = rep.post_max_slope <= -1.0 + eps;
  } else {
    rep.post_max_slope = std::numeric_limits<double>::quiet_NaN();
  }
  if (pre_hi >= a) {
    rep.pre_min_slope = extreme_slope(a, pre_hi, false);
    pre_ok = rep.pre_min_slope >= 1.0 - eps;
  } else {
    rep.pre_min_slope = std::numeric_limits<double>::quiet_NaN();
  }
  rep.pass = post_ok && pre_ok;
  rep.statement = rep.pass ? "slopes confined to the wedge outside the peak neighborhood"
                           : "measured slopes leave the wedge";
  return rep;
}

}  // namespace minkbvp
