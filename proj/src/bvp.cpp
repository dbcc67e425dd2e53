#include "minkbvp/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "minkbvp/quadrature.hpp"

namespace minkbvp {

namespace {

Trajectory shoot(const Problem& p, PhaseState s0, double t0, double t1) {
  HomotopyParams hp;
  hp.lambda = p.lambda;
  return integrate(p.weight, p.nonlinearity, hp, nullptr, s0, t0, t1, p.tol);
}

double residual_scale(const Trajectory& t) { return std::max(1.0, t.max_abs_v()); }

// Periodic copies of the weight's piece edges strictly inside (lo, hi).
std::vector<double> edges_between(const WeightFunction& w, double lo, double hi) {
  std::vector<double> cuts;
  const double P = w.period();
  const double tol_t = 1e-12 * std::max({1.0, hi - lo, P});
  long k0 = static_cast<long>(std::floor(lo / P)) - 1;
  long k1 = static_cast<long>(std::ceil(hi / P)) + 1;
  for (long k = k0; k <= k1; ++k)
    for (double e : w.edges()) {
      double t = k * P + e;
      if (t > lo + tol_t && t < hi - tol_t) cuts.push_back(t);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return std::abs(a - b) <= tol_t; }),
             cuts.end());
  return cuts;
}

}  // namespace

double neumann_residual(const Problem& p, double c) {
  return shoot(p, {c, 0.0}, 0.0, p.weight.period()).end_state().v;
}

// --- certificates ---------------------------------------------------------------

SolutionCertificate verify_solution(const Problem& p, BoundaryCondition bc,
                                    const std::function<PhaseState(double)>& state_at,
                                    double t0, double t1) {
  if (!(t1 > t0)) throw domain_error("verify: time span must have positive length");
  const int cells = 64;
  const double L = t1 - t0;
  const double cell = L / cells;

  auto field = [&](double t) {
    PhaseState s = state_at(t);
    if (s.u >= 0.0) return p.lambda * p.weight(t) * p.nonlinearity.g(s.u);
    return -s.u;
  };

  SolutionCertificate cert;

  // Global scale / extrema from a fine uniform sample.
  double min_u = std::numeric_limits<double>::infinity();
  double max_v = 0.0;
  const int ns = cells * 16;
  for (int j = 0; j <= ns; ++j) {
    PhaseState s = state_at(t0 + L * j / ns);
    min_u = std::min(min_u, s.u);
    max_v = std::max(max_v, std::abs(s.v));
  }
  cert.min_u = min_u;
  cert.max_abs_slope = std::abs(phi_inv(max_v));

  PhaseState sa = state_at(t0), sb = state_at(t1);
  double scale = std::max(1.0, max_v);
  if (bc == BoundaryCondition::neumann)
    cert.bc_residual = std::hypot(sa.v, sb.v) / scale;
  else
    cert.bc_residual = std::hypot(sb.u - sa.u, sb.v - sa.v) / scale;

  // Weak-form residual against hat test functions on the cell partition.
  std::vector<double> cuts = edges_between(p.weight, t0, t1);
  double worst = 0.0;
  for (int node = 1; node < cells; ++node) {
    const double xm = t0 + cell * (node - 1);
    const double xc = t0 + cell * node;
    const double xp = xc + cell;
    double r = 0.0;
    double fmax = 0.0;
    auto accumulate_half = [&](double lo, double hi, bool rising) {
      // psi on [xm, xc] rises 0 -> 1; on [xc, xp] falls 1 -> 0.
      auto integrand = [&](double t) {
        double psi = rising ? (t - xm) / cell : (xp - t) / cell;
        double dpsi = rising ? 1.0 / cell : -1.0 / cell;
        double f = field(t);
        fmax = std::max(fmax, std::abs(f));
        return state_at(t).v * dpsi - f * psi;
      };
      double a = lo;
      for (double c : cuts) {
        if (c <= lo || c >= hi) continue;
        r += gauss7(integrand, a, c);
        a = c;
      }
      r += gauss7(integrand, a, hi);
    };
    accumulate_half(xm, xc, true);
    accumulate_half(xc, xp, false);
    worst = std::max(worst, std::abs(r) / std::max(1.0, fmax * 2.0 * cell));
  }
  cert.weak_residual = worst;
  return cert;
}

SolutionCertificate verify_solution(const Problem& p, BoundaryCondition bc,
                                    const Trajectory& traj) {
  SolutionCertificate cert = verify_solution(
      p, bc, [&](double t) { return traj.eval(t); }, traj.times().front(),
      traj.times().back());
  // Sharpen the extrema using the trajectory's interpolant-aware scans.
  cert.min_u = traj.min_u();
  cert.max_abs_slope = std::abs(phi_inv(traj.max_abs_v()));
  double scale = std::max(1.0, traj.max_abs_v());
  PhaseState sa = traj.eval(traj.times().front());
  PhaseState sb = traj.eval(traj.times().back());
  if (bc == BoundaryCondition::neumann)
    cert.bc_residual = std::hypot(sa.v, sb.v) / scale;
  else
    cert.bc_residual = std::hypot(sb.u - sa.u, sb.v - sa.v) / scale;
  return cert;
}

Solution build_solution(const Problem& p, BoundaryCondition bc, Trajectory traj) {
  Solution s;
  s.bc = bc;
  s.sup_norm = traj.sup_norm_u();
  s.max_point = traj.argmax_u();
  s.certificate = verify_solution(p, bc, traj);
  s.trajectory = std::move(traj);
  return s;
}

// --- Neumann ---------------------------------------------------------------------

namespace {

struct RefinedRoot {
  double c = 0.0;
  Trajectory traj;
  double normalized_residual = 0.0;
};

// Safeguarded bisection/secant on the Neumann residual over a sign-change
// bracket. Returns nothing when integration fails inside the bracket or the
// normalized residual cannot be brought below threshold.
std::optional<RefinedRoot> refine_bracket(const Problem& p, double a, double ra, double b,
                                          double rb, std::string* why_not) {
  const double T = p.weight.period();
  double best_c = std::abs(ra) <= std::abs(rb) ? a : b;
  double best_raw = std::min(std::abs(ra), std::abs(rb));
  for (int iter = 0; iter < 200; ++iter) {
    double w = b - a;
    if (!(w > 1e-15 * std::max(1.0, std::abs(b)))) break;
    double cs = b - rb * w / (rb - ra);
    bool secant_ok =
        std::isfinite(cs) && cs > a + 0.01 * w && cs < b - 0.01 * w && (iter % 4 != 3);
    double c = secant_ok ? cs : 0.5 * (a + b);
    double rc;
    bool have = false;
    for (int attempt = 0; attempt < 2 && !have; ++attempt) {
      try {
        rc = neumann_residual(p, c);
        have = std::isfinite(rc);
      } catch (const numeric_error&) {
        have = false;
      }
      if (!have) {
        if (c == 0.5 * (a + b)) break;
        c = 0.5 * (a + b);
      }
    }
    if (!have) {
      if (why_not) *why_not = "integration failed inside the bracket";
      return std::nullopt;
    }
    if (std::abs(rc) < best_raw) {
      best_raw = std::abs(rc);
      best_c = c;
    }
    if (best_raw < 1e-10) break;  // normalized residual <= raw residual
    if ((rc < 0.0) == (ra < 0.0)) {
      a = c;
      ra = rc;
    } else {
      b = c;
      rb = rc;
    }
  }
  try {
    Trajectory tr = shoot(p, {best_c, 0.0}, 0.0, T);
    double raw = std::abs(tr.end_state().v);
    double norm = raw / residual_scale(tr);
    if (!(norm < 1e-10)) {
      if (why_not) *why_not = "refined residual stayed above threshold";
      return std::nullopt;
    }
    return RefinedRoot{best_c, std::move(tr), norm};
  } catch (const numeric_error& e) {
    if (why_not) *why_not = e.what();
    return std::nullopt;
  }
}

}  // namespace

std::vector<Solution> solve_neumann(const Problem& p, const ScanRange& scan,
                                    std::vector<ScanFailure>* failures) {
  if (!(scan.c_min > 0.0) || !(scan.c_max > scan.c_min))
    throw domain_error("neumann scan: need 0 < c_min < c_max");
  const int n = std::max(scan.n_points, 2);
  const double T = p.weight.period();

  struct GridPoint {
    double c = 0.0, r = 0.0;
    bool ok = false;
    std::string err;
  };
  std::vector<GridPoint> grid(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    GridPoint& gp = grid[j];
    gp.c = scan.c_min + (scan.c_max - scan.c_min) * static_cast<double>(j) / (n - 1);
    try {
      gp.r = neumann_residual(p, gp.c);
      gp.ok = std::isfinite(gp.r);
      if (!gp.ok) gp.err = "non-finite residual";
    } catch (const numeric_error& e) {
      gp.err = e.what();
    } catch (const domain_error& e) {
      gp.err = e.what();
    }
  });
  if (failures)
    for (const auto& gp : grid)
      if (!gp.ok) failures->push_back({gp.c, gp.err});

  std::vector<RefinedRoot> roots;
  for (int j = 0; j < n; ++j) {
    if (!grid[j].ok) continue;
    if (grid[j].r == 0.0) {
      // Exact root on the grid (e.g. symmetric coincidences).
      try {
        Trajectory tr = shoot(p, {grid[j].c, 0.0}, 0.0, T);
        roots.push_back({grid[j].c, std::move(tr), 0.0});
      } catch (const numeric_error&) {
      }
      continue;
    }
    if (j + 1 >= n || !grid[j + 1].ok) continue;
    if (!(grid[j].r * grid[j + 1].r < 0.0)) continue;
    std::string why;
    auto refined = refine_bracket(p, grid[j].c, grid[j].r, grid[j + 1].c, grid[j + 1].r, &why);
    if (refined)
      roots.push_back(std::move(*refined));
    else if (failures)
      failures->push_back({0.5 * (grid[j].c + grid[j + 1].c), "bracket dropped: " + why});
  }

  // Deduplicate roots closer than 1e-8 in u(0), keeping the better residual.
  std::sort(roots.begin(), roots.end(),
            [](const RefinedRoot& x, const RefinedRoot& y) { return x.c < y.c; });
  std::vector<RefinedRoot> unique_roots;
  for (auto& r : roots) {
    if (!unique_roots.empty() && std::abs(r.c - unique_roots.back().c) < 1e-8) {
      if (r.normalized_residual < unique_roots.back().normalized_residual)
        unique_roots.back() = std::move(r);
    } else {
      unique_roots.push_back(std::move(r));
    }
  }

  std::vector<Solution> sols;
  sols.reserve(unique_roots.size());
  for (auto& r : unique_roots)
    sols.push_back(build_solution(p, BoundaryCondition::neumann, std::move(r.traj)));
  return sols;
}

// --- periodic ---------------------------------------------------------------------

namespace {

struct PeriodicCandidate {
  bool ok = false;
  Trajectory traj;
  std::string diag;
};

PeriodicCandidate newton_periodic(const Problem& q, PhaseState x, double u_cap) {
  PeriodicCandidate out;
  const double T = q.weight.period();
  auto period_defect = [&](PhaseState s, Trajectory* keep) -> std::pair<double, double> {
    Trajectory tr = shoot(q, s, 0.0, T);
    PhaseState e = tr.end_state();
    std::pair<double, double> S{e.u - s.u, e.v - s.v};
    if (keep) *keep = std::move(tr);
    return S;
  };
  try {
    for (int it = 0; it < 50; ++it) {
      if (!(std::abs(x.u) <= u_cap)) {
        out.diag = "iterate left the search region";
        return out;
      }
      Trajectory tr;
      auto S = period_defect(x, &tr);
      double ns = std::hypot(S.first, S.second);
      // Per-component acceptance at 10x the integrator's own error scale: a
      // huge momentum must not excuse a defect in u (u moves at speed < 1,
      // so max(T, |u0|) is its natural scale), and a defect in v is measured
      // against the orbit's own momentum range. In particular a residual the
      // integrator resolves as genuinely nonzero is never accepted.
      double accept_u = 10.0 * (q.tol.rel * std::max(T, std::abs(x.u)) + q.tol.abs);
      double accept_v =
          10.0 * (q.tol.rel * std::max(tr.max_abs_v(), std::abs(x.v)) + q.tol.abs);
      if (std::abs(S.first) <= accept_u && std::abs(S.second) <= accept_v) {
        out.ok = true;
        out.traj = std::move(tr);
        return out;
      }
      double hu = 1e-7 * std::max(1.0, std::abs(x.u));
      double hv = 1e-7 * std::max(1.0, std::abs(x.v));
      auto Su = period_defect({x.u + hu, x.v}, nullptr);
      auto Sv = period_defect({x.u, x.v + hv}, nullptr);
      double j00 = (Su.first - S.first) / hu, j01 = (Sv.first - S.first) / hv;
      double j10 = (Su.second - S.second) / hu, j11 = (Sv.second - S.second) / hv;
      double det = j00 * j11 - j01 * j10;
      double mag = std::max(std::abs(j00 * j11), std::abs(j01 * j10));
      if (!(std::abs(det) > 1e-14 * std::max(mag, 1e-300))) {
        out.diag = "singular Jacobian in the period map";
        return out;
      }
      double du = (-S.first * j11 + S.second * j01) / det;
      double dv = (-S.second * j00 + S.first * j10) / det;
      bool improved = false;
      double damp = 1.0;
      for (int ls = 0; ls < 9; ++ls, damp *= 0.5) {
        PhaseState xn{x.u + damp * du, x.v + damp * dv};
        try {
          auto Sn = period_defect(xn, nullptr);
          if (std::hypot(Sn.first, Sn.second) < ns) {
            x = xn;
            improved = true;
            break;
          }
        } catch (const numeric_error&) {
          continue;  // shorter step may stay in the integrable region
        }
      }
      if (!improved) {
        out.diag = "damped step produced no decrease";
        return out;
      }
    }
    out.diag = "no convergence within 50 iterations";
  } catch (const numeric_error& e) {
    out.diag = e.what();
  }
  return out;
}

// Symmetric-orbit seeds for a weight with exactly one constant positive piece
// followed by one constant nonpositive piece: positive periodic orbits are
// then reflection-symmetric about both piece midpoints, so they are the roots
// of the scalar map P -> v(mid-negativity) for the flow started at
// (P, 0) from mid-positivity. Each root is flowed back to t = 0 as a seed.
void append_symmetric_seeds(const Problem& q, double c_max, std::vector<PhaseState>& seeds) {
  const auto& pieces = q.weight.pieces();
  if (pieces.size() != 2 || !pieces[0].is_constant || !pieces[1].is_constant) return;
  if (!(pieces[0].value > 0.0) || !(pieces[1].value <= 0.0)) return;
  const double tau = pieces[0].t1, T = q.weight.period();
  const double tp = 0.5 * tau, tn = tau + 0.5 * (T - tau);
  auto psi = [&](double P) { return shoot(q, {P, 0.0}, tp, tn).end_state().v; };

  const int grid = 48;
  double prev_P = 0.0, prev_val = 0.0;
  bool prev_ok = false;
  for (int i = 1; i <= grid; ++i) {
    double P = c_max * i / grid;
    double val = 0.0;
    bool ok = true;
    try {
      val = psi(P);
      ok = std::isfinite(val);
    } catch (const numeric_error&) {
      ok = false;
    }
    if (ok && prev_ok && prev_val * val < 0.0) {
      double a = prev_P, b = P;
      bool a_neg = prev_val < 0.0;
      bool failed = false;
      for (int it = 0; it < 60 && !failed; ++it) {
        double m = 0.5 * (a + b);
        try {
          if ((psi(m) < 0.0) == a_neg)
            a = m;
          else
            b = m;
        } catch (const numeric_error&) {
          failed = true;
        }
      }
      if (!failed) {
        try {
          PhaseState s0 = shoot(q, {0.5 * (a + b), 0.0}, tp, 0.0).eval(0.0);
          seeds.push_back(s0);
        } catch (const numeric_error&) {
        }
      }
    }
    prev_P = P;
    prev_val = val;
    prev_ok = ok;
  }
}

}  // namespace

std::vector<Solution> solve_periodic(const Problem& p, const std::vector<PhaseState>& extra_guesses,
                                     std::vector<std::string>* diagnostics) {
  WeightFunction w = p.weight;
  double shift = 0.0;
  try {
    auto norm = p.weight.normalized_start_positive();
    w = std::move(norm.weight);
    shift = norm.shift;
  } catch (const domain_error&) {
    // No positivity interval: solve in the original frame (trivial states).
  }
  if (diagnostics && shift != 0.0)
    diagnostics->push_back("weight rotated by " + format_double(shift) +
                           " so that positivity starts at t = 0");

  Problem q{w, p.nonlinearity, p.lambda, p.tol};
  const double T = w.period();
  const double c_max = 10.0 + T;

  std::vector<PhaseState> seeds = extra_guesses;
  std::vector<ScanFailure> neumann_failures;
  for (const auto& s : solve_neumann(q, {1e-3, c_max, 600}, &neumann_failures))
    seeds.push_back({s.u0(), 0.0});
  for (int i = 1; i <= 12; ++i)
    for (int j = 0; j <= 6; ++j)
      seeds.push_back({c_max * i / 12.0, -3.0 + j});
  append_symmetric_seeds(q, c_max, seeds);

  // Newton iterates wandering far outside the seeded amplitude box are
  // spurious (u advances at speed < 1, so genuine orbits stay comparable to
  // their seeds); reject them instead of polishing an artifact.
  double u_cap = c_max + T + 1.0;
  for (const auto& g : extra_guesses) u_cap = std::max(u_cap, std::abs(g.u) + T + 1.0);

  std::vector<PeriodicCandidate> cands(seeds.size());
  parallel_for(seeds.size(),
               [&](std::size_t i) { cands[i] = newton_periodic(q, seeds[i], u_cap); });

  std::vector<const PeriodicCandidate*> converged;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].ok) {
      converged.push_back(&cands[i]);
    } else if (diagnostics) {
      diagnostics->push_back("seed (" + format_double(seeds[i].u, 6) + ", " +
                             format_double(seeds[i].v, 6) + ") rejected: " + cands[i].diag);
    }
  }
  std::sort(converged.begin(), converged.end(),
            [](const PeriodicCandidate* a, const PeriodicCandidate* b) {
              PhaseState sa = a->traj.start_state(), sb = b->traj.start_state();
              return sa.u != sb.u ? sa.u < sb.u : sa.v < sb.v;
            });

  std::vector<Solution> sols;
  for (const PeriodicCandidate* c : converged) {
    PhaseState s0 = c->traj.start_state();
    // Orbits whose entire momentum budget lambda ||a||_L1 g(sup u) (plus the
    // linear-extension part when u dips negative) sits below the acceptance
    // floor are indistinguishable from the trivial equilibrium u == 0: the
    // period map converged only because its true residual is smaller than
    // the integrator can certify as nonzero. Skip them.
    double amp_pos = std::max(0.0, c->traj.sup_norm_u());
    double amp_neg = std::max(0.0, -c->traj.min_u());
    double budget = q.lambda * w.l1_norm() * q.nonlinearity.g(amp_pos) + T * amp_neg;
    if (budget < 1e3 * q.tol.abs) {
      if (diagnostics)
        diagnostics->push_back("orbit through (" + format_double(s0.u, 6) + ", " +
                               format_double(s0.v, 6) +
                               ") dropped: indistinguishable from the trivial equilibrium at "
                               "the working tolerance");
      continue;
    }
    bool dup = false;
    for (const Solution& s : sols) {
      double scale = std::max({1.0, std::abs(s.u0()), std::abs(s.v0())});
      if (std::hypot(s0.u - s.u0(), s0.v - s.v0()) < 1e-7 * scale) {
        dup = true;
        break;
      }
    }
    if (!dup) sols.push_back(build_solution(q, BoundaryCondition::periodic, c->traj));
  }
  return sols;
}

}  // namespace minkbvp
