#include "minkbvp/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minkbvp {

namespace {

Problem with_param(const Problem& base, BranchParam which, double value) {
  Problem q = base;
  if (which == BranchParam::lambda) {
    if (!(value > 0.0)) throw domain_error("branch: lambda must stay positive");
    q.lambda = value;
  } else {
    if (base.nonlinearity.kind() != NonlinearityKind::power_exp)
      throw domain_error("branch: parameter kappa requires the power_exp nonlinearity");
    q.nonlinearity =
        Nonlinearity::power_exp(base.nonlinearity.p(), value, base.nonlinearity.scale());
  }
  return q;
}

struct Eval {
  double F = 0.0;     // raw shooting residual v(T)
  Trajectory traj;
};

Eval eval_shot(const Problem& base, BranchParam which, double param, double c) {
  Problem q = with_param(base, which, param);
  HomotopyParams hp;
  hp.lambda = q.lambda;
  Eval e;
  e.traj = integrate(q.weight, q.nonlinearity, hp, nullptr, {c, 0.0}, 0.0, q.weight.period(),
                     q.tol);
  e.F = e.traj.end_state().v;
  return e;
}

struct Corrected {
  double param = 0.0, c = 0.0;
  double sup_norm = 0.0, bc_residual = 0.0;
  int iterations = 0;
};

// Newton in c at a fixed parameter value, seeded at c_seed. Converges on the
// Newton step size (the raw residual scale varies over ~30 orders along the
// catalogue branches); the final point must pass the normalized residual
// check to count.
std::optional<Corrected> natural_newton(const Problem& base, BranchParam which, double param,
                                        double c_seed) {
  double c = c_seed;
  try {
    for (int it = 0; it < 30; ++it) {
      Eval e0 = eval_shot(base, which, param, c);
      double h = 1e-7 * std::max(1.0, std::abs(c));
      Eval e1 = eval_shot(base, which, param, c + h);
      double dF = (e1.F - e0.F) / h;
      if (!(std::abs(dF) > 0.0)) return std::nullopt;
      double dc = -e0.F / dF;
      c += dc;
      if (std::abs(dc) <= 1e-12 * std::max(1.0, std::abs(c))) {
        Eval ef = eval_shot(base, which, param, c);
        double norm = std::abs(ef.F) / std::max(1.0, ef.traj.max_abs_v());
        if (!(norm < 1e-9)) return std::nullopt;
        Corrected out;
        out.param = param;
        out.c = c;
        out.sup_norm = ef.traj.sup_norm_u();
        out.bc_residual = norm;
        out.iterations = it + 1;
        return out;
      }
    }
  } catch (const error&) {
  }
  return std::nullopt;
}

// Corrector for one pseudo-arclength step: Newton on
//   F(param(pn), c) = 0,
//   tp (pn - pn_pred) + tc (c - c_pred) = 0
// in the normalized coordinates x = (pn, c).
std::optional<Corrected> arclength_correct(const Problem& base, BranchParam which, double p_min,
                                           double width, double pn_pred, double c_pred,
                                           double tp, double tc) {
  double pn = pn_pred, c = c_pred;
  try {
    for (int it = 0; it < 25; ++it) {
      double param = p_min + pn * width;
      Eval e0 = eval_shot(base, which, param, c);
      double g2 = tp * (pn - pn_pred) + tc * (c - c_pred);
      double hp = 1e-7;
      double hc = 1e-7 * std::max(1.0, std::abs(c));
      Eval ep = eval_shot(base, which, p_min + (pn + hp) * width, c);
      Eval ec = eval_shot(base, which, param, c + hc);
      double Fp = (ep.F - e0.F) / hp;
      double Fc = (ec.F - e0.F) / hc;
      double det = Fp * tc - Fc * tp;
      double mag = std::max(std::abs(Fp * tc), std::abs(Fc * tp));
      if (!(std::abs(det) > 1e-14 * std::max(mag, 1e-300))) return std::nullopt;
      double dpn = (-e0.F * tc + g2 * Fc) / det;
      double dc = (-g2 * Fp + e0.F * tp) / det;
      pn += dpn;
      c += dc;
      if (std::max(std::abs(dpn), std::abs(dc) / std::max(1.0, std::abs(c))) <= 1e-12) {
        double pf = p_min + pn * width;
        Eval ef = eval_shot(base, which, pf, c);
        double norm = std::abs(ef.F) / std::max(1.0, ef.traj.max_abs_v());
        if (!(norm < 1e-9)) return std::nullopt;
        Corrected out;
        out.param = pf;
        out.c = c;
        out.sup_norm = ef.traj.sup_norm_u();
        out.bc_residual = norm;
        out.iterations = it + 1;
        return out;
      }
    }
  } catch (const error&) {
  }
  return std::nullopt;
}

BranchPoint to_point(const Corrected& c) {
  BranchPoint bp;
  bp.param = c.param;
  bp.u0 = c.c;
  bp.sup_norm = c.sup_norm;
  bp.bc_residual = c.bc_residual;
  return bp;
}

}  // namespace

Branch trace_branch(const Problem& p, BranchParam which, double start_param,
                    const Solution& start, std::pair<double, double> range,
                    int initial_direction, const TraceOptions& opt) {
  const double p_min = range.first, p_max = range.second;
  if (!(p_min < p_max)) throw domain_error("branch: invalid parameter range");
  if (!(start_param >= p_min && start_param <= p_max))
    throw domain_error("branch: start parameter outside the range");
  if (!(opt.step > 0.0)) throw domain_error("branch: step must be positive");
  if (!(start.certificate.bc_residual < 1e-9))
    throw domain_error("branch: start solution is not certified");
  const double width = p_max - p_min;

  Branch br;
  br.direction = initial_direction >= 0 ? +1 : -1;

  BranchPoint first;
  first.param = start_param;
  first.u0 = start.u0();
  first.sup_norm = start.sup_norm;
  first.bc_residual = start.certificate.bc_residual;
  br.points.push_back(first);

  std::vector<double> marks = opt.marks;
  std::sort(marks.begin(), marks.end());

  // Inserts exactly-corrected points at every mark strictly between p_from
  // and p_to, in crossing order, seeding from the segment's endpoints.
  auto insert_marks = [&](double p_from, double c_from, double p_to, double c_to) {
    std::vector<double> hit;
    for (double m : marks)
      if ((m - p_from) * (m - p_to) < 0.0) hit.push_back(m);
    std::sort(hit.begin(), hit.end(), [&](double a, double b) {
      return std::abs(a - p_from) < std::abs(b - p_from);
    });
    for (double m : hit) {
      double c_seed = c_from + (c_to - c_from) * (m - p_from) / (p_to - p_from);
      if (auto corr = natural_newton(p, which, m, c_seed)) br.points.push_back(to_point(*corr));
    }
  };

  // Degenerate family: residual and its c-derivative both vanish (g == 0 for
  // every u); the branch is a horizontal line of fixed points.
  {
    Eval e0 = eval_shot(p, which, start_param, first.u0);
    double h = 1e-7 * std::max(1.0, std::abs(first.u0));
    Eval e1 = eval_shot(p, which, start_param, first.u0 + h);
    if (std::abs(e0.F) < 1e-14 && std::abs((e1.F - e0.F) / h) < 1e-14) {
      double pn = (start_param - p_min) / width;
      double dir = br.direction;
      while (br.points.size() < opt.max_points) {
        pn += dir * opt.step;
        if (pn <= 0.0 || pn >= 1.0) {
          double boundary = pn <= 0.0 ? p_min : p_max;
          Eval eb = eval_shot(p, which, boundary, first.u0);
          BranchPoint bp = first;
          bp.param = boundary;
          bp.sup_norm = eb.traj.sup_norm_u();
          br.points.push_back(bp);
          br.termination = "range exit";
          return br;
        }
        Eval eb = eval_shot(p, which, p_min + pn * width, first.u0);
        BranchPoint bp = first;
        bp.param = p_min + pn * width;
        bp.sup_norm = eb.traj.sup_norm_u();
        br.points.push_back(bp);
      }
      br.termination = "point budget exhausted";
      return br;
    }
  }

  double step0 = opt.step;
  double step = step0;
  int easy_streak = 0;
  double pn_cur = (start_param - p_min) / width, c_cur = first.u0;
  bool have_prev = false;
  double pn_prev = 0.0, c_prev = 0.0;

  while (br.points.size() < opt.max_points) {
    double tp, tc;
    if (have_prev) {
      tp = pn_cur - pn_prev;
      tc = c_cur - c_prev;
      double norm = std::hypot(tp, tc);
      if (!(norm > 0.0)) {
        br.termination = "tangent degenerated";
        break;
      }
      tp /= norm;
      tc /= norm;
    } else {
      tp = static_cast<double>(br.direction);
      tc = 0.0;
    }

    double pn_pred = pn_cur + step * tp;
    double c_pred = c_cur + step * tc;

    if (pn_pred <= 0.0 || pn_pred >= 1.0) {
      // Finish with an exactly-corrected point on the range boundary.
      double boundary_pn = pn_pred <= 0.0 ? 0.0 : 1.0;
      double boundary = boundary_pn <= 0.0 ? p_min : p_max;
      double c_seed =
          std::abs(tp) > 1e-12 ? c_cur + (boundary_pn - pn_cur) * (tc / tp) : c_cur;
      if (auto corr = natural_newton(p, which, boundary, c_seed)) {
        double p_from = p_min + pn_cur * width;
        insert_marks(p_from, c_cur, corr->param, corr->c);
        br.points.push_back(to_point(*corr));
        br.termination = "range exit";
      } else {
        br.termination = "range exit (boundary correction failed)";
      }
      break;
    }

    auto corr = arclength_correct(p, which, p_min, width, pn_pred, c_pred, tp, tc);
    bool ok = false;
    if (corr) {
      double pn_new = (corr->param - p_min) / width;
      double dist = std::hypot(pn_new - pn_cur, corr->c - c_cur);
      ok = dist <= 1.5 * step && dist > 0.0;
      if (ok) {
        double p_from = p_min + pn_cur * width;
        insert_marks(p_from, c_cur, corr->param, corr->c);
        br.points.push_back(to_point(*corr));
        pn_prev = pn_cur;
        c_prev = c_cur;
        pn_cur = pn_new;
        c_cur = corr->c;
        have_prev = true;
        easy_streak = (corr->iterations <= 4) ? easy_streak + 1 : 0;
        if (easy_streak >= 5 && step < 4.0 * step0) {
          step = std::min(2.0 * step, 4.0 * step0);
          easy_streak = 0;
        }
        if (corr->sup_norm > opt.sup_ceiling) {
          br.termination = "sup-norm ceiling";
          break;
        }
      }
    }
    if (!ok) {
      step *= 0.5;
      easy_streak = 0;
      if (step < step0 / 64.0) {
        br.termination = "corrector failed at minimum step";
        break;
      }
    }
  }
  if (br.termination.empty()) br.termination = "point budget exhausted";

  br.folds = detect_folds(br.points);
  for (const Fold& f : br.folds)
    if (f.index < br.points.size()) br.points[f.index].is_fold = true;
  return br;
}

std::vector<Fold> detect_folds(const std::vector<BranchPoint>& points) {
  std::vector<Fold> folds;
  if (points.size() < 3) return folds;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    double d1 = points[i].param - points[i - 1].param;
    double d2 = points[i + 1].param - points[i].param;
    if (!(d1 * d2 < 0.0)) continue;
    // Quadratic through s = -1, 0, 1 in both coordinates; vertex of param(s).
    double pm = points[i - 1].param, p0 = points[i].param, pp = points[i + 1].param;
    double um = points[i - 1].u0, u0 = points[i].u0, up = points[i + 1].u0;
    double a = 0.5 * (pp + pm) - p0;
    double b = 0.5 * (pp - pm);
    Fold f;
    f.index = i;
    if (a != 0.0) {
      double s = -b / (2.0 * a);
      s = std::clamp(s, -1.0, 1.0);
      f.param = p0 + b * s + a * s * s;
      double au = 0.5 * (up + um) - u0;
      double bu = 0.5 * (up - um);
      f.u0 = u0 + bu * s + au * s * s;
    } else {
      f.param = p0;
      f.u0 = u0;
    }
    folds.push_back(f);
  }
  return folds;
}

std::vector<Fold> detect_folds(const Branch& b) { return detect_folds(b.points); }

std::vector<BlowupRow> blowup_probe(const Problem& p, const std::vector<double>& lambdas,
                                    std::string* truncation_reason) {
  if (lambdas.empty()) return {};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw domain_error("blow-up probe: lambdas must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
      throw domain_error("blow-up probe: lambdas must be strictly decreasing");
  }

  std::vector<BlowupRow> rows;
  Problem q = p;
  q.lambda = lambdas.front();
  double c_max = 10.0 + p.weight.period();
  int n_scan = static_cast<int>(600.0 * (c_max - 1e-3)) + 1;
  auto sols = solve_neumann(q, {1e-3, c_max, n_scan}, nullptr);
  if (sols.empty()) {
    if (truncation_reason) *truncation_reason = "no solution at the initial lambda";
    return rows;
  }
  double c = sols.front().u0();
  {
    const Solution& s = sols.front();
    rows.push_back({lambdas.front(), s.u0(), s.sup_norm});
  }

  // Natural continuation in log(lambda) with secant-seeded Newton.
  double log_cur = std::log(lambdas.front());
  double log_prev = log_cur;
  double c_prev = c;
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    double log_target = std::log(lambdas[k]);
    double max_drop = std::log(1.6);
    while (log_cur > log_target) {
      double log_next = std::max(log_target, log_cur - max_drop);
      double c_seed = c;
      if (log_cur != log_prev)
        c_seed = c + (c - c_prev) * (log_next - log_cur) / (log_cur - log_prev);
      auto corr = natural_newton(p, BranchParam::lambda, std::exp(log_next), c_seed);
      if (!corr) {
        max_drop *= 0.5;
        if (max_drop < 1e-4) {
          if (truncation_reason)
            *truncation_reason =
                "continuation stalled near lambda = " + format_double(std::exp(log_cur), 6);
          return rows;
        }
        continue;
      }
      log_prev = log_cur;
      c_prev = c;
      log_cur = log_next;
      c = corr->c;
      max_drop = std::log(1.6);
      if (log_cur == log_target) rows.push_back({lambdas[k], corr->c, corr->sup_norm});
    }
  }
  return rows;
}

}  // namespace minkbvp
