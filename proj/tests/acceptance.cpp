// Acceptance harness: each numbered check prints one line
//   CRITERION N: PASS|FAIL — <measured details>
// and the process exits 0 only if every selected check passed.
// Run with no arguments for all checks, or `--criterion N` for one.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minkbvp/bvp.hpp"
#include "minkbvp/certificates.hpp"
#include "minkbvp/continuation.hpp"
#include "minkbvp/phase_flow.hpp"
#include "oracles.hpp"

using namespace minkbvp;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

double rel(double measured, double reference) {
  return std::abs(measured - reference) / std::abs(reference);
}

std::string num(double x, int digits = 10) { return format_double(x, digits); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeightFunction two_piece(double neg = 10.0) {
  return WeightFunction::step(2.0, {1.0}, {1.0, -neg});
}
WeightFunction three_piece(double neg = 10.0) {
  return WeightFunction::step(4.0, {1.0, 3.0}, {-neg, 1.0, -neg});
}

Problem exp_problem(const WeightFunction& w, double lambda) {
  return Problem{w, Nonlinearity::exp_power(2.0), lambda};
}

Problem rate_problem(double kappa) {
  return Problem{two_piece(), Nonlinearity::power_exp(2.0, kappa), 1.0};
}

// u(0) of the unique branch solution at this multiplier; NaN when absent.
double branch_u0(const WeightFunction& w, double lambda) {
  std::vector<Solution> sols = solve_neumann(exp_problem(w, lambda), {1e-3, 12.0, 1500});
  return sols.size() == 1 ? sols[0].u0() : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion1() {
  const double lambdas[] = {0.5, 1.0, 2.0, 3.0};
  const double anchors[] = {1.007387157, 0.6936476186, 0.4074591866, 0.2828962595};
  auto t0 = std::chrono::steady_clock::now();
  double max_rel = 0.0;
  std::ostringstream vals;
  for (int k = 0; k < 4; ++k) {
    double u0 = branch_u0(two_piece(), lambdas[k]);
    max_rel = std::max(max_rel, rel(u0, anchors[k]));
    vals << (k ? ", " : "") << "lambda=" << num(lambdas[k], 3) << ": " << num(u0);
  }
  double elapsed = seconds_since(t0);
  double alt_rel = 0.0;  // same anchors against the weight with negative level 4
  for (int k = 0; k < 4; ++k)
    alt_rel = std::max(alt_rel, rel(branch_u0(two_piece(4.0), lambdas[k]), anchors[k]));
  Outcome out;
  out.pass = max_rel <= 1e-3 && elapsed < 10.0;
  out.details = "max rel delta " + num(max_rel, 4) + " against the reference anchors (tol 1e-3), " +
                num(elapsed, 3) + "s; measured " + vals.str() +
                "; the same anchors match the weight with negative level 4 to max rel " +
                num(alt_rel, 4);
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream d;
  bool ok = true;

  std::vector<Solution> at1 = solve_neumann(rate_problem(1.0), {1e-3, 12.0, 7199});
  if (at1.size() == 2) {
    double r1 = rel(at1[0].u0(), 0.7016064121);
    double r2 = rel(at1[1].u0(), 2.412493115);
    ok = ok && r1 <= 1e-3 && r2 <= 1e-3;
    d << "rate 1 roots " << num(at1[0].u0()) << "/" << num(at1[1].u0()) << " (rel " << num(r1, 3)
      << "/" << num(r2, 3) << ")";
  } else {
    ok = false;
    d << "rate 1 gave " << at1.size() << " roots, expected 2";
  }

  std::vector<Solution> at50 = solve_neumann(rate_problem(50.0), {1e-3, 1.0, 400});
  if (at50.size() == 1) {
    TraceOptions opt;
    opt.marks = {2.0};
    Branch br = trace_branch(rate_problem(50.0), BranchParam::kappa, 50.0, at50[0],
                             {0.01, 50.0}, -1, opt);
    if (br.folds.size() == 1) {
      const Fold& f = br.folds[0];
      bool fold_ok = std::abs(f.param - 0.404) <= 0.01 && std::abs(f.u0 - 1.35) <= 0.02;
      ok = ok && fold_ok;
      d << "; fold at rate " << num(f.param, 6) << ", u0 " << num(f.u0, 6)
        << (fold_ok ? "" : " [outside the 0.404+-0.01 / 1.35+-0.02 boxes]");
    } else {
      ok = false;
      d << "; " << br.folds.size() << " folds, expected 1";
    }
    double upper = std::numeric_limits<double>::quiet_NaN();
    for (const BranchPoint& q : br.points)
      if (q.param == 2.0 && !(upper > q.u0)) upper = q.u0;
    double r = rel(upper, 7.455302297);
    ok = ok && r <= 0.01;
    d << "; upper arm at rate 2: " << num(upper) << " (rel " << num(r, 3) << ")";
  } else {
    ok = false;
    d << "; rate 50 start gave " << at50.size() << " roots, expected 1";
  }

  double elapsed = seconds_since(t0);
  ok = ok && elapsed < 60.0;
  d << "; " << num(elapsed, 3) << "s";
  Outcome out;
  out.pass = ok;
  out.details = d.str();
  return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion3() {
  Nonlinearity n = Nonlinearity::exp_power(2.0);
  HomotopyParams hp;
  auto endpoints = [&](const WeightFunction& w, double& u_end, double& slope_end) {
    // The family is centered at t = 2 (source coordinate 0); by symmetry the
    // two endpoints agree, and both are integrated explicitly.
    Trajectory left = integrate(w, n, hp, nullptr, {0.693648, 0.0}, 2.0, 0.0, {});
    Trajectory right = integrate(w, n, hp, nullptr, {0.693648, 0.0}, 2.0, 4.0, {});
    u_end = std::max(left.u(0.0), right.u(4.0));
    slope_end = std::max(std::abs(left.slope(0.0)), std::abs(right.slope(4.0)));
  };
  double u_end = 0.0, slope_end = 0.0;
  endpoints(three_piece(), u_end, slope_end);
  double delta = std::abs(u_end - 0.267815);
  double alt_u = 0.0, alt_slope = 0.0;
  endpoints(three_piece(4.0), alt_u, alt_slope);
  Outcome out;
  out.pass = delta <= 5e-4 && slope_end < 1e-3;
  out.details = "endpoint u " + num(u_end) + " vs 0.267815 (|delta| " + num(delta, 4) +
                ", tol 5e-4), endpoint |slope| " + num(slope_end, 4) +
                " (tol 1e-3); the weight with negative level 4 reaches endpoint u " +
                num(alt_u) + ", |slope| " + num(alt_slope, 4);
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion4() {
  ConstantsResult c45 = compute_constants(two_piece(), Nonlinearity::power_exp(2.0, 45.0));
  ConstantsResult c30 = compute_constants(two_piece(), Nonlinearity::power_exp(2.0, 30.0));
  bool area_ok = c45.ok && c45.constants.window_area.size() == 1 &&
                 std::abs(c45.constants.window_area[0] - 0.25) <= 1e-12;
  bool neg_ok = c45.ok && c45.constants.neg_sup == 10.0;
  bool k_ok = c45.ok && c45.constants.K == 40.0;
  bool se_ok = c45.threshold.pass && !c30.threshold.pass;
  Outcome out;
  out.pass = area_ok && neg_ok && k_ok && se_ok;
  std::ostringstream d;
  d << "widest-window mass " << (c45.ok ? num(c45.constants.window_area[0], 17) : "n/a")
    << " (want 0.25 +- 1e-12), negative-part sup "
    << (c45.ok ? num(c45.constants.neg_sup, 17) : "n/a") << " (want 10 exactly), K "
    << (c45.ok ? num(c45.constants.K, 17) : "n/a")
    << " (want 40); growth check at rate 45: " << (c45.threshold.pass ? "pass" : "fail")
    << " (estimate " << num(c45.threshold.estimate, 8) << "), at rate 30: "
    << (c30.threshold.pass ? "pass" : "fail") << " (estimate " << num(c30.threshold.estimate, 8)
    << ")";
  out.details = d.str();
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion5() {
  WeightFunction w = three_piece();
  Nonlinearity n = Nonlinearity::exp_power(2.0);
  SignPartition part = w.sign_partition();
  HomotopyParams hp;
  auto member = [&](double c) {
    Trajectory back = integrate(w, n, hp, nullptr, {c, 0.0}, 2.0, 0.0, {});
    return integrate(w, n, hp, nullptr, back.end_state(), 0.0, 4.0, {});
  };
  bool ok = true;
  std::ostringstream d;
  double slope249 = 0.0;
  // Family members (start grid 0.49 + 0.2 k) with center value >= 2.0,
  // plus the boundary value 2.0 itself.
  for (double c : {2.0, 2.09, 2.29, 2.49}) {
    WedgeReport rep = wedge_certificate(member(c), part, 0.1);
    ok = ok && rep.pass;
    if (c == 2.49) slope249 = rep.post_max_slope;
    d << "center " << num(c, 3) << ": " << (rep.pass ? "pass" : "FAIL") << " (post slope "
      << num(rep.post_max_slope, 6) << "); ";
  }
  ok = ok && slope249 <= -0.98;
  d << "post-peak slope at 2.49 is " << num(slope249, 6) << " (need <= -0.98)";
  Outcome out;
  out.pass = ok;
  out.details = d.str();
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion6() {
  WeightFunction w = two_piece();
  Nonlinearity n = Nonlinearity::exp_power(2.0);
  HomotopyParams hp;

  // (a) first-integral drift per constant-weight piece
  Trajectory t = integrate(w, n, hp, nullptr, {0.9, 0.0}, 0.0, 2.0, {});
  double drift = 0.0;
  for (int piece = 0; piece < 2; ++piece) {
    double lo = piece, hi = piece + 1, a_const = piece == 0 ? 1.0 : -10.0;
    double e0 = energy(t.eval(lo), n, a_const, 1.0);
    for (int k = 0; k <= 200; ++k) {
      double tt = lo + (hi - lo) * k / 200.0;
      drift = std::max(drift, std::abs(energy(t.eval(tt), n, a_const, 1.0) - e0));
    }
  }

  // (b) forward-backward reversal
  PhaseState end = t.end_state();
  Trajectory back = integrate(w, n, hp, nullptr, end, 2.0, 0.0, {});
  PhaseState again = back.end_state();
  double reversal = std::hypot(again.u - 0.9, again.v - 0.0);

  // (c) observed order: least-squares slope of log error against log step over
  // four halvings, measured against a reference far below every ladder error.
  // (Per-octave ratios fluctuate with how steps align to the breakpoint; the
  // regression slope is the standard robust estimate.)
  PhaseState ref =
      integrate(w, n, hp, nullptr, {0.9, 0.0}, 0.0, 2.0, Tolerances{1e-13, 1e-14}).end_state();
  const int ladder = 4;
  double h = 1.0 / 20.0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < ladder; ++k, h /= 2.0) {
    Trajectory loose =
        integrate(w, n, hp, nullptr, {0.9, 0.0}, 0.0, 2.0, Tolerances{1.0, 1.0}, h);
    PhaseState e = loose.end_state();
    double x = -std::log2(h), y = -std::log2(std::hypot(e.u - ref.u, e.v - ref.v));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double order = (ladder * sxy - sx * sy) / (ladder * sxx - sx * sx);

  Outcome out;
  out.pass = drift < 1e-8 && reversal < 1e-8 && order >= 4.0;
  out.details = "energy drift " + num(drift, 4) + " (tol 1e-8), reversal error " +
                num(reversal, 4) + " (tol 1e-8), observed order " + num(order, 4) +
                " (need >= 4)";
  return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion7() {
  testo::Lcg rng(7777u);
  int checked = 0, agreements = 0, unit = 0;
  auto sgn = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
  while (checked < 20) {
    int cuts = rng.uniform_int(1, 3);
    double T = rng.uniform(1.5, 4.0);
    std::vector<double> breaks, values;
    double pos = 0.0;
    for (int k = 0; k < cuts; ++k) {
      pos += rng.uniform(0.2, 1.0);
      breaks.push_back(pos);
    }
    if (breaks.back() >= T) continue;
    bool has_positive = false;
    for (int k = 0; k <= cuts; ++k) {
      values.push_back(rng.uniform(-3.0, 3.0));
      has_positive = has_positive || values.back() > 0.0;
    }
    WeightFunction w = WeightFunction::step(T, breaks, values);
    if (!has_positive || w.mean_value() >= -1e-6) continue;
    ++checked;
    Nonlinearity g = checked % 3 == 0   ? Nonlinearity::power(2.0)
                     : checked % 3 == 1 ? Nonlinearity::exp_power(2.0)
                                        : Nonlinearity::power_exp(2.0, 45.0);
    double r = 1e-3;
    int deg = brouwer_degree_averaged(w, g, r);
    int oracle = (sgn(-g.g(r) * w.mean_value()) - sgn(-r)) / 2;
    if (std::abs(deg) == 1) ++unit;
    if (deg == oracle) ++agreements;
  }
  Outcome out;
  out.pass = unit == 20 && agreements == 20;
  out.details = "|degree| = 1 on " + std::to_string(unit) +
                "/20 randomized negative-mean step weights; sign-table oracle agreement " +
                std::to_string(agreements) + "/20";
  return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion8() {
  testo::Lcg rng(8888u);
  double worst = 0.0;
  int windows = 0;
  for (int trial = 0; trial < 10; ++trial) {
    testo::SampledWeightData d = testo::random_smooth_weight(rng);
    WeightFunction w = WeightFunction::sampled(d.ts, d.vs);
    SignPartition part = w.sign_partition();
    for (std::size_t i = 0; i < part.positive.size(); ++i) {
      double sigma = part.positive[i].lo, tau = part.positive[i].hi;
      double L = tau - sigma;
      double brute_min =
          testo::brute_window_min(d.ts, d.vs, sigma, tau, L / 4.0, 100000);
      worst = std::max(worst, std::abs(w.window_min_l1(i) - brute_min));
      double brute_g = testo::brute_gamma(d.ts, d.vs, sigma, tau, L / 8.0, 100000);
      worst = std::max(worst, std::abs(w.gamma(i, L / 8.0) - brute_g));
      ++windows;
    }
  }
  Outcome out;
  out.pass = worst <= 1e-6;
  out.details = "max |library - brute scan| = " + num(worst, 4) + " over " +
                std::to_string(windows) + " positivity windows on 10 sampled weights (tol 1e-6)";
  return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion9() {
  testo::Lcg rng(9999u);
  int clean = 0, trials = 0;
  std::ostringstream d;
  while (trials < 10) {
    WeightFunction w = [&] {
      if (trials == 0) return WeightFunction::step(2.0, {1.0}, {1.0, -1.0});  // mean exactly 0
      double t1 = rng.uniform(0.3, 1.2);
      double t2 = t1 + rng.uniform(0.3, 1.2);
      double T = t2 + rng.uniform(0.3, 1.2);
      std::vector<double> values = {rng.uniform(-2.0, 3.0), rng.uniform(-2.0, 3.0),
                                    rng.uniform(-2.0, 3.0)};
      WeightFunction cand = WeightFunction::step(T, {t1, t2}, values);
      double m = cand.mean_value();
      if (m < 0.0) {
        for (double& v : values) v += -m / T + 0.05;
        cand = WeightFunction::step(T, {t1, t2}, values);
      }
      return cand;
    }();
    ++trials;
    Problem p{w, Nonlinearity::exp_power(2.0), 1.0};
    std::vector<ScanFailure> failures;
    std::vector<Solution> sols = solve_neumann(p, {1e-3, 20.0, 1200}, &failures);
    bool positive_found = false;
    for (const Solution& s : sols) positive_found = positive_found || s.positive();
    if (!positive_found) ++clean;
  }
  Outcome out;
  out.pass = clean == 10;
  out.details = std::to_string(clean) +
                "/10 nonnegative-mean weights yield no positive solution scanning start "
                "heights up to 20";
  return out;
}

// --------------------------------------------------------------- criterion 10
Outcome criterion10() {
  Problem p3 = exp_problem(two_piece(), 3.0);
  std::vector<Solution> start = solve_neumann(p3, {1e-3, 12.0, 1500});
  bool monotone = false;
  std::size_t npts = 0;
  if (start.size() == 1) {
    Branch br = trace_branch(p3, BranchParam::lambda, 3.0, start[0], {1e-4, 3.0}, -1);
    npts = br.points.size();
    monotone = br.termination == "range exit" && br.points.size() > 10;
    for (std::size_t i = 0; i + 1 < br.points.size() && monotone; ++i)
      monotone = br.points[i + 1].param < br.points[i].param &&
                 br.points[i + 1].u0 > br.points[i].u0;
  }

  const double lambdas[] = {0.01, 0.001, 0.0001};
  const double anchors[] = {2.1133, 2.5521, 2.9378};
  Problem p1 = exp_problem(two_piece(), 1.0);
  std::vector<BlowupRow> rows = blowup_probe(p1, {0.01, 0.001, 0.0001});
  double max_rel = std::numeric_limits<double>::infinity();
  std::ostringstream vals;
  if (rows.size() == 3) {
    max_rel = 0.0;
    for (int k = 0; k < 3; ++k) {
      max_rel = std::max(max_rel, rel(rows[k].u0, anchors[k]));
      vals << (k ? ", " : "") << "lambda=" << num(lambdas[k], 4) << ": " << num(rows[k].u0);
    }
  }
  double alt_rel = std::numeric_limits<double>::infinity();
  std::vector<BlowupRow> alt =
      blowup_probe(exp_problem(two_piece(4.0), 1.0), {0.01, 0.001, 0.0001});
  if (alt.size() == 3) {
    alt_rel = 0.0;
    for (int k = 0; k < 3; ++k) alt_rel = std::max(alt_rel, rel(alt[k].u0, anchors[k]));
  }

  Outcome out;
  out.pass = monotone && max_rel <= 1e-3;
  out.details = std::string("u(0) strictly increasing as the multiplier decreases: ") +
                (monotone ? "yes" : "NO") + " (" + std::to_string(npts) +
                " branch points); anchors max rel delta " + num(max_rel, 4) +
                " (tol 1e-3); measured " + vals.str() +
                "; the same anchors match the weight with negative level 4 to max rel " +
                num(alt_rel, 4);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--criterion") == 0 && k + 1 < argc) {
      selected.push_back(std::atoi(argv[++k]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int k = 1; k <= 10; ++k) selected.push_back(k);

  Outcome (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                             criterion6, criterion7, criterion8, criterion9, criterion10};
  bool all_pass = true;
  for (int k : selected) {
    if (k < 1 || k > 10) {
      std::cerr << "criterion number out of range: " << k << "\n";
      return 2;
    }
    Outcome r;
    try {
      r = criteria[k - 1]();
    } catch (const std::exception& e) {
      r.pass = false;
      r.details = std::string("exception: ") + e.what();
    }
    std::cout << "CRITERION " << k << ": " << (r.pass ? "PASS" : "FAIL") << " — " << r.details
              << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}
