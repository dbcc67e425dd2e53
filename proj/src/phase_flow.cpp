#include "minkbvp/phase_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minkbvp {

double phi(double s) {
  if (!(std::abs(s) < 1.0)) throw domain_error("phi: argument must satisfy |s| < 1");
  return s / std::sqrt((1.0 - s) * (1.0 + s));
}

double phi_inv(double v) {
  double r = v / std::hypot(1.0, v);
  // Guard the open range: for |v| ~ 1e9 the quotient rounds to +-1 exactly.
  constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (r >= 1.0) return below_one;
  if (r <= -1.0) return -below_one;
  return r;
}

double energy(const PhaseState& s, const Nonlinearity& n, double a_const, double lambda) {
  if (s.u >= 0.0) return std::hypot(1.0, s.v) + lambda * a_const * n.G(s.u);
  return std::hypot(1.0, s.v) - 0.5 * s.u * s.u;
}

// --- dense output -------------------------------------------------------------

PhaseState Trajectory::eval_step(const Step& sp, double t) const {
  double s = (t - sp.t_anchor) / sp.h;
  double s1 = 1.0 - s;
  double y[2];
  for (int i = 0; i < 2; ++i)
    y[i] = sp.rc[0][i] +
           s * (sp.rc[1][i] + s1 * (sp.rc[2][i] + s * (sp.rc[3][i] + s1 * sp.rc[4][i])));
  return {y[0], y[1]};
}

PhaseState Trajectory::eval(double t) const {
  if (steps_.empty()) return states_.front();
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                             [](double val, const Step& s) { return val < s.tlo; });
  const Step& sp = (it == steps_.begin()) ? steps_.front() : *(it - 1);
  return eval_step(sp, t);
}

template <typename F>
void Trajectory::scan_extrema(F&& visit) const {
  for (std::size_t j = 0; j < states_.size(); ++j) visit(times_[j], states_[j]);
  const int m = 16;
  for (const auto& sp : steps_) {
    double width = (sp.thi - sp.tlo) / m;
    PhaseState prev = eval_step(sp, sp.tlo);
    for (int j = 1; j <= m; ++j) {
      double t = sp.tlo + width * j;
      PhaseState cur = eval_step(sp, t);
      visit(t, cur);
      // Interior extremum of u where the slope (sign of v) changes.
      if ((prev.v < 0.0 && cur.v > 0.0) || (prev.v > 0.0 && cur.v < 0.0)) {
        double ta = t - width, tb = t;
        bool prev_neg = prev.v < 0.0;
        for (int it = 0; it < 50; ++it) {
          double tm = 0.5 * (ta + tb);
          if ((eval_step(sp, tm).v < 0.0) == prev_neg)
            ta = tm;
          else
            tb = tm;
        }
        double tm = 0.5 * (ta + tb);
        visit(tm, eval_step(sp, tm));
      }
      prev = cur;
    }
  }
}

double Trajectory::sup_norm_u() const {
  double best = 0.0;
  scan_extrema([&](double, const PhaseState& s) { best = std::max(best, std::abs(s.u)); });
  return best;
}

double Trajectory::min_u() const {
  double best = std::numeric_limits<double>::infinity();
  scan_extrema([&](double, const PhaseState& s) { best = std::min(best, s.u); });
  return best;
}

double Trajectory::max_abs_v() const {
  double best = 0.0;
  scan_extrema([&](double, const PhaseState& s) { best = std::max(best, std::abs(s.v)); });
  return best;
}

double Trajectory::argmax_u() const {
  double best = -std::numeric_limits<double>::infinity();
  double at = times_.front();
  scan_extrema([&](double t, const PhaseState& s) {
    if (s.u > best) {
      best = s.u;
      at = t;
    }
  });
  return at;
}

// --- integrator ----------------------------------------------------------------

namespace {

// Dormand-Prince 5(4) tableau with the fifth-order dense-output polynomial.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Vec2 {
  double x[2];
  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }
};

bool finite2(const Vec2& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

}  // namespace

class FlowIntegrator {
 public:
  FlowIntegrator(const WeightFunction& w, const Nonlinearity& n, const HomotopyParams& hp,
                 const WeightFunction* forcing, Tolerances tol, double max_step)
      : w_(w), n_(n), hp_(hp), forcing_(forcing), tol_(tol) {
    max_step_ = max_step > 0.0 ? max_step : w.shortest_piece() / 10.0;
  }

  Trajectory run(PhaseState s0, double ta, double tb) {
    Trajectory traj;
    traj.t_req0_ = ta;
    traj.t_req1_ = tb;
    traj.times_.push_back(ta);
    traj.states_.push_back(s0);
    if (ta == tb) return traj;

    span_total_ = std::abs(tb - ta);
    const double dir = tb > ta ? 1.0 : -1.0;
    std::vector<double> cuts = breakpoints(std::min(ta, tb), std::max(ta, tb));
    if (dir < 0) std::reverse(cuts.begin(), cuts.end());

    double t = ta;
    Vec2 y{{s0.u, s0.v}};
    for (double cut : cuts) {
      integrate_subspan(traj, y, t, cut, dir);
      t = cut;
    }
    integrate_subspan(traj, y, t, tb, dir);

    if (dir < 0) {
      std::reverse(traj.times_.begin(), traj.times_.end());
      std::reverse(traj.states_.begin(), traj.states_.end());
      std::reverse(traj.steps_.begin(), traj.steps_.end());
    }
    return traj;
  }

 private:
  std::vector<double> breakpoints(double lo, double hi) const {
    std::vector<double> cuts;
    const double tol_t = 1e-12 * std::max({1.0, hi - lo, w_.period()});
    auto add_edges = [&](const WeightFunction& wf) {
      double P = wf.period();
      long k0 = static_cast<long>(std::floor(lo / P)) - 1;
      long k1 = static_cast<long>(std::ceil(hi / P)) + 1;
      for (long k = k0; k <= k1; ++k)
        for (double e : wf.edges()) {
          double tc = k * P + e;
          if (tc > lo + tol_t && tc < hi - tol_t) cuts.push_back(tc);
        }
    };
    add_edges(w_);
    if (forcing_ && hp_.alpha != 0.0) add_edges(*forcing_);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return std::abs(a - b) <= tol_t; }),
               cuts.end());
    return cuts;
  }

  void integrate_subspan(Trajectory& traj, Vec2& y, double sa, double sb, double dir) {
    if (sa == sb) return;
    const double mid = 0.5 * (sa + sb);
    // Freeze the weight (and forcing) piece for the whole sub-span so the
    // field is smooth inside it; shift maps t into the right periodic copy.
    shift_w_ = w_.period() * std::floor(mid / w_.period());
    kw_ = w_.piece_index(mid - shift_w_);
    if (forcing_ && hp_.alpha != 0.0) {
      shift_f_ = forcing_->period() * std::floor(mid / forcing_->period());
      kf_ = forcing_->piece_index(mid - shift_f_);
    }

    double t = sa;
    Vec2 k1 = rhs(t, y);
    if (!finite2(k1) || !finite2(y))
      throw numeric_error("phase flow: field not evaluable (blow-up)", t);

    double h = dir * initial_step(y, k1, std::abs(sb - sa));
    bool was_rejected = false;
    while (true) {
      // A step too small to advance t would loop forever; the field is
      // effectively stiff beyond what the controller can resolve.
      if (t + h == t) throw numeric_error("phase flow: step size underflow (stiffness)", t);
      bool last = (t + h - sb) * dir >= 0.0;
      if (last) h = sb - t;

      Vec2 k2, k3, k4, k5, k6, k7, y1;
      stage(y, k1, h, k2, k3, k4, k5, k6, y1, t);
      k7 = rhs(t + h, y1);

      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        double sc = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
        double diff = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
        err += (diff / sc) * (diff / sc);
      }
      err = std::sqrt(0.5 * err);

      if (!std::isfinite(err)) {
        // Overflow inside the step: shrink hard; if the step is already
        // tiny the state is exploding, not stiff.
        if (std::abs(h) < 1e-12 * span_total_)
          throw numeric_error("phase flow: state blow-up", t);
        traj.stats_.rejected++;
        was_rejected = true;
        h *= 0.25;
        continue;
      }

      if (err <= 1.0) {
        double t_next = last ? sb : t + h;
        push_step(traj, y, y1, k1, k3, k4, k5, k6, k7, t, h, t_next);
        traj.stats_.accepted++;
        traj.stats_.max_error_estimate = std::max(traj.stats_.max_error_estimate, err);
        y = y1;
        k1 = k7;  // first-same-as-last
        t = t_next;
        if (last) return;
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, was_rejected ? 1.0 : 5.0);
        was_rejected = false;
        h = dir * std::min(std::abs(h) * fac, max_step_);
      } else {
        traj.stats_.rejected++;
        was_rejected = true;
        double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        h *= fac;
        if (std::abs(h) < 1e-14 * span_total_)
          throw numeric_error("phase flow: step size underflow (stiffness)", t);
      }
    }
  }

  Vec2 rhs(double t, const Vec2& y) const {
    double u = y[0], v = y[1];
    Vec2 f;
    f[0] = phi_inv(v);
    double force = 0.0;
    if (forcing_ && hp_.alpha != 0.0)
      force = hp_.alpha * forcing_->value_in_piece(kf_, t - shift_f_);
    if (u >= 0.0) {
      double a = w_.value_in_piece(kw_, t - shift_w_);
      f[1] = -hp_.theta * (hp_.lambda * a * n_.g(u) + force);
    } else {
      f[1] = -hp_.theta * (-u + force);
    }
    return f;
  }

  void stage(const Vec2& y, const Vec2& k1, double h, Vec2& k2, Vec2& k3, Vec2& k4, Vec2& k5,
             Vec2& k6, Vec2& y1, double t) const {
    Vec2 tmp;
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + c2 * h, tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, tmp);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, tmp);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, tmp);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, tmp);
    for (int i = 0; i < 2; ++i)
      y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  }

  void push_step(Trajectory& traj, const Vec2& y0, const Vec2& y1, const Vec2& k1, const Vec2& k3,
                 const Vec2& k4, const Vec2& k5, const Vec2& k6, const Vec2& k7, double t,
                 double h, double t_next) const {
    Trajectory::Step sp;
    sp.t_anchor = t;
    sp.h = h;
    sp.tlo = std::min(t, t_next);
    sp.thi = std::max(t, t_next);
    for (int i = 0; i < 2; ++i) {
      double delta = y1[i] - y0[i];
      sp.rc[0][i] = y0[i];
      sp.rc[1][i] = delta;
      sp.rc[2][i] = h * k1[i] - delta;
      sp.rc[3][i] = delta - h * k7[i] - sp.rc[2][i];
      sp.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                         d7 * k7[i]);
    }
    traj.steps_.push_back(sp);
    traj.times_.push_back(t_next);
    traj.states_.push_back({y1[0], y1[1]});
  }

  double initial_step(const Vec2& y, const Vec2& f, double span_len) const {
    // Max-norm variant of the classic starting-step heuristic.  The ratios
    // stay unsquared: squaring |f|/sc overflows to infinity once the field
    // reaches ~1e154 times the error scale, which would collapse the result
    // to an exact zero-width step.  The floor keeps the step positive even
    // when the quotient itself underflows; the controller then grows it
    // geometrically from there.
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < 2; ++i) {
      double sc = tol_.abs + tol_.rel * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1n = std::max(d1n, std::abs(f[i]) / sc);
    }
    double h = span_len;
    if (d1n > 0.0) h = std::max(0.01 * std::max(d0, 1e-6) / d1n, 1e-250 * span_len);
    return std::min({h, max_step_, span_len});
  }

  const WeightFunction& w_;
  const Nonlinearity& n_;
  const HomotopyParams& hp_;
  const WeightFunction* forcing_;
  Tolerances tol_;
  double max_step_ = 0.0;
  double span_total_ = 0.0;
  double shift_w_ = 0.0, shift_f_ = 0.0;
  std::size_t kw_ = 0, kf_ = 0;
};

Trajectory integrate(const WeightFunction& w, const Nonlinearity& n, const HomotopyParams& hp,
                     const WeightFunction* forcing, PhaseState s0, double span_t0, double span_t1,
                     Tolerances tol, double max_step) {
  if (!(hp.theta >= 0.0 && hp.theta <= 1.0))
    throw domain_error("phase flow: theta must lie in [0, 1]");
  if (!(hp.alpha >= 0.0)) throw domain_error("phase flow: alpha must be >= 0");
  if (!(hp.lambda > 0.0)) throw domain_error("phase flow: lambda must be > 0");
  if (!(tol.rel > 0.0 && tol.abs > 0.0))
    throw domain_error("phase flow: tolerances must be positive");
  FlowIntegrator fi(w, n, hp, forcing, tol, max_step);
  return fi.run(s0, span_t0, span_t1);
}

}  // namespace minkbvp
