#include "minkbvp/weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "minkbvp/common.hpp"

namespace minkbvp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw domain_error(msg);
}

bool all_finite(const std::vector<double>& xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

bool strictly_increasing(const std::vector<double>& xs) {
  for (std::size_t j = 1; j < xs.size(); ++j)
    if (!(xs[j] > xs[j - 1])) return false;
  return true;
}

WeightPiece make_constant_piece(double t0, double t1, double value) {
  WeightPiece p;
  p.t0 = t0;
  p.t1 = t1;
  p.is_constant = true;
  p.value = value;
  return p;
}

WeightPiece make_sampled_piece(std::vector<double> ts, std::vector<double> vs) {
  WeightPiece p;
  p.t0 = ts.front();
  p.t1 = ts.back();
  p.is_constant = false;
  p.prefix.resize(ts.size(), 0.0);
  for (std::size_t j = 1; j < ts.size(); ++j)
    p.prefix[j] = p.prefix[j - 1] + 0.5 * (vs[j] + vs[j - 1]) * (ts[j] - ts[j - 1]);
  p.ts = std::move(ts);
  p.vs = std::move(vs);
  return p;
}

double interp_segment(const WeightPiece& p, double t) {
  // Linear interpolation inside a sampled piece; t clamped to [t0, t1].
  t = std::clamp(t, p.t0, p.t1);
  auto it = std::upper_bound(p.ts.begin(), p.ts.end(), t);
  std::size_t j = static_cast<std::size_t>(std::distance(p.ts.begin(), it));
  if (j == 0) return p.vs.front();
  if (j >= p.ts.size()) return p.vs.back();
  double w = (t - p.ts[j - 1]) / (p.ts[j] - p.ts[j - 1]);
  return p.vs[j - 1] + w * (p.vs[j] - p.vs[j - 1]);
}

// Linear sub-segments of a piece: (lo, hi, value at lo, value at hi).
struct LinSeg {
  double lo, hi, vlo, vhi;
};

std::vector<LinSeg> linear_segments(const WeightPiece& p) {
  std::vector<LinSeg> out;
  if (p.is_constant) {
    out.push_back({p.t0, p.t1, p.value, p.value});
  } else {
    for (std::size_t j = 1; j < p.ts.size(); ++j)
      out.push_back({p.ts[j - 1], p.ts[j], p.vs[j - 1], p.vs[j]});
  }
  return out;
}

}  // namespace

WeightFunction WeightFunction::step(double period, const std::vector<double>& breaks,
                                    const std::vector<double>& values) {
  require(std::isfinite(period) && period > 0.0, "weight: period must be positive and finite");
  require(values.size() == breaks.size() + 1,
          "weight: need exactly one value per subinterval (breaks + 1)");
  require(all_finite(values) && all_finite(breaks), "weight: non-finite entry");
  require(strictly_increasing(breaks), "weight: breaks must be strictly increasing");
  require(breaks.empty() || (breaks.front() > 0.0 && breaks.back() < period),
          "weight: breaks must lie strictly inside (0, period)");

  WeightFunction w;
  w.period_ = period;
  std::vector<double> cuts;
  cuts.push_back(0.0);
  cuts.insert(cuts.end(), breaks.begin(), breaks.end());
  cuts.push_back(period);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    w.pieces_.push_back(make_constant_piece(cuts[k], cuts[k + 1], values[k]));
  w.finalize();
  return w;
}

WeightFunction WeightFunction::sampled(const std::vector<double>& ts,
                                       const std::vector<double>& values, double* origin_out) {
  require(ts.size() >= 2, "weight: sampled form needs at least two nodes");
  require(ts.size() == values.size(), "weight: sample times and values differ in length");
  require(all_finite(ts) && all_finite(values), "weight: non-finite sample");
  require(strictly_increasing(ts), "weight: sample times must be strictly increasing");

  double origin = ts.front();
  if (origin_out) *origin_out = origin;
  std::vector<double> shifted(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) shifted[j] = ts[j] - origin;
  shifted.front() = 0.0;

  WeightFunction w;
  w.period_ = shifted.back();
  w.pieces_.push_back(make_sampled_piece(std::move(shifted), values));
  w.finalize();
  return w;
}

void WeightFunction::finalize() {
  edges_.clear();
  cums_.clear();
  edges_.push_back(pieces_.front().t0);
  double cum = 0.0;
  for (const auto& p : pieces_) {
    cums_.push_back(cum);
    cum += piece_antiderivative(&p - pieces_.data(), p.t1);
    edges_.push_back(p.t1);
  }
  total_ = cum;
}

double WeightFunction::shortest_piece() const {
  double best = period_;
  for (const auto& p : pieces_) best = std::min(best, p.t1 - p.t0);
  return best;
}

std::size_t WeightFunction::piece_index(double t) const {
  double r = std::fmod(t, period_);
  if (r < 0.0) r += period_;
  if (r >= period_) r = 0.0;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
  std::size_t k = static_cast<std::size_t>(std::distance(edges_.begin(), it));
  if (k == 0) return 0;
  if (k > pieces_.size()) return pieces_.size() - 1;
  return k - 1;
}

double WeightFunction::value_in_piece(std::size_t k, double t) const {
  const WeightPiece& p = pieces_.at(k);
  if (p.is_constant) return p.value;
  return interp_segment(p, t);
}

double WeightFunction::operator()(double t) const {
  double r = std::fmod(t, period_);
  if (r < 0.0) r += period_;
  if (r >= period_) r = 0.0;
  return value_in_piece(piece_index(r), r);
}

double WeightFunction::piece_antiderivative(std::size_t k, double t) const {
  const WeightPiece& p = pieces_[k];
  t = std::clamp(t, p.t0, p.t1);
  if (p.is_constant) return p.value * (t - p.t0);
  auto it = std::upper_bound(p.ts.begin(), p.ts.end(), t);
  std::size_t j = static_cast<std::size_t>(std::distance(p.ts.begin(), it));
  if (j == 0) return 0.0;
  --j;
  if (j + 1 >= p.ts.size()) return p.prefix.back();
  double v = interp_segment(p, t);
  return p.prefix[j] + 0.5 * (p.vs[j] + v) * (t - p.ts[j]);
}

double WeightFunction::antiderivative(double t) const {
  double n = std::floor(t / period_);
  double r = t - n * period_;
  if (r < 0.0) r += period_, n -= 1.0;
  if (r >= period_) r -= period_, n += 1.0;
  std::size_t k = piece_index(r);
  return n * total_ + cums_[k] + piece_antiderivative(k, r);
}

SignPartition WeightFunction::sign_partition() const {
  // Split every linear sub-segment at its interior zero crossing, classify
  // each resulting segment by the sign of its midpoint value, then merge
  // adjacent runs (zero segments count as negativity).
  struct Seg {
    double lo, hi;
    int cls;  // +1 positive, -1 negative-or-zero
  };
  std::vector<Seg> segs;
  auto classify = [](double v) { return v > 0.0 ? +1 : -1; };
  for (const auto& p : pieces_) {
    for (const auto& s : linear_segments(p)) {
      bool crosses = (s.vlo > 0.0 && s.vhi < 0.0) || (s.vlo < 0.0 && s.vhi > 0.0);
      if (crosses) {
        double t_star = s.lo + s.vlo * (s.hi - s.lo) / (s.vlo - s.vhi);
        segs.push_back({s.lo, t_star, classify(0.5 * (s.vlo + 0.0))});
        segs.push_back({t_star, s.hi, classify(0.5 * (0.0 + s.vhi))});
      } else {
        double mid = 0.5 * (s.vlo + s.vhi);
        // Segments touching zero at one endpoint keep the sign of the other.
        double rep = (mid != 0.0) ? mid : (s.vlo != 0.0 ? s.vlo : s.vhi);
        segs.push_back({s.lo, s.hi, classify(rep)});
      }
    }
  }

  SignPartition part;
  std::size_t j = 0;
  while (j < segs.size()) {
    std::size_t j2 = j;
    while (j2 + 1 < segs.size() && segs[j2 + 1].cls == segs[j].cls) ++j2;
    Interval iv{segs[j].lo, segs[j2].hi};
    if (segs[j].cls > 0)
      part.positive.push_back(iv);
    else
      part.negative.push_back(iv);
    j = j2 + 1;
  }
  if (part.positive.empty())
    throw domain_error("weight: no interval of positivity (a <= 0 everywhere)");
  return part;
}

double WeightFunction::neg_sup_norm() const {
  double best = 0.0;
  for (const auto& p : pieces_) {
    if (p.is_constant) {
      best = std::max(best, -p.value);
    } else {
      for (double v : p.vs) best = std::max(best, -v);
    }
  }
  return std::max(best, 0.0);
}

double WeightFunction::l1_norm() const {
  double sum = 0.0;
  for (const auto& p : pieces_) {
    for (const auto& s : linear_segments(p)) {
      bool crosses = (s.vlo > 0.0 && s.vhi < 0.0) || (s.vlo < 0.0 && s.vhi > 0.0);
      if (crosses) {
        double t_star = s.lo + s.vlo * (s.hi - s.lo) / (s.vlo - s.vhi);
        sum += 0.5 * std::abs(s.vlo) * (t_star - s.lo);
        sum += 0.5 * std::abs(s.vhi) * (s.hi - t_star);
      } else {
        sum += 0.5 * std::abs(s.vlo + s.vhi) * (s.hi - s.lo);
      }
    }
  }
  return sum;
}

double WeightFunction::gamma(std::size_t i, double delta) const {
  SignPartition part = sign_partition();
  require(i < part.positive.size(), "weight: positivity interval index out of range");
  const Interval iv = part.positive[i];
  double cap = 0.25 * iv.length();
  require(delta >= 0.0 && delta <= cap + 1e-15 * std::max(1.0, cap),
          "weight: window width must lie in [0, (tau - sigma)/4]");
  if (delta <= 0.0) return 0.0;
  delta = std::min(delta, cap);

  const double lo = iv.lo + delta, hi = iv.hi;
  auto window = [&](double t) { return antiderivative(t) - antiderivative(t - delta); };

  // Candidate minimizers: a dense grid plus every point where the window
  // integrand has a kink at either end of the sliding window.
  std::vector<double> cand;
  const int n_grid = 4096;
  cand.reserve(n_grid + 64);
  for (int j = 0; j <= n_grid; ++j) cand.push_back(lo + (hi - lo) * j / n_grid);
  auto add_kinks = [&](double e) {
    if (e >= lo && e <= hi) cand.push_back(e);
    if (e + delta >= lo && e + delta <= hi) cand.push_back(e + delta);
  };
  for (double e : edges_) add_kinks(e);
  for (const auto& p : pieces_)
    if (!p.is_constant)
      for (double e : p.ts) add_kinks(e);

  double best_t = lo, best = window(lo);
  for (double t : cand) {
    double v = window(t);
    if (v < best) best = v, best_t = t;
  }

  // Golden-section refinement around the incumbent.
  double h = (hi - lo) / n_grid;
  double a = std::max(lo, best_t - h), b = std::min(hi, best_t + h);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = window(x1), f2 = window(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - gr * (b - a);
      f1 = window(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + gr * (b - a);
      f2 = window(x2);
    }
  }
  return std::min({best, f1, f2});
}

double WeightFunction::window_min_l1(std::size_t i) const {
  SignPartition part = sign_partition();
  require(i < part.positive.size(), "weight: positivity interval index out of range");
  return gamma(i, 0.25 * part.positive[i].length());
}

WeightFunction WeightFunction::rotated(double shift) const {
  double s = std::fmod(shift, period_);
  if (s < 0.0) s += period_;
  if (s >= period_) s = 0.0;
  if (s == 0.0) return *this;

  // New piece list: old content over [s, T] first, then old content over [0, s].
  auto clip = [&](const WeightPiece& p, double lo, double hi, double new_t0) -> WeightPiece {
    if (p.is_constant) {
      WeightPiece q = make_constant_piece(new_t0, new_t0 + (hi - lo), p.value);
      return q;
    }
    std::vector<double> ts, vs;
    ts.push_back(new_t0);
    vs.push_back(interp_segment(p, lo));
    for (std::size_t j = 0; j < p.ts.size(); ++j) {
      if (p.ts[j] > lo && p.ts[j] < hi) {
        ts.push_back(new_t0 + (p.ts[j] - lo));
        vs.push_back(p.vs[j]);
      }
    }
    ts.push_back(new_t0 + (hi - lo));
    vs.push_back(interp_segment(p, hi));
    return make_sampled_piece(std::move(ts), std::move(vs));
  };

  WeightFunction w;
  w.period_ = period_;
  double t_new = 0.0;
  const double eps = 1e-14 * period_;
  for (const auto& p : pieces_) {
    double lo = std::max(p.t0, s), hi = p.t1;
    if (hi - lo > eps) {
      w.pieces_.push_back(clip(p, lo, hi, t_new));
      t_new += hi - lo;
    }
  }
  for (const auto& p : pieces_) {
    double lo = p.t0, hi = std::min(p.t1, s);
    if (hi - lo > eps) {
      w.pieces_.push_back(clip(p, lo, hi, t_new));
      t_new += hi - lo;
    }
  }
  // Snap the final edge to the exact period.
  w.pieces_.back().t1 = period_;
  if (!w.pieces_.back().is_constant) w.pieces_.back().ts.back() = period_;
  w.finalize();
  return w;
}

NormalizedWeight WeightFunction::normalized_start_positive() const {
  SignPartition part = sign_partition();
  if (part.negative.empty()) return {*this, 0.0};

  // Starts of positivity runs on the circle: when the weight is positive both
  // just after 0 and just before T, those two runs are a single circular run
  // beginning at the start of the final interval.
  std::vector<double> starts;
  bool wraps = part.positive.front().lo == 0.0 &&
               part.positive.back().hi >= period_ * (1.0 - 1e-15);
  for (const auto& iv : part.positive) starts.push_back(iv.lo);
  if (wraps && part.positive.size() >= 1) {
    starts.erase(starts.begin());            // interval at 0 continues the final run
    if (starts.empty()) starts.push_back(part.positive.back().lo);
  }
  double shift = *std::min_element(starts.begin(), starts.end());
  if (shift == 0.0) return {*this, 0.0};
  return {rotated(shift), shift};
}

WeightFunction positivity_indicator(const WeightFunction& w) {
  SignPartition part = w.sign_partition();
  std::vector<double> cuts;
  for (const auto& iv : part.positive) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> breaks;
  for (double c : cuts)
    if (c > 0.0 && c < w.period())
      breaks.push_back(c);
  std::vector<double> values(breaks.size() + 1, 0.0);
  auto inside = [&](double t) {
    for (const auto& iv : part.positive)
      if (t >= iv.lo && t <= iv.hi) return true;
    return false;
  };
  std::vector<double> edges;
  edges.push_back(0.0);
  edges.insert(edges.end(), breaks.begin(), breaks.end());
  edges.push_back(w.period());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    values[k] = inside(0.5 * (edges[k] + edges[k + 1])) ? 1.0 : 0.0;
  return WeightFunction::step(w.period(), breaks, values);
}

}  // namespace minkbvp
