#include "minkbvp/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "minkbvp/common.hpp"
#include "minkbvp/quadrature.hpp"

namespace minkbvp {

namespace {

constexpr double kExpArgMax = 700.0;    // safe boundary for direct e^x
constexpr double kSeriesMax = 600.0;    // exponent bound for direct series

void check_nonneg(double u, const char* what) {
  if (!(u >= 0.0)) throw domain_error(std::string(what) + ": argument must be >= 0");
}

void check_pos(double u, const char* what) {
  if (!(u > 0.0)) throw domain_error(std::string(what) + ": argument must be > 0");
}

// --- exp_power internals: x = u^p ------------------------------------------

// Sum_{k>=1} u^{kp+1} / (k! (kp+1))  ==  integral of (e^{s^p}-1) over [0,u].
// All terms positive; valid while e^{u^p} is representable.
double exp_power_G_series(double u, double p) {
  double x = std::pow(u, p);
  double term = std::pow(u, p + 1.0) / (p + 1.0);  // k = 1
  double sum = term;
  for (int k = 2; k < 4000; ++k) {
    term *= x / k * ((k - 1) * p + 1.0) / (k * p + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// log of integral of e^{s^p} over [0,u] for large u, via repeated
// integration by parts:  I(u) = (e^{u^p}/p) * sum_k c_k u^{1-(k+1)p},
// c_0 = 1, c_k = c_{k-1} (k p - 1)/p.
double exp_power_logI_asymptotic(double u, double p) {
  double x = std::pow(u, p);
  double c = 1.0;
  double sum = 0.0;
  double upow = std::pow(u, 1.0 - p);
  double u_mp = std::pow(u, -p);
  for (int k = 0; k < 10; ++k) {
    double term = c * upow;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    c *= ((k + 1) * p - 1.0) / p;
    upow *= u_mp;
  }
  return x - std::log(p) + std::log(sum);
}

// --- power_exp internals: g = u^p e^{kappa u} --------------------------------

// S(u) = sum_{j=0..} (-1)^j (p)_j u^{p-j} / kappa^{j+1}, with (p)_j the
// falling factorial. Terminates for integer p; truncated asymptotically
// otherwise (valid for kappa*u large). e^{kappa u} S(u) - S(0) is the
// primitive for integer p.
double power_exp_S(double u, double p, double kappa, int max_terms) {
  double coef = 1.0 / kappa;  // (p)_0 / kappa^1
  double upow = std::pow(u, p);
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 0; j < max_terms; ++j) {
    double term = sign * coef * upow;
    sum += term;
    double fall = p - j;
    if (fall == 0.0) break;  // integer p: series terminates exactly
    if (std::abs(term) < 1e-18 * std::abs(sum) && j > 0) break;
    coef *= fall / kappa;
    upow /= u;
    sign = -sign;
  }
  return sum;
}

bool is_small_integer(double p) {
  double r = std::round(p);
  return std::abs(p - r) < 1e-12 && r >= 1.0 && r <= 40.0;
}

// Sum_{k>=0} kappa^k u^{p+k+1} / (k! (p+k+1)): primitive of u^p e^{kappa u}
// near zero (kappa*u < 1), free of the cancellation in the closed form.
double power_exp_G_series(double u, double p, double kappa) {
  double term = std::pow(u, p + 1.0) / (p + 1.0);
  double sum = term;
  double ku = kappa * u;
  for (int k = 1; k < 200; ++k) {
    term *= ku / k * (p + k) / (p + k + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

// --- factories ---------------------------------------------------------------

Nonlinearity Nonlinearity::power(double p, double scale) {
  if (!(p > 1.0)) throw domain_error("nonlinearity: exponent p must exceed 1");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw domain_error("nonlinearity: scale must be positive and finite");
  Nonlinearity n;
  n.kind_ = NonlinearityKind::power;
  n.p_ = p;
  n.scale_ = scale;
  return n;
}

Nonlinearity Nonlinearity::exp_power(double p, double scale) {
  Nonlinearity n = power(p, scale);
  n.kind_ = NonlinearityKind::exp_power;
  return n;
}

Nonlinearity Nonlinearity::power_exp(double p, double kappa, double scale) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw domain_error("nonlinearity: kappa must be positive and finite");
  Nonlinearity n = power(p, scale);
  n.kind_ = NonlinearityKind::power_exp;
  n.kappa_ = kappa;
  return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> g,
                                  std::function<double(double)> g_prime,
                                  double monotonicity_threshold) {
  if (!g) throw domain_error("nonlinearity: custom g must be callable");
  Nonlinearity n;
  n.kind_ = NonlinearityKind::custom;
  n.custom_g_ = std::move(g);
  n.custom_gp_ = std::move(g_prime);
  n.r_hat_ = monotonicity_threshold;
  return n;
}

// --- pointwise evaluation ------------------------------------------------------

double Nonlinearity::g(double u) const {
  check_nonneg(u, "nonlinearity g");
  switch (kind_) {
    case NonlinearityKind::power:
      return scale_ * std::pow(u, p_);
    case NonlinearityKind::exp_power: {
      double x = std::pow(u, p_);
      if (x > kExpArgMax) return std::numeric_limits<double>::infinity();
      return scale_ * std::expm1(x);
    }
    case NonlinearityKind::power_exp: {
      if (u == 0.0) return 0.0;
      double lg = std::log(scale_) + p_ * std::log(u) + kappa_ * u;
      if (lg > kExpArgMax) return std::numeric_limits<double>::infinity();
      return scale_ * std::pow(u, p_) * std::exp(kappa_ * u);
    }
    case NonlinearityKind::custom:
      return custom_g_(u);
  }
  return 0.0;
}

double Nonlinearity::g_prime(double u) const {
  check_nonneg(u, "nonlinearity g_prime");
  switch (kind_) {
    case NonlinearityKind::power:
      return scale_ * p_ * std::pow(u, p_ - 1.0);
    case NonlinearityKind::exp_power: {
      double x = std::pow(u, p_);
      if (x > kExpArgMax) return std::numeric_limits<double>::infinity();
      return scale_ * p_ * std::pow(u, p_ - 1.0) * std::exp(x);
    }
    case NonlinearityKind::power_exp: {
      if (u == 0.0) return 0.0;
      double ku = kappa_ * u;
      if (ku > kExpArgMax) return std::numeric_limits<double>::infinity();
      return scale_ * std::pow(u, p_ - 1.0) * (p_ + kappa_ * u) * std::exp(ku);
    }
    case NonlinearityKind::custom: {
      if (custom_gp_) return custom_gp_(u);
      double h = 1e-6 * std::max(1.0, std::abs(u));
      double lo = std::max(0.0, u - h);
      return (custom_g_(u + h) - custom_g_(lo)) / (u + h - lo);
    }
  }
  return 0.0;
}

double Nonlinearity::G(double u) const {
  check_nonneg(u, "nonlinearity G");
  if (u == 0.0) return 0.0;
  switch (kind_) {
    case NonlinearityKind::power:
      return scale_ * std::pow(u, p_ + 1.0) / (p_ + 1.0);
    case NonlinearityKind::exp_power: {
      double x = std::pow(u, p_);
      if (x <= kSeriesMax) return scale_ * exp_power_G_series(u, p_);
      double lg = log_G(u);
      return lg > kExpArgMax ? std::numeric_limits<double>::infinity() : std::exp(lg);
    }
    case NonlinearityKind::power_exp: {
      double ku = kappa_ * u;
      if (ku < 1.0) return scale_ * power_exp_G_series(u, p_, kappa_);
      if (ku <= kSeriesMax) {
        if (is_small_integer(p_)) {
          int ip = static_cast<int>(std::round(p_));
          double S = power_exp_S(u, p_, kappa_, ip + 2);
          double S0 = ((ip % 2 == 0) ? 1.0 : -1.0) *
                      std::tgamma(p_ + 1.0) / std::pow(kappa_, p_ + 1.0);
          return scale_ * (std::exp(ku) * S - S0);
        }
        return integrate_adaptive([this](double s) { return g(s); }, 0.0, u, 1e-12);
      }
      double lg = log_G(u);
      return lg > kExpArgMax ? std::numeric_limits<double>::infinity() : std::exp(lg);
    }
    case NonlinearityKind::custom:
      return integrate_adaptive(custom_g_, 0.0, u, 1e-10);
  }
  return 0.0;
}

double Nonlinearity::log_g(double u) const {
  check_pos(u, "nonlinearity log_g");
  switch (kind_) {
    case NonlinearityKind::power:
      return std::log(scale_) + p_ * std::log(u);
    case NonlinearityKind::exp_power: {
      double x = std::pow(u, p_);
      if (x <= kExpArgMax) return std::log(scale_) + std::log(std::expm1(x));
      return std::log(scale_) + x;  // log(e^x - 1) = x + log(1 - e^-x) ~ x
    }
    case NonlinearityKind::power_exp:
      return std::log(scale_) + p_ * std::log(u) + kappa_ * u;
    case NonlinearityKind::custom:
      return std::log(custom_g_(u));
  }
  return 0.0;
}

double Nonlinearity::log_G(double u) const {
  check_pos(u, "nonlinearity log_G");
  switch (kind_) {
    case NonlinearityKind::power:
      return std::log(scale_) + (p_ + 1.0) * std::log(u) - std::log(p_ + 1.0);
    case NonlinearityKind::exp_power: {
      double x = std::pow(u, p_);
      if (x <= kSeriesMax) return std::log(scale_) + std::log(exp_power_G_series(u, p_));
      // G = I - u with I the primitive of e^{s^p}; the -u correction is far
      // below double precision here.
      return std::log(scale_) + exp_power_logI_asymptotic(u, p_);
    }
    case NonlinearityKind::power_exp: {
      double ku = kappa_ * u;
      if (ku <= kSeriesMax) return std::log(G(u));
      double S = power_exp_S(u, p_, kappa_, 64);
      if (S > 0.0) return std::log(scale_) + ku + std::log(S);
      // Leading-order fallback: G ~ g / (g'/g).
      return log_g(u) - std::log(gprime_ratio(u));
    }
    case NonlinearityKind::custom:
      return std::log(G(u));
  }
  return 0.0;
}

double Nonlinearity::growth_ratio(double u) const {
  check_pos(u, "nonlinearity growth_ratio");
  if (kind_ == NonlinearityKind::power) return (p_ + 1.0) / u;
  double gv = g(u), Gv = G(u);
  if (std::isfinite(gv) && std::isfinite(Gv) && Gv > 0.0 &&
      Gv >= std::numeric_limits<double>::min())
    return gv / Gv;
  return std::exp(log_g(u) - log_G(u));
}

double Nonlinearity::gprime_ratio(double u) const {
  check_pos(u, "nonlinearity gprime_ratio");
  switch (kind_) {
    case NonlinearityKind::power:
      return p_ / u;
    case NonlinearityKind::exp_power: {
      // p u^{p-1} e^x / (e^x - 1) = p u^{p-1} / (1 - e^{-x}), x = u^p.
      double x = std::pow(u, p_);
      return p_ * std::pow(u, p_ - 1.0) / (-std::expm1(-x));
    }
    case NonlinearityKind::power_exp:
      return kappa_ + p_ / u;
    case NonlinearityKind::custom:
      return g_prime(u) / custom_g_(u);
  }
  return 0.0;
}

// --- diagnostics ---------------------------------------------------------------

ZeroLimitReport check_zero_limits(const Nonlinearity& n) {
  ZeroLimitReport rep;
  for (int d = 1; d <= 8; ++d) {
    double u = std::pow(10.0, -d);
    rep.us.push_back(u);
    rep.q.push_back(n.g(u) / u);
    double worst = 0.0;
    for (int j = 0; j <= 20; ++j) {
      double w = 0.9 + 0.2 * j / 20.0;
      double ratio = n.g(w * u) / n.g(u);
      worst = std::max(worst, std::abs(ratio - 1.0));
    }
    rep.oscillation.push_back(worst);
  }
  rep.q_vanishes = rep.q.back() < 1e-3 && rep.q.back() < 0.5 * rep.q.front();
  rep.oscillation_regular =
      *std::max_element(rep.oscillation.begin(), rep.oscillation.end()) <= 0.5;
  rep.pass = rep.q_vanishes && rep.oscillation_regular;
  return rep;
}

GrowthTail growth_ratio_tail(const Nonlinearity& n, double u_max) {
  if (!(u_max >= 10.0)) throw domain_error("growth_ratio_tail: u_max must be >= 10");
  const int n_pts = 120;
  const double lo = u_max / 100.0;
  GrowthTail tail;
  tail.ratio_g_over_G = std::numeric_limits<double>::infinity();
  tail.ratio_gprime_over_g = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= n_pts; ++j) {
    double u = lo * std::pow(100.0, static_cast<double>(j) / n_pts);
    if (u < u_max / 10.0 * (1.0 - 1e-12)) continue;  // keep the last decade only
    tail.ratio_g_over_G = std::min(tail.ratio_g_over_G, n.growth_ratio(u));
    tail.ratio_gprime_over_g = std::min(tail.ratio_gprime_over_g, n.gprime_ratio(u));
  }
  return tail;
}

ThresholdCheck check_growth_threshold(const Nonlinearity& n, const WeightFunction& w,
                                      double u_max) {
  SignPartition part = w.sign_partition();
  double min_window = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < part.positive.size(); ++i)
    min_window = std::min(min_window, w.window_min_l1(i));
  if (!(min_window > 0.0))
    throw domain_error("growth threshold: weight has a positivity interval with "
                       "vanishing quarter-window integral");
  ThresholdCheck chk;
  chk.threshold = w.neg_sup_norm() / min_window;
  chk.estimate = growth_ratio_tail(n, u_max).ratio_g_over_G;
  chk.margin = chk.estimate - chk.threshold;
  chk.pass = chk.estimate > chk.threshold;
  return chk;
}

NonexistenceReport check_nonexistence_regime(const Nonlinearity& n, double eta) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw domain_error("nonexistence check: eta must lie in [0, 1)");
  NonexistenceReport rep;
  rep.eta = eta;
  const double u_max = 100.0;
  const int n_pts = 120;
  std::vector<double> us, logr;
  for (int j = 0; j <= n_pts; ++j) {
    double u = (u_max / 100.0) * std::pow(100.0, static_cast<double>(j) / n_pts);
    double lr;
    if (n.kind() == NonlinearityKind::custom) {
      lr = std::log(std::abs(n.g_prime(u))) - eta * std::log(n.g(u));
    } else {
      // log |g'| = log g + log(g'/g); exact in the log domain for builtins.
      lr = (1.0 - eta) * n.log_g(u) + std::log(n.gprime_ratio(u));
    }
    us.push_back(u);
    logr.push_back(lr);
  }
  // Last decade: limsup estimate and log-log slope by least squares.
  double max_lr = -std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t j = 0; j < us.size(); ++j) {
    if (us[j] < u_max / 10.0 * (1.0 - 1e-12)) continue;
    max_lr = std::max(max_lr, logr[j]);
    double x = std::log(us[j]);
    sx += x;
    sy += logr[j];
    sxx += x * x;
    sxy += x * logr[j];
    ++m;
  }
  rep.limsup_estimate = std::exp(max_lr);
  rep.log_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.holds = rep.log_slope <= 0.05;
  return rep;
}

}  // namespace minkbvp
