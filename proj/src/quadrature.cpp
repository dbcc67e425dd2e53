#include "minkbvp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "minkbvp/common.hpp"

namespace minkbvp {

namespace {

// Gauss 7 / Kronrod 15 node-weight pairs on [-1, 1] (QUADPACK dqk15
// constants). Odd Kronrod indices coincide with the Gauss-7 nodes.
constexpr double xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double integral;
  double err;
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double resg = wg[3] * fc;
  double resk = wgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    const double fsum = f(c - x) + f(c + x);
    resk += wgk[j] * fsum;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

double recurse(const std::function<double(double)>& f, double a, double b, double rel_tol,
               double abs_local, int depth) {
  const Panel p = kronrod15(f, a, b);
  if (p.err <= abs_local + rel_tol * std::abs(p.integral) || b - a == 0.0) return p.integral;
  if (depth >= 60)
    throw numeric_error("adaptive quadrature: recursion depth exceeded on [" +
                        format_double(a) + ", " + format_double(b) + "]");
  const double m = 0.5 * (a + b);
  return recurse(f, a, m, rel_tol, 0.5 * abs_local, depth + 1) +
         recurse(f, m, b, rel_tol, 0.5 * abs_local, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_adaptive(f, b, a, rel_tol, abs_tol);
  return recurse(f, a, b, rel_tol, abs_tol, 0);
}

double gauss7(const std::function<double(double)>& f, double a, double b) {
  static constexpr double xg[3] = {0.949107912342759, 0.741531185599394, 0.405845151377397};
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double acc = wg[3] * f(c);
  for (int j = 0; j < 3; ++j) acc += wg[j] * (f(c - h * xg[j]) + f(c + h * xg[j]));
  return acc * h;
}

}  // namespace minkbvp
