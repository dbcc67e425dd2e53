#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "minkbvp/weight.hpp"
#include "oracles.hpp"

using namespace minkbvp;

namespace {
WeightFunction two_piece() { return WeightFunction::step(2.0, {1.0}, {1.0, -10.0}); }
WeightFunction three_piece() { return WeightFunction::step(4.0, {1.0, 3.0}, {-10.0, 1.0, -10.0}); }
}  // namespace

TEST_CASE("step weight: evaluation, periodic extension, exact integrals") {
  WeightFunction w = two_piece();
  CHECK(w.period() == 2.0);
  CHECK(w.edges().size() == 3);
  CHECK(w(0.5) == 1.0);
  CHECK(w(1.5) == -10.0);
  // periodic extension both directions
  CHECK(w(2.5) == 1.0);
  CHECK(w(-0.5) == -10.0);
  CHECK(w(-1.5) == 1.0);
  CHECK(w.mean_value() == doctest::Approx(-9.0).epsilon(1e-15));
  // antiderivative is exact for step weights
  CHECK(w.integral(0.5, 1.5) == doctest::Approx(0.5 - 5.0).epsilon(1e-15));
  CHECK(w.integral(0.0, 4.0) == doctest::Approx(-18.0).epsilon(1e-15));
  CHECK(w.integral(-1.0, 1.0) == doctest::Approx(-9.0).epsilon(1e-15));
  CHECK(w.neg_sup_norm() == 10.0);
  CHECK(w.l1_norm() == doctest::Approx(11.0).epsilon(1e-15));
}

TEST_CASE("step weight: sign partition") {
  SignPartition p2 = two_piece().sign_partition();
  REQUIRE(p2.count() == 1);
  CHECK(p2.positive[0].lo == doctest::Approx(0.0));
  CHECK(p2.positive[0].hi == doctest::Approx(1.0));
  REQUIRE(p2.negative.size() == 1);
  CHECK(p2.negative[0].lo == doctest::Approx(1.0));
  CHECK(p2.negative[0].hi == doctest::Approx(2.0));

  SignPartition p3 = three_piece().sign_partition();
  REQUIRE(p3.count() == 1);
  CHECK(p3.positive[0].lo == doctest::Approx(1.0));
  CHECK(p3.positive[0].hi == doctest::Approx(3.0));
  CHECK(p3.negative.size() == 2);

  CHECK_THROWS_AS(WeightFunction::step(1.0, {}, {-2.0}).sign_partition(), domain_error);
  // a piece where a == 0 merges into the negativity set
  CHECK_THROWS_AS(WeightFunction::step(1.0, {0.5}, {0.0, -1.0}).sign_partition(), domain_error);
}

TEST_CASE("step weight: invalid construction rejected") {
  CHECK_THROWS_AS(WeightFunction::step(2.0, {1.5, 1.0}, {1.0, 2.0, 3.0}), domain_error);
  CHECK_THROWS_AS(WeightFunction::step(2.0, {1.0}, {1.0}), domain_error);
  CHECK_THROWS_AS(WeightFunction::step(2.0, {2.5}, {1.0, -1.0}), domain_error);
  CHECK_THROWS_AS(WeightFunction::step(-1.0, {}, {1.0}), domain_error);
  CHECK_THROWS_AS(WeightFunction::sampled({0.0}, {1.0}), domain_error);
}

TEST_CASE("sampled weight: hand-computed partition, norms and windows") {
  // a(t) linear through (0,-1), (1,1), (2,1), (3,-3): crossings at 0.5, 2.25
  std::vector<double> ts{0.0, 1.0, 2.0, 3.0}, vs{-1.0, 1.0, 1.0, -3.0};
  WeightFunction w = WeightFunction::sampled(ts, vs);
  CHECK(w.period() == 3.0);
  CHECK(w(0.25) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(w(2.5) == doctest::Approx(-1.0).epsilon(1e-15));

  SignPartition p = w.sign_partition();
  REQUIRE(p.count() == 1);
  CHECK(p.positive[0].lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.positive[0].hi == doctest::Approx(2.25).epsilon(1e-12));

  CHECK(w.mean_value() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(w.neg_sup_norm() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(w.l1_norm() == doctest::Approx(2.75).epsilon(1e-13));

  // Exact sliding-window values derived by hand: the window integral is
  // increasing at the left edge, so both minima sit there.
  CHECK(w.window_min_l1(0) == doctest::Approx(0.19140625).epsilon(1e-12));
  CHECK(w.gamma(0, 0.25) == doctest::Approx(0.0625).epsilon(1e-12));
  // widest admissible window reproduces window_min_l1
  double L = p.positive[0].length();
  CHECK(w.gamma(0, L / 4.0) == doctest::Approx(w.window_min_l1(0)).epsilon(1e-14));
  CHECK_THROWS_AS(w.gamma(0, L / 4.0 + 0.01), domain_error);
}

TEST_CASE("sampled weight: window scans agree with brute-force oracles") {
  testo::Lcg rng(20260819);
  for (int trial = 0; trial < 5; ++trial) {
    testo::SampledWeightData d = testo::random_smooth_weight(rng);
    WeightFunction w = WeightFunction::sampled(d.ts, d.vs);
    SignPartition part = w.sign_partition();
    for (std::size_t i = 0; i < part.count(); ++i) {
      double sigma = part.positive[i].lo, tau = part.positive[i].hi;
      double L = tau - sigma;
      // The scan localizes the optimum to a grid cell; near a smooth interior
      // minimum the value error is quadratic in the cell width, so a 2e4-point
      // scan resolves the value to roughly 1e-7 here, not to machine precision.
      double a_lib = w.window_min_l1(i);
      double a_brute = testo::brute_window_min(d.ts, d.vs, sigma, tau, L / 4.0, 20000);
      CHECK(a_lib == doctest::Approx(a_brute).epsilon(1e-6).scale(1.0));
      CHECK(a_lib <= a_brute + 1e-12);  // the library minimum is never beaten by the scan
      double delta = L / 8.0;
      double g_lib = w.gamma(i, delta);
      double g_brute = testo::brute_gamma(d.ts, d.vs, sigma, tau, delta, 20000);
      CHECK(g_lib == doctest::Approx(g_brute).epsilon(1e-6).scale(1.0));
      CHECK(g_lib <= g_brute + 1e-12);
    }
  }
}

TEST_CASE("antiderivative of a sampled weight matches independent quadrature") {
  testo::Lcg rng(7);
  testo::SampledWeightData d = testo::random_smooth_weight(rng);
  WeightFunction w = WeightFunction::sampled(d.ts, d.vs);
  double T = w.period();
  for (double frac : {0.13, 0.5, 0.77, 1.0}) {
    double hi = frac * T;
    CHECK(w.integral(0.0, hi) ==
          doctest::Approx(testo::pl_integral(d.ts, d.vs, 0.0, hi)).epsilon(1e-12).scale(1.0));
  }
  // periodic wrap: one full period from an interior start
  CHECK(w.integral(0.7, 0.7 + T) == doctest::Approx(w.mean_value()).epsilon(1e-12).scale(1.0));
}

TEST_CASE("rotation preserves values, mean and norms") {
  WeightFunction w = three_piece();
  double shift = 1.625;
  WeightFunction r = w.rotated(shift);
  CHECK(r.period() == w.period());
  testo::Lcg rng(99);
  for (int k = 0; k < 50; ++k) {
    double t = rng.uniform(-4.0, 8.0);
    CHECK(r(t) == doctest::Approx(w(t + shift)).epsilon(1e-14));
  }
  CHECK(r.mean_value() == doctest::Approx(w.mean_value()).epsilon(1e-14));
  CHECK(r.l1_norm() == doctest::Approx(w.l1_norm()).epsilon(1e-13));
  CHECK(r.neg_sup_norm() == w.neg_sup_norm());
}

TEST_CASE("normalized_start_positive rotates positivity to the origin") {
  WeightFunction w = three_piece();  // positive on (1, 3)
  NormalizedWeight nw = w.normalized_start_positive();
  CHECK(nw.weight(0.25) > 0.0);
  CHECK(nw.weight(nw.weight.period() - 0.25) < 0.0);
  for (double t : {0.1, 0.9, 1.7, 2.6, 3.3}) {
    CHECK(nw.weight(t) == doctest::Approx(w(t + nw.shift)).epsilon(1e-14));
  }
  // already-normalized weights are untouched
  NormalizedWeight id = two_piece().normalized_start_positive();
  CHECK(id.shift == 0.0);
  CHECK_THROWS_AS(WeightFunction::step(1.0, {}, {-1.0}).normalized_start_positive(),
                  domain_error);
}

TEST_CASE("positivity indicator") {
  WeightFunction ind = positivity_indicator(three_piece());
  CHECK(ind(2.0) == 1.0);
  CHECK(ind(0.5) == 0.0);
  CHECK(ind(3.5) == 0.0);
  CHECK(ind.l1_norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ind.mean_value() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("piece bookkeeping: value_in_piece and piece_index") {
  WeightFunction w = two_piece();
  CHECK(w.piece_index(0.5) == 0);
  CHECK(w.piece_index(1.5) == 1);
  CHECK(w.piece_index(2.5) == 0);  // wraps
  // at the breakpoint, each piece keeps its own one-sided value
  CHECK(w.value_in_piece(0, 1.0) == 1.0);
  CHECK(w.value_in_piece(1, 1.0) == -10.0);
}

TEST_CASE("sampled factory shifts the domain to start at zero") {
  double origin = 0.0;
  WeightFunction w = WeightFunction::sampled({-2.0, 0.0, 2.0}, {1.0, -1.0, 1.0}, &origin);
  CHECK(origin == -2.0);
  CHECK(w.period() == 4.0);
  CHECK(w(0.0) == doctest::Approx(1.0));
  CHECK(w(2.0) == doctest::Approx(-1.0));
}
