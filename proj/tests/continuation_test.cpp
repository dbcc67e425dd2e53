#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "minkbvp/continuation.hpp"
#include "oracles.hpp"

using namespace minkbvp;

namespace {

Problem two_piece_exp(double lambda = 1.0) {
  return Problem{WeightFunction::step(2.0, {1.0}, {1.0, -10.0}), Nonlinearity::exp_power(2.0),
                 lambda};
}

Problem two_piece_power_exp(double kappa) {
  return Problem{WeightFunction::step(2.0, {1.0}, {1.0, -10.0}),
                 Nonlinearity::power_exp(2.0, kappa), 1.0};
}

Solution single_root(const Problem& p, ScanRange scan) {
  std::vector<Solution> sols = solve_neumann(p, scan);
  REQUIRE(sols.size() == 1);
  return sols[0];
}

std::vector<const BranchPoint*> points_at(const Branch& br, double param) {
  std::vector<const BranchPoint*> out;
  for (const BranchPoint& q : br.points)
    if (q.param == param) out.push_back(&q);
  std::sort(out.begin(), out.end(),
            [](const BranchPoint* a, const BranchPoint* b) { return a->u0 < b->u0; });
  return out;
}

}  // namespace

TEST_CASE("fold detection recovers a parabola vertex exactly") {
  std::vector<BranchPoint> pts;
  for (int k = 0; k <= 100; ++k) {
    BranchPoint q;
    q.u0 = 0.02 * k;
    q.param = (q.u0 - 1.0) * (q.u0 - 1.0) + 0.1;
    pts.push_back(q);
  }
  std::vector<Fold> folds = detect_folds(pts);
  REQUIRE(folds.size() == 1);
  CHECK(folds[0].param == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(folds[0].u0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fold detection edge cases") {
  std::vector<BranchPoint> pts;
  CHECK(detect_folds(pts).empty());
  for (int k = 0; k < 2; ++k) {
    BranchPoint q;
    q.u0 = k;
    q.param = 1.0 + k;
    pts.push_back(q);
  }
  CHECK(detect_folds(pts).empty());  // fewer than 3 points
  for (int k = 2; k < 30; ++k) {
    BranchPoint q;
    q.u0 = k;
    q.param = 1.0 + k;  // strictly monotone: no reversal
    pts.push_back(q);
  }
  CHECK(detect_folds(pts).empty());
}

TEST_CASE("branch in the weight multiplier: monotone, fold-free, marked stations") {
  Problem p = two_piece_exp(3.0);
  Solution start = single_root(p, {1e-3, 12.0, 1500});
  TraceOptions opt;
  opt.marks = {2.0, 1.0, 0.5};
  Branch br = trace_branch(p, BranchParam::lambda, 3.0, start, {1e-4, 3.0}, -1, opt);

  CHECK(br.termination == "range exit");
  CHECK(br.direction == -1);
  CHECK(br.folds.empty());
  REQUIRE(br.points.size() > 20);
  for (std::size_t i = 0; i + 1 < br.points.size(); ++i) {
    CHECK(br.points[i + 1].param < br.points[i].param);
    CHECK(br.points[i + 1].u0 > br.points[i].u0);  // u(0) grows as the multiplier shrinks
  }
  for (const BranchPoint& q : br.points) CHECK(q.bc_residual < 1e-8);

  auto at2 = points_at(br, 2.0);
  auto at1 = points_at(br, 1.0);
  auto athalf = points_at(br, 0.5);
  REQUIRE(at2.size() == 1);
  REQUIRE(at1.size() == 1);
  REQUIRE(athalf.size() == 1);
  CHECK(at2[0]->u0 == doctest::Approx(0.604026195862).epsilon(1e-8));
  CHECK(at1[0]->u0 == doctest::Approx(0.9916687614418046).epsilon(1e-8));
  CHECK(athalf[0]->u0 == doctest::Approx(1.351392971536).epsilon(1e-8));
}

TEST_CASE("branch in the exponential rate: one fold, both arms at the marked stations") {
  Problem p = two_piece_power_exp(50.0);
  Solution start = single_root(p, {1e-3, 1.0, 400});
  CHECK(start.u0() == doctest::Approx(0.056916580183325273).epsilon(1e-8));

  TraceOptions opt;
  opt.marks = {1.0, 2.0};
  Branch br = trace_branch(p, BranchParam::kappa, 50.0, start, {0.01, 50.0}, -1, opt);

  CHECK(br.termination == "sup-norm ceiling");
  REQUIRE(br.points.size() > 100);
  REQUIRE(br.folds.size() == 1);
  CHECK(br.folds[0].param > 0.399);
  CHECK(br.folds[0].param < 0.409);
  CHECK(br.folds[0].u0 > 1.33);
  CHECK(br.folds[0].u0 < 1.37);
  CHECK(br.folds[0].param == doctest::Approx(0.403990).epsilon(1e-3));
  CHECK(br.folds[0].u0 == doctest::Approx(1.347233).epsilon(1e-3));
  std::size_t flagged = 0;
  for (const BranchPoint& q : br.points) flagged += q.is_fold ? 1 : 0;
  CHECK(flagged == 1);

  auto at1 = points_at(br, 1.0);
  auto at2 = points_at(br, 2.0);
  REQUIRE(at1.size() == 2);  // lower and upper arm
  REQUIRE(at2.size() == 2);
  CHECK(at1[0]->u0 == doctest::Approx(0.701606282659).epsilon(1e-6));
  CHECK(at1[1]->u0 == doctest::Approx(2.412493021462).epsilon(1e-6));
  CHECK(at2[0]->u0 == doctest::Approx(0.486164196173).epsilon(1e-6));
  CHECK(at2[1]->u0 == doctest::Approx(7.455302760827).epsilon(1e-6));
  for (const BranchPoint& q : br.points) CHECK(q.bc_residual < 1e-8);

  // Halving the arclength step must not move the corrected stations.
  TraceOptions half = opt;
  half.step = 0.01;
  Branch br2 = trace_branch(p, BranchParam::kappa, 50.0, start, {0.01, 50.0}, -1, half);
  REQUIRE(br2.folds.size() == 1);
  CHECK(br2.folds[0].param == doctest::Approx(br.folds[0].param).epsilon(1e-3));
  auto at1b = points_at(br2, 1.0);
  REQUIRE(at1b.size() == 2);
  CHECK(at1b[0]->u0 == doctest::Approx(at1[0]->u0).epsilon(1e-6));
  CHECK(at1b[1]->u0 == doctest::Approx(at1[1]->u0).epsilon(1e-6));
}

TEST_CASE("slow-multiplier probe follows the growing branch") {
  Problem p = two_piece_exp(1.0);
  std::string reason;
  std::vector<BlowupRow> rows = blowup_probe(p, {0.25, 0.01, 0.001, 0.0001}, &reason);
  CHECK(reason.empty());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].u0 == doctest::Approx(1.613643663766).epsilon(1e-6));
  CHECK(rows[1].u0 == doctest::Approx(2.321894738387).epsilon(1e-6));
  CHECK(rows[2].u0 == doctest::Approx(2.713705431845).epsilon(1e-6));
  CHECK(rows[3].u0 == doctest::Approx(3.072308807000).epsilon(1e-6));
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK(rows[i + 1].lambda < rows[i].lambda);
    CHECK(rows[i + 1].u0 > rows[i].u0);
  }
  for (const BlowupRow& r : rows) CHECK(r.sup_norm >= r.u0 - 1e-12);
}

TEST_CASE("branch tracing validates its inputs") {
  Problem p = two_piece_exp(1.0);
  Solution start = single_root(p, {1e-3, 12.0, 1500});

  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::lambda, 1.0, start, {3.0, 1e-4}, -1),
                       "branch: invalid parameter range", domain_error);
  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::lambda, 5.0, start, {1e-4, 3.0}, -1),
                       "branch: start parameter outside the range", domain_error);
  // The positivity guard sits where the multiplier is applied, so it fires on
  // the first evaluation at a nonpositive value, not on range construction.
  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::lambda, 0.0, start, {-1.0, 3.0}, -1),
                       "branch: lambda must stay positive", domain_error);
  TraceOptions bad;
  bad.step = 0.0;
  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::lambda, 1.0, start, {1e-4, 3.0}, -1, bad),
                       "branch: step must be positive", domain_error);
  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::kappa, 1.0, start, {0.5, 3.0}, 1),
                       "branch: parameter kappa requires the power_exp nonlinearity",
                       domain_error);
  Solution fake = start;
  fake.certificate.bc_residual = 1.0;
  CHECK_THROWS_WITH_AS(trace_branch(p, BranchParam::lambda, 1.0, fake, {1e-4, 3.0}, -1),
                       "branch: start solution is not certified", domain_error);
}

TEST_CASE("slow-multiplier probe validates the lambda sequence") {
  Problem p = two_piece_exp(1.0);
  CHECK_THROWS_WITH_AS(blowup_probe(p, {0.5, -0.1}), "blow-up probe: lambdas must be positive",
                       domain_error);
  CHECK_THROWS_WITH_AS(blowup_probe(p, {0.5, 0.5}),
                       "blow-up probe: lambdas must be strictly decreasing", domain_error);
}
