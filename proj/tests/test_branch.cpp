#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hessbif/branch.hpp"
#include "hessbif/errors.hpp"
#include "reference_values.hpp"

using namespace hessbif;

namespace {

Branch trace(const NonlinearitySpec& f, int N, int k, int n = 65, double d_min = 1e-4, double d_max = 1e4) {
  return trace_branch({N, k, 1.0, f}, d_min, d_max, n, {});
}

Branch synthetic(const std::vector<double>& lambdas) {
  Branch b;
  for (std::size_t i = 0; i < lambdas.size(); ++i) b.points.push_back({std::pow(10.0, double(i)), lambdas[i], 0, true});
  b.folds = detect_folds(b);
  return b;
}

}  // namespace

TEST_CASE("linear f gives a flat branch at lambda1") {
  const Branch b = trace(NonlinearitySpec::linear(), 1, 1, 33, 1e-3, 1e3);
  CHECK(b.points.size() == 33);
  CHECK(b.gaps.empty());
  for (const auto& p : b.points) CHECK(std::abs(p.lambda - ref::lambda1_1_1) < 1e-6);
  CHECK(b.folds.empty());
  CHECK(b.lambda_at_zero.kind == LimitEstimate::Kind::Finite);
  CHECK(b.lambda_at_zero.value == doctest::Approx(ref::lambda1_1_1).epsilon(1e-8));
  CHECK(b.lambda_at_infinity.value == doctest::Approx(ref::lambda1_1_1).epsilon(1e-8));
}

TEST_CASE("saturating f: increasing branch from lambda1 to infinity") {
  const Branch b = trace(NonlinearitySpec::saturating(), 1, 1);
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    CHECK(b.points[i].d > b.points[i - 1].d);
    CHECK(b.points[i].lambda > b.points[i - 1].lambda);
  }
  CHECK(b.folds.empty());
  CHECK(b.lambda_at_zero.kind == LimitEstimate::Kind::Finite);
  CHECK(std::abs(b.lambda_at_zero.value / ref::lambda1_1_1 - 1) < 1e-3);
  CHECK(b.lambda_at_infinity.kind == LimitEstimate::Kind::Infinite);
  // Two resolutions agree at shared amplitudes.
  const Branch c = trace(NonlinearitySpec::saturating(), 1, 1, 129);
  CHECK(c.points.front().lambda == doctest::Approx(b.points.front().lambda).epsilon(1e-9));
  CHECK(c.points.back().lambda == doctest::Approx(b.points.back().lambda).epsilon(1e-9));
}

TEST_CASE("every traced point is an admissible Dirichlet solution") {
  for (const auto& f : {NonlinearitySpec::superlinear(), NonlinearitySpec::log_bump()}) {
    const Branch b = trace(f, 2, 2, 33);
    for (const auto& p : b.points) {
      CHECK(p.admissible);
      CHECK(std::abs(p.residual) < 1e-8 * p.d);
    }
  }
}

TEST_CASE("sqrt(s) + s^2 has one maximum and two solutions below it") {
  for (int k : {1, 2}) {
    const Branch b = trace(NonlinearitySpec::sum_of_powers(0.5, 2, 1), 2, k);
    REQUIRE(b.folds.size() == 1);
    CHECK(b.folds[0].kind == FoldKind::Max);
    const double star = b.folds[0].lambda;
    const double expected = k == 1 ? ref::lambda_max_sqrt_plus_square_k1 : ref::lambda_max_sqrt_plus_square_k2;
    CHECK(std::abs(star / expected - 1) < 1e-8);
    CHECK(count_solutions(b, 0.5 * star).count == 2);
    CHECK(count_solutions(b, 2.0 * star).count == 0);
    CHECK(b.lambda_at_zero.kind == LimitEstimate::Kind::Zero);
    CHECK(b.lambda_at_infinity.kind == LimitEstimate::Kind::Zero);
    const auto at = count_solutions(b, star);
    CHECK(at.at_fold);
    CHECK(at.fold_multiplicity == 1);
  }
}

TEST_CASE("log(1 + s^2) has one minimum and none below it") {
  for (int k : {1, 2}) {
    const Branch b = trace(NonlinearitySpec::log_bump(), 2, k);
    REQUIRE(b.folds.size() == 1);
    CHECK(b.folds[0].kind == FoldKind::Min);
    const double low = b.folds[0].lambda;
    const double expected = k == 1 ? ref::lambda_min_log_bump_k1 : ref::lambda_min_log_bump_k2;
    CHECK(std::abs(low / expected - 1) < 1e-8);
    CHECK(count_solutions(b, 0.5 * low).count == 0);
    CHECK(count_solutions(b, 2.0 * low).count == 2);
  }
}

TEST_CASE("fold values are stable under grid refinement") {
  const auto f = NonlinearitySpec::sum_of_powers(0.5, 2, 1);
  const double a = trace(f, 2, 1, 33).folds.at(0).lambda;
  const double b = trace(f, 2, 1, 65).folds.at(0).lambda;
  CHECK(std::abs(a / b - 1) < 1e-4);
}

TEST_CASE("asymptotes of the table cells") {
  const Branch sup = trace(NonlinearitySpec::superlinear(), 2, 1);
  CHECK(std::abs(sup.lambda_at_zero.value / ref::lambda1_2_1 - 1) < 1e-3);
  CHECK(sup.lambda_at_infinity.kind == LimitEstimate::Kind::Zero);
  const Branch qol = trace(NonlinearitySpec::quadratic_over_linear(), 2, 1);
  CHECK(qol.lambda_at_zero.kind == LimitEstimate::Kind::Infinite);
  CHECK(qol.lambda_at_infinity.kind == LimitEstimate::Kind::Finite);
  CHECK(std::abs(qol.lambda_at_infinity.value / ref::lambda1_2_1 - 1) < 1e-3);
  const Branch scaled = trace(NonlinearitySpec::saturating(2.0), 2, 1);
  CHECK(std::abs(scaled.lambda_at_zero.value / (ref::lambda1_2_1 / 2) - 1) < 1e-3);
}

TEST_CASE("asymptote estimates need four decades") {
  const Branch b = trace(NonlinearitySpec::linear(), 1, 1, 16, 1.0, 100.0);
  CHECK(b.lambda_at_zero.kind == LimitEstimate::Kind::Undetermined);
  CHECK_THROWS_AS(asymptote_estimates(b), InvalidInput);
}

TEST_CASE("detect_folds on synthetic branches") {
  CHECK(detect_folds(synthetic({1, 1, 1, 1})).empty());
  CHECK(detect_folds(synthetic({1, 1 + 1e-9, 1 - 1e-9, 1})).empty());  // below the plateau tolerance
  const auto f = detect_folds(synthetic({1, 2, 3, 2, 1, 2}));
  REQUIRE(f.size() == 2);
  CHECK(f[0].kind == FoldKind::Max);
  CHECK(f[0].index == 2);
  CHECK(f[1].kind == FoldKind::Min);
  CHECK(f[1].index == 4);
  // A flat top collapses into one maximum.
  const auto g = detect_folds(synthetic({1, 3, 3, 3, 1}));
  REQUIRE(g.size() == 1);
  CHECK(g[0].lambda == 3);
  CHECK(detect_folds(synthetic({1, 2})).empty());
}

TEST_CASE("count_solutions") {
  const Branch flat = synthetic({2, 2, 2, 2});
  CHECK(count_solutions(flat, 1.0).count == 0);
  CHECK(count_solutions(flat, 3.0).count == 0);
  CHECK(count_solutions(flat, 2.0).at_fold);
  const Branch hill = synthetic({1, 2, 4, 2, 1});
  const auto c = count_solutions(hill, 1.5);
  CHECK(c.count == 2);
  REQUIRE(c.crossings_d.size() == 2);
  CHECK(c.crossings_d[0] > 1.0);
  CHECK(c.crossings_d[0] < 10.0);
  CHECK(count_solutions(hill, 5.0).count == 0);
  const auto top = count_solutions(hill, 4.0);
  CHECK(top.at_fold);
  CHECK(top.fold_multiplicity == 1);
}

TEST_CASE("predicted_interval table cells") {
  const double l1 = 2.467401;
  auto p = predicted_interval(LimitClass::finite(1), LimitClass::zero(), l1);
  CHECK(p.existence.lo == doctest::Approx(2.467401));
  CHECK(std::isinf(p.existence.hi));
  p = predicted_interval(LimitClass::infinite(), LimitClass::zero(), l1);
  CHECK(p.existence.lo == 0.0);
  CHECK(std::isinf(p.existence.hi));
  p = predicted_interval(LimitClass::finite(2), LimitClass::infinite(), l1);
  CHECK(p.existence.lo == 0.0);
  CHECK(p.existence.hi == doctest::Approx(1.2337005));
  p = predicted_interval(LimitClass::finite(2), LimitClass::finite(1), l1);
  CHECK(p.existence.lo == doctest::Approx(l1 / 2));
  CHECK(p.existence.hi == doctest::Approx(l1));
  p = predicted_interval(LimitClass::zero(), LimitClass::finite(4), l1);
  CHECK(p.existence.lo == doctest::Approx(l1 / 4));
  p = predicted_interval(LimitClass::infinite(), LimitClass::finite(4), l1);
  CHECK(p.existence.hi == doctest::Approx(l1 / 4));
  p = predicted_interval(LimitClass::zero(), LimitClass::infinite(), l1);
  CHECK(p.existence.lo == 0.0);
  CHECK(predicted_interval(LimitClass::infinite(), LimitClass::infinite(), l1).multiplicity ==
        MultiplicityProfile::TwoBelowMax);
  CHECK(predicted_interval(LimitClass::zero(), LimitClass::zero(), l1).multiplicity ==
        MultiplicityProfile::TwoAboveMin);
  CHECK_FALSE(predicted_interval(LimitClass::zero(), LimitClass::zero(), l1, false).hypotheses_met);
  CHECK_THROWS_AS(predicted_interval(LimitClass::finite(1), LimitClass::finite(1), l1), OutOfTable);
  CHECK_THROWS_AS(predicted_interval(LimitClass::finite(1), LimitClass::zero(), -1.0), InvalidInput);
}

TEST_CASE("verify: eigenvalue case on the flat linear branch") {
  const Branch b = trace(NonlinearitySpec::linear(), 1, 1, 33, 1e-3, 1e3);
  const auto rep = verify_predictions(b, eigen_case_prediction(LimitClass::finite(1), ref::lambda1_1_1), 5);
  CHECK(rep.pass());
  bool noted = false;
  for (const auto& n : rep.notes) noted = noted || n.find("outside the existence table") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("verify: saturating cell passes and a wrong class fails") {
  const Branch b = trace(NonlinearitySpec::saturating(), 1, 1);
  const auto pred = predicted_interval(LimitClass::finite(1), LimitClass::zero(), ref::lambda1_1_1);
  const auto rep = verify_predictions(b, pred, 5);
  CHECK(rep.pass());
  CHECK(count_solutions(b, 2 * ref::lambda1_1_1).count >= 1);
  const auto wrong = verify_predictions(b, predicted_interval(LimitClass::finite(1), LimitClass::infinite(),
                                                              ref::lambda1_1_1), 5);
  CHECK_FALSE(wrong.pass());
  const auto j = to_json(rep);
  CHECK(j["schema_version"] == 1);
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == rep.checks.size());
  CHECK(j["checks"][0].contains("tol"));
}

TEST_CASE("verify: two below the maximum") {
  const Branch b = trace(NonlinearitySpec::sum_of_powers(0.5, 2, 1), 2, 1);
  const auto rep =
      verify_predictions(b, predicted_interval(LimitClass::infinite(), LimitClass::infinite(), ref::lambda1_2_1), 5);
  CHECK(rep.pass());
  CHECK(count_solutions(b, 2 * b.folds.at(0).lambda).count == 0);
}

TEST_CASE("verify: two above the minimum, and the coercivity gate") {
  const Branch b = trace(NonlinearitySpec::log_bump(), 2, 2);
  CHECK(looks_coercive(NonlinearitySpec::log_bump()));
  CHECK_FALSE(looks_coercive(NonlinearitySpec::saturating()));
  const auto rep =
      verify_predictions(b, predicted_interval(LimitClass::zero(), LimitClass::zero(), ref::lambda1_2_2), 5);
  CHECK(rep.pass());
  const auto gated =
      verify_predictions(b, predicted_interval(LimitClass::zero(), LimitClass::zero(), ref::lambda1_2_2, false), 5);
  for (const auto& c : gated.checks) CHECK(c.name.find("two") == std::string::npos);
}

TEST_CASE("branch CSV round trip and malformed input") {
  const Branch b = trace(NonlinearitySpec::sum_of_powers(0.5, 2, 1), 2, 1, 33);
  std::ostringstream os;
  write_branch_csv(os, b);
  CHECK(os.str().rfind("index,d,lambda,residual,is_fold\n", 0) == 0);
  std::istringstream is(os.str());
  const Branch r = read_branch_csv(is);
  REQUIRE(r.points.size() == b.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) CHECK(r.points[i].lambda == b.points[i].lambda);
  CHECK(r.folds.size() == b.folds.size());

  std::istringstream empty("");
  CHECK_THROWS_AS(read_branch_csv(empty), InvalidInput);
  std::istringstream header_only("index,d,lambda,residual,is_fold\n");
  CHECK_THROWS_AS(read_branch_csv(header_only), InvalidInput);
  std::istringstream bad_header("i,d,l\n0,1,2\n");
  CHECK_THROWS_AS(read_branch_csv(bad_header), InvalidInput);
  std::istringstream bad_number("index,d,lambda,residual,is_fold\n0,1,abc,0,0\n");
  CHECK_THROWS_AS(read_branch_csv(bad_number), InvalidInput);
  std::istringstream unordered("index,d,lambda,residual,is_fold\n0,2,1,0,0\n1,1,1,0,0\n");
  CHECK_THROWS_AS(read_branch_csv(unordered), InvalidInput);
}

TEST_CASE("tracing input validation and failure") {
  const ProblemSpec lin{1, 1, 1.0, NonlinearitySpec::linear()};
  CHECK_THROWS_AS(trace_branch(lin, 1.0, 0.5, 32, {}), InvalidInput);
  CHECK_THROWS_AS(trace_branch(lin, 1.0, 10.0, 8, {}), InvalidInput);
  // Supercritical exponent in three dimensions: no radial Dirichlet solution.
  const ProblemSpec super{3, 1, 1.0, NonlinearitySpec::power(7)};
  CHECK_THROWS_AS(trace_branch(super, 0.1, 10.0, 16, {}), NumericalFailure);
}

TEST_CASE("parallel tracing matches the sequential trace") {
  const ProblemSpec spec{2, 1, 1.0, NonlinearitySpec::superlinear()};
  TraceOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const Branch a = trace_branch(spec, 1e-2, 1e2, 32, {}, one);
  const Branch b = trace_branch(spec, 1e-2, 1e2, 32, {}, four);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].d == b.points[i].d);
    CHECK(a.points[i].lambda == doctest::Approx(b.points[i].lambda).epsilon(1e-9));
  }
  // Same configuration twice: identical bits.
  const Branch c = trace_branch(spec, 1e-2, 1e2, 32, {}, four);
  for (std::size_t i = 0; i < b.points.size(); ++i) CHECK(b.points[i].lambda == c.points[i].lambda);
}
