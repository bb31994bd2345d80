// The frozen reference values are reproduced by the independent oracle.

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "reference_values.hpp"

namespace {

double oracle_extremum(int N, int k, const std::function<double(double)>& f, double a, double b, int sign) {
  auto L = [&](double x) { return sign * oracle::lambda_at(N, k, f, std::exp(x), 1e-3, 1e3); };
  const double g = 0.6180339887498949;
  a = std::log(a);
  b = std::log(b);
  double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = L(x1), f2 = L(x2);
  while (b - a > 1e-6) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = L(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = L(x2);
    }
  }
  return sign * L(0.5 * (a + b));
}

}  // namespace

TEST_CASE("oracle reproduces closed-form eigenvalues") {
  CHECK(oracle::lambda1(1, 1) == doctest::Approx(ref::lambda1_1_1).epsilon(1e-12));
  CHECK(oracle::lambda1(2, 1) == doctest::Approx(ref::lambda1_2_1).epsilon(1e-12));
  CHECK(oracle::lambda1(3, 1) == doctest::Approx(ref::lambda1_3_1).epsilon(1e-12));
}

TEST_CASE("oracle reproduces the frozen eigenvalues without closed form") {
  CHECK(oracle::lambda1(2, 2) == doctest::Approx(ref::lambda1_2_2).epsilon(1e-12));
  CHECK(oracle::lambda1(3, 2) == doctest::Approx(ref::lambda1_3_2).epsilon(1e-12));
  CHECK(oracle::lambda1(3, 3) == doctest::Approx(ref::lambda1_3_3).epsilon(1e-12));
  // Scaling of the oracle itself.
  CHECK(oracle::lambda1(3, 2, 2.0) * 4 == doctest::Approx(ref::lambda1_3_2).epsilon(1e-14));
}

TEST_CASE("oracle reproduces the frozen fold values") {
  auto sps = [](double s) { return std::sqrt(s) + s * s; };
  auto lb = [](double s) { return std::log1p(s * s); };
  CHECK(oracle_extremum(2, 1, sps, 0.1, 10, 1) == doctest::Approx(ref::lambda_max_sqrt_plus_square_k1).epsilon(1e-9));
  CHECK(oracle_extremum(2, 2, sps, 0.1, 10, 1) == doctest::Approx(ref::lambda_max_sqrt_plus_square_k2).epsilon(1e-9));
  CHECK(oracle_extremum(2, 1, lb, 0.3, 30, -1) == doctest::Approx(ref::lambda_min_log_bump_k1).epsilon(1e-9));
  CHECK(oracle_extremum(2, 2, lb, 0.3, 30, -1) == doctest::Approx(ref::lambda_min_log_bump_k2).epsilon(1e-9));
}

TEST_CASE("oracle boundary values match the analytic cosine") {
  auto lin = [](double s) { return s; };
  CHECK(oracle::boundary_value(1, 1, lin, 1.0, 1.0) == doctest::Approx(-std::cos(1.0)).epsilon(1e-9));
}
