// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hessbif/branch.hpp"
#include "hessbif/errors.hpp"
#include "hessbif/shooting.hpp"
#include "hessbif/system.hpp"
#include "reference_values.hpp"

using namespace hessbif;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double a, double b) { return std::abs(a / b - 1); }

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out;
  for (int j = 0; j < n; ++j) out.push_back(lo * std::pow(hi / lo, (j + 0.5) / n));
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return g;
}

Branch trace(const NonlinearitySpec& f, int N, int k, int n = 65, double d_min = 1e-4, double d_max = 1e4) {
  return trace_branch({N, k, 1.0, f}, d_min, d_max, n, {});
}

const ShootingConfig kCfg{};

Outcome eigenvalues() {
  Outcome o;
  const double pi = ref::kPi;
  for (auto [N, exact] : {std::pair{1, pi * pi / 4}, std::pair{3, pi * pi}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double l = first_eigenvalue(N, 1, 1.0).lambda1;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(rel(l, exact) < 1e-8, fmt("N=%g: lambda1 %.12g rel err %.2e", N, l, rel(l, exact)));
    o.require(secs < 1.0, fmt("N=%g took %.2f s", N, secs));
  }
  return o;
}

Outcome scaling() {
  Outcome o;
  for (auto [N, k] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
    const double l1 = first_eigenvalue(N, k, 1.0).lambda1;
    const double l2 = first_eigenvalue(N, k, 2.0).lambda1;
    o.require(rel(4 * l2, l1) < 1e-8, fmt("(N,k)=(%g,%g): rel err %.2e", N, k, rel(4 * l2, l1)));
  }
  return o;
}

Outcome flatness() {
  Outcome o;
  for (int N = 1; N <= 3; ++N)
    for (int k = 1; k <= N; ++k) {
      const double l1 = first_eigenvalue(N, k, 1.0).lambda1;
      const Branch b = trace(NonlinearitySpec::linear(), N, k, 33, 1e-3, 1e3);
      double worst = 0;
      for (const auto& p : b.points) worst = std::max(worst, std::abs(p.lambda - l1));
      o.require(b.gaps.empty(), fmt("(N,k)=(%g,%g): gaps", N, k));
      o.require(worst < 1e-6, fmt("(N,k)=(%g,%g): max |lambda - lambda1| = %.2e", N, k, worst));
    }
  return o;
}

Outcome existence_table() {
  Outcome o;
  const double tol = kCfg.root_tol;
  using K = LimitEstimate::Kind;
  for (int k : {1, 2}) {
    const double l1 = first_eigenvalue(2, k, 1.0).lambda1;
    const std::string at = "k=" + std::to_string(k) + " ";
    auto count_at = [&](const Branch& b, const std::vector<double>& lams, const std::string& what) {
      for (double lam : lams)
        o.require(count_solutions(b, lam).count >= 1, at + what + fmt(": no solution at lambda %.6g", lam));
    };
    // Five lambdas spanning 3 decades around the geometric centre of the branch.
    auto span3 = [](const Branch& b) {
      const double c = std::sqrt(b.lambda_min() * b.lambda_max());
      std::vector<double> out;
      for (int j = 0; j < 5; ++j) out.push_back(c * std::pow(10.0, -1.5 + 0.75 * j));
      return out;
    };

    // (Finite, Zero): saturating.
    {
      const Branch b = trace(NonlinearitySpec::saturating(), 2, k);
      count_at(b, geometric(l1, 10 * l1, 5), "saturating");
      o.require(b.lambda_min() >= l1 * (1 - 10 * tol), at + fmt("saturating: lambda %.10g below lambda1", b.lambda_min()));
      o.require(count_solutions(b, l1 * (1 - 10 * tol)).count == 0, at + "saturating: solution below lambda1");
      o.require(b.lambda_at_zero.kind == K::Finite && rel(b.lambda_at_zero.value, l1) < 1e-3,
                at + "saturating: lambda(0) = " + b.lambda_at_zero.to_string());
      o.require(b.lambda_at_infinity.kind == K::Infinite, at + "saturating: lambda(inf) = " + b.lambda_at_infinity.to_string());
    }
    // (Finite, Infinite): s(1 + s).
    {
      const Branch b = trace(NonlinearitySpec::superlinear(), 2, k);
      count_at(b, geometric(1e-3 * l1, l1, 5), "superlinear");
      o.require(b.lambda_at_zero.kind == K::Finite && rel(b.lambda_at_zero.value, l1) < 1e-3,
                at + "superlinear: lambda(0) = " + b.lambda_at_zero.to_string());
      o.require(b.lambda_at_infinity.kind == K::Zero, at + "superlinear: lambda(inf) = " + b.lambda_at_infinity.to_string());
      o.require(b.gaps.empty(), at + "superlinear: gaps");
    }
    // (Zero, Infinite): s^2, and (Infinite, Zero): sqrt(s).
    {
      const Branch b = trace(NonlinearitySpec::power(2), 2, k);
      count_at(b, span3(b), "s^2");
      o.require(b.lambda_at_zero.kind == K::Infinite && b.lambda_at_infinity.kind == K::Zero,
                at + "s^2: limits " + b.lambda_at_zero.to_string() + ", " + b.lambda_at_infinity.to_string());
    }
    {
      const Branch b = trace(NonlinearitySpec::power(0.5), 2, k);
      count_at(b, span3(b), "sqrt");
      o.require(b.lambda_at_zero.kind == K::Zero && b.lambda_at_infinity.kind == K::Infinite,
                at + "sqrt: limits " + b.lambda_at_zero.to_string() + ", " + b.lambda_at_infinity.to_string());
    }
  }
  return o;
}

Outcome one_maximum() {
  Outcome o;
  const auto f = NonlinearitySpec::sum_of_powers(0.5, 2, 1);
  for (int k : {1, 2}) {
    const Branch b = trace(f, 2, k);
    const std::string at = "k=" + std::to_string(k) + " ";
    if (b.folds.size() != 1 || b.folds[0].kind != FoldKind::Max) {
      o.require(false, at + "expected exactly one maximum, found " + std::to_string(b.folds.size()) + " fold(s)");
      continue;
    }
    const double star = b.folds[0].lambda;
    o.require(count_solutions(b, 0.5 * star).count == 2, at + "count at 0.5 lambda* is not 2");
    o.require(count_solutions(b, 2.0 * star).count == 0, at + "count at 2 lambda* is not 0");
    const Branch fine = trace(f, 2, k, 129);
    const double r = fine.folds.empty() ? 1.0 : rel(fine.folds[0].lambda, star);
    o.require(r < 1e-4, at + fmt("refinement moves lambda* by %.2e", r));
    const double expected = k == 1 ? ref::lambda_max_sqrt_plus_square_k1 : ref::lambda_max_sqrt_plus_square_k2;
    o.require(rel(star, expected) < 1e-6, at + fmt("lambda* = %.10g", star));
  }
  return o;
}

Outcome one_minimum() {
  Outcome o;
  for (int k : {2, 1}) {
    const Branch b = trace(NonlinearitySpec::log_bump(), 2, k);
    const std::string at = "k=" + std::to_string(k) + " ";
    if (b.folds.size() != 1 || b.folds[0].kind != FoldKind::Min) {
      o.require(false, at + "expected exactly one minimum, found " + std::to_string(b.folds.size()) + " fold(s)");
      continue;
    }
    const double low = b.folds[0].lambda;
    o.require(count_solutions(b, 0.5 * low).count == 0, at + "count at 0.5 lambda_* is not 0");
    o.require(count_solutions(b, 2.0 * low).count == 2, at + "count at 2 lambda_* is not 2");
    const double expected = k == 1 ? ref::lambda_min_log_bump_k1 : ref::lambda_min_log_bump_k2;
    o.require(rel(low, expected) < 1e-6, at + fmt("lambda_* = %.10g", low));
  }
  return o;
}

Outcome system_eigen() {
  Outcome o;
  for (auto [N, k] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 3}}) {
    const auto s = system_eigenvalue(N, k, 1.0);
    const double l1 = first_eigenvalue(N, k, 1.0).lambda1;
    o.require(rel(s.lambda0, l1) < 1e-8, fmt("(N,k)=(%g,%g): lambda0 rel err %.2e", N, k, rel(s.lambda0, l1)));
    o.require(s.consistent, fmt("(N,k)=(%g,%g): asymmetric solve gap %.2e", N, k, s.relative_gap));
  }
  return o;
}

Outcome power_pair() {
  Outcome o;
  const double C = std::pow(ref::kPi / 2, 4);
  const auto a = power_pair_constant(1, 1, 1, 1, 1.0, 5);
  double worst = 0;
  for (const auto& s : a.samples) worst = std::max(worst, rel(s.product, C));
  o.require(worst < 1e-6, fmt("(1,1): max |lambda mu / C - 1| = %.2e", worst));

  const auto b = power_pair_constant(2, 2, 4, 1, 1.0, 5);
  const double span = std::log10(b.samples.back().mu / b.samples.front().mu);
  o.require(b.max_relative_dev < 1e-5, fmt("(2,2): spread %.2e", b.max_relative_dev));
  o.require(span >= 2 - 1e-12, fmt("(2,2): mu spans %.2f decades", span));
  ShootingConfig fine;
  fine.integrator_rtol = 1e-12;
  const auto c = power_pair_constant(2, 2, 4, 1, 1.0, 5, fine);
  o.require(rel(b.constant, c.constant) < 1e-6, fmt("(2,2): resolutions disagree by %.2e", rel(b.constant, c.constant)));
  return o;
}

Outcome system_table() {
  Outcome o;
  const double l1 = first_eigenvalue(2, 1, 1.0).lambda1;
  const auto grid = log_grid(1e-4, 1e4, 33);
  using K = LimitEstimate::Kind;
  {
    const auto spec = symmetric_system(2, 1, 1.0, NonlinearitySpec::saturating());
    const auto sb = trace_system_branch(spec, grid, kCfg);
    const auto& b = sb.branch;
    o.require(b.lambda_at_zero.kind == K::Finite && rel(b.lambda_at_zero.value, l1) < 1e-3,
              "saturating: lambda(0) = " + b.lambda_at_zero.to_string());
    o.require(b.lambda_at_infinity.kind == K::Infinite, "saturating: lambda(inf) = " + b.lambda_at_infinity.to_string());
    const auto rep = verify_predictions(b, predicted_interval(LimitClass::finite(1), LimitClass::zero(), l1), 5);
    o.require(rep.pass(), "saturating: existence checks failed");
  }
  {
    const auto spec = symmetric_system(2, 1, 1.0, NonlinearitySpec::quadratic_over_linear());
    const auto sb = trace_system_branch(spec, grid, kCfg);
    const auto& b = sb.branch;
    o.require(b.lambda_at_infinity.kind == K::Finite && rel(b.lambda_at_infinity.value, l1) < 1e-3,
              "quadratic over linear: lambda(inf) = " + b.lambda_at_infinity.to_string());
    o.require(b.lambda_at_zero.kind == K::Infinite, "quadratic over linear: lambda(0) = " + b.lambda_at_zero.to_string());
    const auto rep = verify_predictions(b, predicted_interval(LimitClass::zero(), LimitClass::finite(1), l1), 5);
    o.require(rep.pass(), "quadratic over linear: existence checks failed");
  }
  return o;
}

Outcome invariants() {
  Outcome o;
  // Admissibility of every accepted branch point.
  int points = 0;
  for (const auto& f : {NonlinearitySpec::superlinear(), NonlinearitySpec::sum_of_powers(0.5, 2, 1),
                        NonlinearitySpec::log_bump(), NonlinearitySpec::power(0.5)})
    for (int k : {1, 2}) {
      const Branch b = trace(f, 2, k, 33);
      for (const auto& p : b.points) {
        ++points;
        o.require(p.admissible, fmt("inadmissible point d=%.6g lambda=%.6g", p.d, p.lambda));
      }
    }
  o.require(points > 0, "no points traced");

  // Cosine profile on 1024 grid points.
  ShootingConfig cfg;
  cfg.grid_points = 1024;
  const ProblemSpec lin{1, 1, 1.0, NonlinearitySpec::linear()};
  const auto prof = integrate_profile(lin, ref::kPi * ref::kPi / 4, 1.0, cfg);
  o.require(prof.max_consistency_residual < 1e-6, fmt("cosine consistency residual %.2e", prof.max_consistency_residual));

  // Byte-identical reruns, sequential and threaded.
  auto csv = [](int threads) {
    TraceOptions t;
    t.threads = threads;
    const Branch b =
        trace_branch({2, 2, 1.0, NonlinearitySpec::sum_of_powers(0.5, 2, 1)}, 1e-4, 1e4, 33, {}, t);
    std::ostringstream os;
    write_branch_csv(os, b);
    std::ostringstream rs;
    rs << to_json(verify_predictions(b, predicted_interval(LimitClass::infinite(), LimitClass::infinite(),
                                                           ref::lambda1_2_2), 5)).dump();
    return os.str() + rs.str();
  };
  o.require(csv(1) == csv(1), "sequential reruns differ");
  o.require(csv(4) == csv(4), "threaded reruns differ");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "eigenvalues (1,1) and (3,1)", 2.0, eigenvalues},
      {2, "eigenvalue scaling under R -> 2R", 5.0, scaling},
      {3, "linear f gives a flat branch", 30.0, flatness},
      {4, "existence table, four cells at N=2", 120.0, existence_table},
      {5, "sqrt(s) + s^2: one maximum", 60.0, one_maximum},
      {6, "log(1 + s^2): one minimum", 60.0, one_minimum},
      {7, "system eigenvalue equals lambda1", 10.0, system_eigen},
      {8, "power pair constant", 60.0, power_pair},
      {9, "symmetric system table cells", 120.0, system_table},
      {10, "admissibility, consistency, determinism", 60.0, invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.limit_s, fmt("runtime %.1f s over the %.0f s limit", secs, c.limit_s));
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
