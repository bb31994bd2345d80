#include "hessbif/branch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "hessbif/detail/tracing.hpp"
#include "hessbif/errors.hpp"

namespace hessbif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct ScalarNode {
  double t = 0.0;
  BranchPoint point;
};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// Linear interpolation of lambda in log d at x = log d.
double lambda_at_log_d(const std::vector<BranchPoint>& pts, double x) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double x0 = std::log(pts[i].d), x1 = std::log(pts[i + 1].d);
    if ((x - x0) * (x - x1) <= 0.0) {
      if (x1 == x0) return pts[i].lambda;
      const double w = (x - x0) / (x1 - x0);
      return (1 - w) * pts[i].lambda + w * pts[i + 1].lambda;
    }
  }
  throw InvalidInput("lambda_at_log_d: abscissa outside the branch");
}

// Estimate at one end. `dir` = +1 walks inward from the lower end, -1 from
// the upper end. Samples sit at 0, 0.5 and 1 decade from the end.
LimitEstimate end_estimate(const Branch& branch, int dir, double plateau_tol) {
  const auto& pts = branch.points;
  const double x0 = std::log(dir > 0 ? pts.front().d : pts.back().d);
  const double step = dir * 0.5 * std::log(10.0);
  const double l0 = dir > 0 ? pts.front().lambda : pts.back().lambda;
  const double l1 = lambda_at_log_d(pts, x0 + step);
  const double l2 = lambda_at_log_d(pts, x0 + 2 * step);

  // A fold inside the sampled tail makes the extrapolation meaningless.
  const double xa = std::min(x0, x0 + 2 * step), xb = std::max(x0, x0 + 2 * step);
  for (const auto& f : branch.folds) {
    const double xf = std::log(pts[f.index].d);
    if (xf >= xa && xf <= xb) return {};
  }
  const double d1 = l1 - l0, d2 = l2 - l1;
  const double flat = plateau_tol * std::abs(l0);
  if (std::abs(d1) > flat && std::abs(d2) > flat && (d1 > 0) != (d2 > 0)) return {};

  // Log slopes per decade, oriented from the end inward.
  const double e_near = (std::log(l1) - std::log(l0)) / (0.5 * std::log(10.0));
  const double e_far = (std::log(l2) - std::log(l1)) / (0.5 * std::log(10.0));
  LimitEstimate est;
  if (std::abs(e_near) <= 0.05 && std::abs(e_far) <= 0.05) {
    const double denom = d2 - d1;
    est.kind = LimitEstimate::Kind::Finite;
    // Aitken with the end value as the most converged iterate.
    est.value = std::abs(denom) > flat ? l0 - d1 * d1 / denom : l0;
    if (!(est.value > 0)) est.value = l0;
    return est;
  }
  if ((e_near > 0) != (e_far > 0)) return {};
  // Slope measured inward; lambda grows toward the end when the inward slope is negative.
  const bool grows_toward_end = e_near < 0;
  est.kind = grows_toward_end ? LimitEstimate::Kind::Infinite : LimitEstimate::Kind::Zero;
  return est;
}

std::string limit_target(const LimitClass& c, double lambda1, double* value) {
  switch (c.kind) {
    case LimitClass::Kind::Finite:
      *value = lambda1 / c.value;
      return fmt(*value);
    case LimitClass::Kind::Zero:
      return "infinite";
    case LimitClass::Kind::Infinite:
      return "zero";
  }
  return "";
}

bool estimate_matches(const LimitEstimate& e, const LimitClass& c, double lambda1, double rtol) {
  switch (c.kind) {
    case LimitClass::Kind::Finite:
      return e.kind == LimitEstimate::Kind::Finite &&
             std::abs(e.value - lambda1 / c.value) <= rtol * (lambda1 / c.value);
    case LimitClass::Kind::Zero:
      return e.kind == LimitEstimate::Kind::Infinite;
    case LimitClass::Kind::Infinite:
      return e.kind == LimitEstimate::Kind::Zero;
  }
  return false;
}

std::vector<double> geometric_samples(double a, double b, int n) {
  std::vector<double> s;
  for (int j = 0; j < n; ++j) s.push_back(a * std::pow(b / a, (j + 0.5) / n));
  return s;
}

double largest_crossing(const SolutionCount& c) {
  double m = 0.0;
  for (double d : c.crossings_d) m = std::max(m, d);
  return m;
}

}  // namespace

std::string LimitEstimate::to_string() const {
  switch (kind) {
    case Kind::Finite:
      return "finite(" + fmt(value) + ")";
    case Kind::Zero:
      return "zero";
    case Kind::Infinite:
      return "infinite";
    case Kind::Undetermined:
      break;
  }
  return "undetermined";
}

double Branch::lambda_min() const {
  if (points.empty()) throw InvalidInput("empty branch");
  double m = kInf;
  for (const auto& p : points) m = std::min(m, p.lambda);
  return m;
}

double Branch::lambda_max() const {
  if (points.empty()) throw InvalidInput("empty branch");
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.lambda);
  return m;
}

int threads_from_environment() {
  const char* env = std::getenv("HB_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<int>(std::min<long>(v, 256));
}

Branch trace_branch(const ProblemSpec& spec, double d_min, double d_max, int n_points, const ShootingConfig& cfg,
                    const TraceOptions& opts) {
  spec.validate();
  cfg.validate();
  if (!(d_min > 0) || !(d_max > d_min) || !std::isfinite(d_max))
    throw InvalidInput("trace_branch: need 0 < d_min < d_max");
  if (n_points < 16) throw InvalidInput("trace_branch: n_points must be >= 16");

  ShootingConfig scan_cfg = cfg;
  scan_cfg.scan_cells = std::min(cfg.scan_cells, 8);
  const double r2 = spec.radius * spec.radius;

  auto solve = [&](double d, const ScalarNode* seed) -> std::optional<ScalarNode> {
    double lo = 1.0 / r2, hi = 4.0 / r2;
    if (seed) {
      lo = seed->point.lambda / 2;
      hi = seed->point.lambda * 2;
    }
    if (!expand_bracket(spec, d, lo, hi, scan_cfg)) return std::nullopt;
    const auto roots = solve_lambda(spec, d, {lo, hi}, scan_cfg);
    if (roots.empty()) return std::nullopt;
    double lambda = roots.front();
    if (seed)
      for (double r : roots)
        if (std::abs(std::log(r / seed->point.lambda)) < std::abs(std::log(lambda / seed->point.lambda))) lambda = r;
    const RadialProfile prof = integrate_profile(spec, lambda, d, cfg);
    ScalarNode n;
    n.t = d;
    n.point = {d, lambda, boundary_residual(prof), prof.admissible};
    return n;
  };

  auto traced = detail::trace_nodes<ScalarNode>(solve, log_grid(d_min, d_max, n_points), opts);
  if (opts.refine_folds) detail::polish_folds(traced.nodes, solve, 1e-6);

  Branch branch;
  for (const auto& n : traced.nodes) branch.points.push_back(n.point);
  branch.gaps = std::move(traced.gaps);
  finalize_branch(branch);
  return branch;
}

std::vector<Fold> detect_folds(const Branch& branch, double plateau_tol) {
  const auto& pts = branch.points;
  std::vector<Fold> folds;
  if (pts.size() < 3) return folds;

  // Collapse runs whose lambdas stay within plateau_tol of the run start.
  struct Run {
    std::size_t lo_idx, hi_idx;  // indices of the run's min and max lambda
    double start;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double l = pts[i].lambda;
    if (!runs.empty() && std::abs(l - runs.back().start) <= plateau_tol * std::abs(runs.back().start)) {
      auto& r = runs.back();
      if (l < pts[r.lo_idx].lambda) r.lo_idx = i;
      if (l > pts[r.hi_idx].lambda) r.hi_idx = i;
    } else {
      runs.push_back({i, i, l});
    }
  }
  for (std::size_t j = 1; j + 1 < runs.size(); ++j) {
    const double prev = runs[j - 1].start, cur = runs[j].start, next = runs[j + 1].start;
    if (cur > prev && cur > next)
      folds.push_back({runs[j].hi_idx, pts[runs[j].hi_idx].lambda, FoldKind::Max});
    else if (cur < prev && cur < next)
      folds.push_back({runs[j].lo_idx, pts[runs[j].lo_idx].lambda, FoldKind::Min});
  }
  return folds;
}

SolutionCount count_solutions(const Branch& branch, double lambda, double plateau_tol) {
  SolutionCount out;
  const auto& pts = branch.points;
  const double band = plateau_tol * std::abs(lambda);
  for (const auto& f : branch.folds)
    if (std::abs(f.lambda - lambda) <= band) {
      out.at_fold = true;
      ++out.fold_multiplicity;
    }

  std::optional<std::size_t> last;  // previous point clearly off the line
  std::size_t on_line_run = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double diff = pts[i].lambda - lambda;
    if (std::abs(diff) <= band) {
      if (++on_line_run >= 2) out.at_fold = true;  // plateau on the line
      continue;
    }
    on_line_run = 0;
    if (last) {
      const double dprev = pts[*last].lambda - lambda;
      if ((dprev > 0) != (diff > 0)) {
        ++out.count;
        const double x0 = std::log(pts[*last].d), x1 = std::log(pts[i].d);
        const double w = dprev / (dprev - diff);
        out.crossings_d.push_back(std::exp(x0 + w * (x1 - x0)));
      }
    }
    last = i;
  }
  return out;
}

std::pair<LimitEstimate, LimitEstimate> asymptote_estimates(const Branch& branch) {
  if (branch.points.size() < 3) throw InvalidInput("asymptote_estimates: branch has fewer than 3 points");
  const double decades = std::log10(branch.points.back().d / branch.points.front().d);
  if (decades < 4.0 - 1e-9) throw InvalidInput("asymptote_estimates: branch spans fewer than 4 decades of d");
  return {end_estimate(branch, +1, 1e-9), end_estimate(branch, -1, 1e-9)};
}

void finalize_branch(Branch& branch) {
  for (std::size_t i = 1; i < branch.points.size(); ++i)
    if (!(branch.points[i].d > branch.points[i - 1].d))
      throw NumericalFailure("branch amplitudes are not strictly increasing");
  branch.folds = detect_folds(branch);
  branch.lambda_at_zero = {};
  branch.lambda_at_infinity = {};
  if (branch.points.size() >= 3 && std::log10(branch.points.back().d / branch.points.front().d) >= 4.0 - 1e-9) {
    auto [z, inf] = asymptote_estimates(branch);
    branch.lambda_at_zero = z;
    branch.lambda_at_infinity = inf;
  }
}

std::string Interval::to_string() const { return "(" + fmt(lo) + ", " + fmt(hi) + ")"; }

std::string to_string(MultiplicityProfile p) {
  switch (p) {
    case MultiplicityProfile::AtLeastOne:
      return "at-least-one";
    case MultiplicityProfile::TwoBelowMax:
      return "two-below-max-none-above";
    case MultiplicityProfile::TwoAboveMin:
      return "two-above-min-none-below";
    case MultiplicityProfile::OutOfTable:
      return "out-of-table";
  }
  return "";
}

TheoremPrediction predicted_interval(const LimitClass& f0, const LimitClass& finf, double lambda1, bool coercive) {
  if (!(lambda1 > 0) || !std::isfinite(lambda1)) throw InvalidInput("predicted_interval: lambda1 must be positive");
  if (f0.is_finite() && finf.is_finite() && f0.value == finf.value)
    throw OutOfTable("predicted_interval: f0 = finf = " + fmt(f0.value) + " is outside the existence table");
  TheoremPrediction p;
  p.f0 = f0;
  p.finf = finf;
  p.lambda1 = lambda1;
  p.label = "f0=" + f0.to_string() + ", finf=" + finf.to_string();
  using K = LimitClass::Kind;
  const K a = f0.kind, b = finf.kind;
  if (a == K::Infinite && b == K::Infinite) {
    p.multiplicity = MultiplicityProfile::TwoBelowMax;
    p.existence = {0.0, kInf};  // below the radial maximum; refined by the branch
    return p;
  }
  if (a == K::Zero && b == K::Zero) {
    p.multiplicity = MultiplicityProfile::TwoAboveMin;
    p.hypotheses_met = coercive;
    p.existence = {0.0, kInf};
    return p;
  }
  if (a == K::Finite && b == K::Finite) {
    const double x = lambda1 / f0.value, y = lambda1 / finf.value;
    p.existence = {std::min(x, y), std::max(x, y)};
  } else if (a == K::Finite) {
    p.existence = b == K::Zero ? Interval{lambda1 / f0.value, kInf} : Interval{0.0, lambda1 / f0.value};
  } else if (b == K::Finite) {
    p.existence = a == K::Zero ? Interval{lambda1 / finf.value, kInf} : Interval{0.0, lambda1 / finf.value};
  } else {
    p.existence = {0.0, kInf};  // (Zero, Infinite) or (Infinite, Zero)
  }
  return p;
}

TheoremPrediction eigen_case_prediction(const LimitClass& f0, double lambda1) {
  if (!f0.is_finite()) throw InvalidInput("eigen_case_prediction: f0 must be finite");
  TheoremPrediction p;
  p.f0 = f0;
  p.finf = f0;
  p.lambda1 = lambda1;
  p.multiplicity = MultiplicityProfile::OutOfTable;
  p.existence = {lambda1 / f0.value, lambda1 / f0.value};
  p.label = "f0=finf=" + f0.to_string() + " (eigenvalue case)";
  return p;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void VerificationReport::add(std::string name, std::string predicted, std::string observed, bool ok, double tol) {
  checks.push_back({std::move(name), std::move(predicted), std::move(observed), ok, tol});
}

VerificationReport verify_predictions(const Branch& branch, const TheoremPrediction& pred, int lambda_samples,
                                      const VerifyOptions& opts) {
  if (branch.points.size() < 3) throw InvalidInput("verify_predictions: branch has fewer than 3 points");
  if (lambda_samples < 1) throw InvalidInput("verify_predictions: need at least one lambda sample");
  VerificationReport rep;
  const double tol = opts.plateau_tol;
  const double l1 = pred.lambda1;
  rep.notes.push_back("checks cover radial solutions on the traced branch only");
  rep.notes.push_back("case " + pred.label + ", multiplicity profile " + to_string(pred.multiplicity));
  if (!branch.gaps.empty())
    rep.notes.push_back(std::to_string(branch.gaps.size()) + " amplitudes without a lambda root (possible non-existence)");

  auto count_str = [](const SolutionCount& c) {
    return std::to_string(c.count) + (c.at_fold ? " (at fold)" : "");
  };
  std::vector<double> compact;  // lambdas used for the a-priori monitor

  if (pred.multiplicity == MultiplicityProfile::OutOfTable) {
    const double target = l1 / pred.f0.value;
    double worst = 0.0;
    for (const auto& p : branch.points) worst = std::max(worst, std::abs(p.lambda - target) / target);
    rep.notes.push_back("f0 = finf is outside the existence table; eigenvalue-case report");
    rep.add("flat branch at lambda1/f0", fmt(target), "max rel deviation " + fmt(worst), worst <= opts.flat_tol,
            opts.flat_tol);
    for (double s : {1.0 - 1e-3, 1.0 + 1e-3}) {
      const auto c = count_solutions(branch, target * s, tol);
      rep.add("no solution at " + fmt(s) + " lambda1/f0", "0", count_str(c), c.count == 0 && !c.at_fold, tol);
    }
    return rep;
  }

  // Asymptotes.
  {
    double v = 0.0;
    const std::string want0 = limit_target(pred.f0, l1, &v);
    rep.add("lambda as d->0", want0, branch.lambda_at_zero.to_string(),
            estimate_matches(branch.lambda_at_zero, pred.f0, l1, opts.asymptote_rtol), opts.asymptote_rtol);
    const std::string wantinf = limit_target(pred.finf, l1, &v);
    rep.add("lambda as d->inf", wantinf, branch.lambda_at_infinity.to_string(),
            estimate_matches(branch.lambda_at_infinity, pred.finf, l1, opts.asymptote_rtol),
            opts.asymptote_rtol);
  }

  if (pred.multiplicity == MultiplicityProfile::AtLeastOne) {
    const Interval& I = pred.existence;
    double a = 0.0, b = 0.0;
    if (std::isinf(I.hi) && I.lo > 0) {
      a = I.lo;
      b = 10.0 * I.lo;
    } else if (I.lo == 0.0 && std::isfinite(I.hi)) {
      a = I.hi * 1e-3;
      b = I.hi;
    } else if (std::isfinite(I.hi)) {
      a = I.lo;
      b = I.hi;
    } else {
      const double centre = std::sqrt(branch.lambda_min() * branch.lambda_max());
      a = centre / std::pow(10.0, 1.5);
      b = centre * std::pow(10.0, 1.5);
      if (branch.lambda_max() / branch.lambda_min() < 1e3)
        rep.notes.push_back("traced lambda range spans fewer than 3 decades");
    }
    for (double lam : geometric_samples(a, b, lambda_samples)) {
      const auto c = count_solutions(branch, lam, tol);
      rep.add("existence at lambda=" + fmt(lam), ">= 1 in " + I.to_string(), count_str(c), c.count >= 1, tol);
      compact.push_back(lam);
    }
    // Radial non-existence beyond the bifurcation point lambda1/f0, checked
    // only on monotone branches where it is an observed property.
    if (pred.f0.is_finite() && branch.folds.empty()) {
      const double end = l1 / pred.f0.value;
      double probe = 0.0;
      if (I.lo == end)
        probe = end * (1 - 10 * tol);
      else if (I.hi == end)
        probe = end * (1 + 10 * tol);
      if (probe > 0) {
        const auto c = count_solutions(branch, probe, tol);
        rep.add("radial non-existence at lambda=" + fmt(probe), "0", count_str(c), c.count == 0, tol);
      }
    }
  } else {
    const bool below_max = pred.multiplicity == MultiplicityProfile::TwoBelowMax;
    const FoldKind want = below_max ? FoldKind::Max : FoldKind::Min;
    std::vector<double> fl;
    for (const auto& f : branch.folds)
      if (f.kind == want) fl.push_back(f.lambda);
    const std::string which = below_max ? "radial lambda* (maximum)" : "radial lambda_* (minimum)";
    if (!pred.hypotheses_met) {
      rep.notes.push_back("f is not coercive; multiplicity checks skipped");
      return rep;
    }
    rep.add(which, ">= 1 fold", std::to_string(fl.size()) + " fold(s)", !fl.empty(), tol);
    if (!fl.empty()) {
      const double star = below_max ? *std::min_element(fl.begin(), fl.end()) : *std::max_element(fl.begin(), fl.end());
      rep.notes.push_back(which + " = " + fmt(star));
      const double inside = below_max ? 0.5 * star : 2.0 * star;
      const double outside = below_max ? 2.0 * star : 0.5 * star;
      const auto cin = count_solutions(branch, inside, tol);
      rep.add("two solutions at lambda=" + fmt(inside), ">= 2", count_str(cin), cin.count >= 2, tol);
      const auto cout = count_solutions(branch, outside, tol);
      rep.add("no solution at lambda=" + fmt(outside), "0", count_str(cout), cout.count == 0 && !cout.at_fold, tol);
      // Window of two decades beyond the fold, cut to where both arms are traced.
      const double lam_first = branch.points.front().lambda, lam_last = branch.points.back().lambda;
      double a = below_max ? star * 1e-2 : star * (1 + 100 * tol);
      double b = below_max ? star * (1 - 100 * tol) : star * 1e2;
      if (below_max && std::max(lam_first, lam_last) * (1 + 100 * tol) > a) {
        a = std::max(lam_first, lam_last) * (1 + 100 * tol);
        rep.notes.push_back("two-arm window starts at " + fmt(a) + " where both arms are traced");
      }
      if (!below_max && std::min(lam_first, lam_last) * (1 - 100 * tol) < b) {
        b = std::min(lam_first, lam_last) * (1 - 100 * tol);
        rep.notes.push_back("two-arm window ends at " + fmt(b) + " where both arms are traced");
      }
      if (a < b) {
        for (double lam : geometric_samples(a, b, lambda_samples)) {
          const auto c = count_solutions(branch, lam, tol);
          rep.add("two-arm window lambda=" + fmt(lam), ">= 2", count_str(c), c.count >= 2, tol);
        }
      }
      compact.push_back(inside);
    }
  }

  // A-priori bound when finf is infinite: at every sampled lambda the
  // crossing amplitudes stay inside the traced range and the tail has left
  // the compact.
  if (pred.finf.is_infinite() && !compact.empty()) {
    const double kmin = *std::min_element(compact.begin(), compact.end());
    const double tail = branch.points.back().lambda;
    double dmax = 0.0;
    for (double lam : compact) dmax = std::max(dmax, largest_crossing(count_solutions(branch, lam, tol)));
    const bool ok = tail < kmin && dmax < branch.points.back().d;
    rep.add("a-priori bound on [" + fmt(kmin) + ", " +
                fmt(*std::max_element(compact.begin(), compact.end())) + "]",
            "sup d < " + fmt(branch.points.back().d) + ", tail lambda < " + fmt(kmin),
            "sup d = " + fmt(dmax) + ", tail lambda = " + fmt(tail), ok, 0.0);
  }
  return rep;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"predicted", c.predicted}, {"observed", c.observed}, {"pass", c.pass}, {"tol", c.tol}});
  j["notes"] = report.notes;
  j["pass"] = report.pass();
  return j;
}

void write_branch_csv(std::ostream& os, const Branch& branch) {
  std::vector<bool> is_fold(branch.points.size(), false);
  for (const auto& f : branch.folds) is_fold[f.index] = true;
  os << "index,d,lambda,residual,is_fold\n";
  char buf[128];
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const auto& p = branch.points[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d\n", i, p.d, p.lambda, p.residual, is_fold[i] ? 1 : 0);
    os << buf;
  }
}

Branch read_branch_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("branch CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,d,lambda,residual,is_fold") throw InvalidInput("branch CSV: unexpected header '" + line + "'");
  Branch b;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw InvalidInput("branch CSV row " + std::to_string(row) + ": expected 5 fields");
    BranchPoint p;
    try {
      std::size_t used = 0;
      auto num = [&](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      p.d = num(cells[1]);
      p.lambda = num(cells[2]);
      p.residual = num(cells[3]);
    } catch (const std::exception&) {
      throw InvalidInput("branch CSV row " + std::to_string(row) + ": malformed number");
    }
    if (!(p.d > 0) || !(p.lambda > 0) || !std::isfinite(p.d) || !std::isfinite(p.lambda))
      throw InvalidInput("branch CSV row " + std::to_string(row) + ": d and lambda must be positive");
    p.admissible = true;
    b.points.push_back(p);
    ++row;
  }
  if (b.points.empty()) throw InvalidInput("branch CSV has no data rows");
  for (std::size_t i = 1; i < b.points.size(); ++i)
    if (!(b.points[i].d > b.points[i - 1].d)) throw InvalidInput("branch CSV: d must be strictly increasing");
  finalize_branch(b);
  return b;
}

bool looks_coercive(const NonlinearitySpec& spec) {
  // Growth per decade must not die out: bounded f has increments shrinking
  // like 1/s, logarithmic growth keeps them constant.
  const double first = eval_nonlinearity(spec, 1e5) - eval_nonlinearity(spec, 1e4);
  double prev = eval_nonlinearity(spec, 1e5);
  for (int e = 6; e <= 8; ++e) {
    const double v = eval_nonlinearity(spec, std::pow(10.0, e));
    if (!(v - prev > 0.5 * first) || !(first > 0)) return false;
    prev = v;
  }
  return true;
}

}  // namespace hessbif
