#include "hessbif/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hessbif/branch.hpp"
#include "hessbif/errors.hpp"
#include "hessbif/hessian.hpp"
#include "hessbif/plot.hpp"
#include "hessbif/problem.hpp"
#include "hessbif/shooting.hpp"
#include "hessbif/system.hpp"

namespace hessbif::cli {

namespace {

std::string g15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

struct Options {
  std::string spec_path;
  std::optional<int> N, k;
  std::optional<double> R;
  double d_min = 1e-4, d_max = 1e4;
  int points = 65;
  int samples = 5;
  std::string out_path;
  std::string report_path;
  std::optional<std::string> f0_override, finf_override;
  // solver overrides
  std::optional<int> grid_points;
  std::optional<double> rtol, root_tol;
  int threads = 0;
  // power pair
  double alpha = 1, beta = 1;
  std::optional<double> mu_lo, mu_hi;
  // plot
  std::vector<std::string> inputs;
  std::optional<double> shade_lo, shade_hi;
  std::string title;
};

nlohmann::json read_json_file(const std::string& path) {
  if (path.empty()) throw InvalidInput("--spec is required");
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

ShootingConfig config_from(const Options& o) {
  ShootingConfig cfg;
  if (o.grid_points) cfg.grid_points = *o.grid_points;
  if (o.rtol) cfg.integrator_rtol = *o.rtol;
  if (o.root_tol) cfg.root_tol = *o.root_tol;
  cfg.validate();
  return cfg;
}

TraceOptions trace_options(const Options& o) {
  TraceOptions t;
  t.threads = o.threads;
  return t;
}

ProblemSpec load_problem(const Options& o) {
  ProblemSpec spec = problem_from_json(read_json_file(o.spec_path));
  if (o.N) spec.dimension = *o.N;
  if (o.k) spec.order = *o.k;
  if (o.R) spec.radius = *o.R;
  spec.validate();
  return spec;
}

SystemSpec load_system(const Options& o) {
  nlohmann::json j = read_json_file(o.spec_path);
  if (!j.is_object()) throw InvalidInput("system spec must be a JSON object");
  if (o.N) j["N"] = *o.N;
  if (o.k) j["k"] = *o.k;
  if (o.R) j["R"] = *o.R;
  return system_from_json(j);
}

LimitClass parse_class(const std::string& s) {
  if (s == "zero") return LimitClass::zero();
  if (s == "infinite") return LimitClass::infinite();
  const std::string prefix = "finite:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string v = s.substr(prefix.size());
      const double x = std::stod(v, &used);
      if (used == v.size()) return LimitClass::finite(x);
    } catch (const std::exception&) {
    }
  }
  throw InvalidInput("limit class must be zero, infinite or finite:<value>, got '" + s + "'");
}

// Opens `path` for writing, or returns `fallback` when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidInput("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void print_branch_summary(std::ostream& os, const Branch& b) {
  os << "points " << b.points.size() << ", gaps " << b.gaps.size() << "\n";
  os << "lambda range [" << g15(b.lambda_min()) << ", " << g15(b.lambda_max()) << "]\n";
  os << "lambda as d->0: " << b.lambda_at_zero.to_string() << "\n";
  os << "lambda as d->inf: " << b.lambda_at_infinity.to_string() << "\n";
  for (const auto& f : b.folds)
    os << "fold " << (f.kind == FoldKind::Max ? "max" : "min") << " lambda " << g15(f.lambda) << " at d "
       << g15(b.points[f.index].d) << "\n";
}

void print_report(std::ostream& os, const VerificationReport& rep) {
  for (const auto& c : rep.checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": predicted " << c.predicted << ", observed " << c.observed
       << "\n";
  for (const auto& n : rep.notes) os << "note: " << n << "\n";
  os << (rep.pass() ? "all checks passed" : "verification FAILED") << "\n";
}

int cmd_eigen(const Options& o, std::ostream& out) {
  const int N = o.N.value_or(1), k = o.k.value_or(1);
  const double R = o.R.value_or(1.0);
  const auto res = first_eigenvalue(N, k, R, config_from(o));
  out << "lambda1 " << g15(res.lambda1) << "\n";
  out << "residual " << g15(res.residual) << "\n";
  out << "iterations " << res.iterations << "\n";
  return kOk;
}

int cmd_trace(const Options& o, std::ostream& out) {
  const ProblemSpec spec = load_problem(o);
  const Branch b = trace_branch(spec, o.d_min, o.d_max, o.points, config_from(o), trace_options(o));
  if (o.out_path.empty()) {
    write_branch_csv(out, b);
  } else {
    Sink sink(o.out_path, out);
    write_branch_csv(*sink, b);
    print_branch_summary(out, b);
  }
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ProblemSpec spec = load_problem(o);
  const auto cls = classify_limits(spec.nonlinearity);
  if (cls.conflict) throw InvalidInput("declared limit classes disagree with the estimate: " + cls.detail);
  const LimitClass f0 = o.f0_override ? parse_class(*o.f0_override) : cls.f0;
  const LimitClass finf = o.finf_override ? parse_class(*o.finf_override) : cls.finf;
  const ShootingConfig cfg = config_from(o);
  const double l1 = first_eigenvalue(spec.dimension, spec.order, spec.radius, cfg).lambda1;
  TheoremPrediction pred;
  if (f0.is_finite() && finf.is_finite() && f0.value == finf.value)
    pred = eigen_case_prediction(f0, l1);
  else
    pred = predicted_interval(f0, finf, l1, looks_coercive(spec.nonlinearity));
  const Branch b = trace_branch(spec, o.d_min, o.d_max, o.points, cfg, trace_options(o));
  VerificationReport rep = verify_predictions(b, pred, o.samples);
  rep.notes.push_back("lambda1 = " + g15(l1));
  if (pred.multiplicity == MultiplicityProfile::AtLeastOne)
    rep.notes.push_back("predicted existence interval " + pred.existence.to_string());
  if (!o.out_path.empty()) {
    Sink sink(o.out_path, out);
    write_branch_csv(*sink, b);
  }
  if (!o.report_path.empty()) {
    Sink sink(o.report_path, out);
    *sink << to_json(rep).dump(2) << "\n";
  }
  print_report(out, rep);
  return rep.pass() ? kOk : kVerificationFailed;
}

std::vector<double> d_u_grid(const Options& o) {
  if (!(o.d_min > 0) || !(o.d_max > o.d_min)) throw InvalidInput("need 0 < --d-min < --d-max");
  if (o.points < 16) throw InvalidInput("--points must be >= 16");
  std::vector<double> g;
  for (int i = 0; i < o.points; ++i)
    g.push_back(o.d_min * std::pow(o.d_max / o.d_min, double(i) / (o.points - 1)));
  g.back() = o.d_max;
  return g;
}

int cmd_system_trace(const Options& o, std::ostream& out) {
  const SystemSpec spec = load_system(o);
  const SystemBranch sb = trace_system_branch(spec, d_u_grid(o), config_from(o), trace_options(o));
  if (o.out_path.empty()) {
    write_system_branch_csv(out, sb);
  } else {
    Sink sink(o.out_path, out);
    write_system_branch_csv(*sink, sb);
    print_branch_summary(out, sb.branch);
  }
  return kOk;
}

int cmd_system_verify(const Options& o, std::ostream& out) {
  const SystemSpec spec = load_system(o);
  const auto cls = classify_system(spec);
  if (cls.conflict) throw InvalidInput("declared system classes disagree with the estimate: " + cls.detail);
  const bool monotone = check_monotonicity(spec, 10.0, 41);
  if ((spec.g_monotone_in_t.value_or(false) || spec.h_monotone_in_s.value_or(false)) && !monotone)
    throw InvalidInput("declared monotone flags are contradicted on the sampled grid");
  const ShootingConfig cfg = config_from(o);
  const auto eig = system_eigenvalue(spec.dimension, spec.order, spec.radius, cfg);
  const double l1 = eig.lambda0;
  const SystemBranch sb = trace_system_branch(spec, d_u_grid(o), cfg, trace_options(o));

  VerificationReport rep;
  rep.add("lambda0 from the full two-residual solve", g15(eig.lambda0), g15(eig.lambda_asymmetric), eig.consistent,
          1e-6);
  rep.notes.push_back("lambda0 (coupled eigenvalue) and lambda1 (scalar) coincide on balls by symmetric reduction");
  if (!cls.matched) {
    rep.notes.push_back("g and h have different limit classes (g0=" + cls.g0.to_string() + ", h0=" +
                        cls.h0.to_string() + ", ginf=" + cls.ginf.to_string() + ", hinf=" + cls.hinf.to_string() +
                        "); excluded from table verification");
  } else {
    LimitClass mu = o.f0_override ? parse_class(*o.f0_override) : cls.g0;
    LimitClass nu = o.finf_override ? parse_class(*o.finf_override) : cls.ginf;
    if (mu.is_finite() && nu.is_finite() && mu.value == nu.value) {
      const auto r = verify_predictions(sb.branch, eigen_case_prediction(mu, l1), o.samples);
      rep.checks.insert(rep.checks.end(), r.checks.begin(), r.checks.end());
      rep.notes.insert(rep.notes.end(), r.notes.begin(), r.notes.end());
    } else {
      // Coercive in |s + t|: g(s,s) and h(s,s) keep growing.
      bool coercive = true;
      double pg = spec.eval_g(1e4, 1e4), ph = spec.eval_h(1e4, 1e4);
      for (int e = 5; e <= 8; ++e) {
        const double s = std::pow(10.0, e);
        const double g = spec.eval_g(s, s), h = spec.eval_h(s, s);
        coercive = coercive && g > pg && h > ph;
        pg = g;
        ph = h;
      }
      TheoremPrediction pred = predicted_interval(mu, nu, l1, coercive);
      if (pred.multiplicity != MultiplicityProfile::AtLeastOne) {
        const bool flags = spec.g_monotone_in_t.value_or(false) && spec.h_monotone_in_s.value_or(false);
        if (!flags) {
          pred.hypotheses_met = false;
          rep.notes.push_back("monotone flags g_in_t / h_in_s not declared; multiplicity hypotheses not met");
        }
      }
      const auto r = verify_predictions(sb.branch, pred, o.samples);
      rep.checks.insert(rep.checks.end(), r.checks.begin(), r.checks.end());
      rep.notes.insert(rep.notes.end(), r.notes.begin(), r.notes.end());
    }
  }
  const auto mon = system_apriori_monitor(sb, spec, l1);
  rep.checks.insert(rep.checks.end(), mon.checks.begin(), mon.checks.end());
  for (const auto& n : mon.notes)
    if (std::find(rep.notes.begin(), rep.notes.end(), n) == rep.notes.end()) rep.notes.push_back(n);

  if (!o.out_path.empty()) {
    Sink sink(o.out_path, out);
    write_system_branch_csv(*sink, sb);
  }
  if (!o.report_path.empty()) {
    Sink sink(o.report_path, out);
    *sink << to_json(rep).dump(2) << "\n";
  }
  print_report(out, rep);
  return rep.pass() ? kOk : kVerificationFailed;
}

int cmd_power_pair(const Options& o, std::ostream& out) {
  const auto res = power_pair_constant(o.N.value_or(1), o.k.value_or(1), o.alpha, o.beta, o.R.value_or(1.0),
                                       o.samples, config_from(o), o.mu_lo, o.mu_hi);
  Sink sink(o.out_path, out);
  *sink << "mu,lambda,d_v,product\n";
  char buf[160];
  for (const auto& s : res.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.mu, s.lambda, s.d_v, s.product);
    *sink << buf;
  }
  out << "constant " << g15(res.constant) << "\n";
  out << "max relative deviation " << g15(res.max_relative_dev) << "\n";
  return kOk;
}

int cmd_plot(const Options& o, std::ostream& out) {
  if (o.inputs.empty()) throw InvalidInput("plot needs at least one --in branch CSV");
  std::vector<Branch> branches;
  for (const auto& path : o.inputs) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    branches.push_back(read_branch_csv(in));
  }
  PlotOptions po;
  po.title = o.title;
  if (o.shade_lo || o.shade_hi) po.shade = Interval{o.shade_lo.value_or(0.0), o.shade_hi.value_or(INFINITY)};
  const std::string svg = render_branch_svg(branches, po);
  Sink sink(o.out_path, out);
  *sink << svg;
  return kOk;
}

int cmd_sweep_k(const Options& o, std::ostream& out) {
  ProblemSpec spec = load_problem(o);
  const ShootingConfig cfg = config_from(o);
  out << "# exploratory sweep over k; no assertions\n";
  out << "k,lambda1,folds,lambda_min,lambda_max,lambda_at_zero,lambda_at_infinity\n";
  for (int k = 1; k <= spec.dimension; ++k) {
    spec.order = k;
    const double l1 = first_eigenvalue(spec.dimension, k, spec.radius, cfg).lambda1;
    const Branch b = trace_branch(spec, o.d_min, o.d_max, o.points, cfg, trace_options(o));
    std::string folds;
    for (const auto& f : b.folds) folds += (folds.empty() ? "" : " ") + std::string(f.kind == FoldKind::Max ? "max@" : "min@") + g15(f.lambda);
    out << k << ',' << g15(l1) << ",\"" << folds << "\"," << g15(b.lambda_min()) << ',' << g15(b.lambda_max()) << ','
        << b.lambda_at_zero.to_string() << ',' << b.lambda_at_infinity.to_string() << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial k-Hessian bifurcation toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_solver = [&](CLI::App* sc) {
    sc->add_option("--grid-points", o.grid_points, "Output grid points per profile (>= 64)");
    sc->add_option("--rtol", o.rtol, "Integrator relative tolerance");
    sc->add_option("--root-tol", o.root_tol, "Relative bisection tolerance");
  };
  auto add_geometry = [&](CLI::App* sc) {
    sc->add_option("--N", o.N, "Dimension");
    sc->add_option("--k", o.k, "Hessian order");
    sc->add_option("--R", o.R, "Ball radius");
  };
  auto add_trace = [&](CLI::App* sc) {
    sc->add_option("--spec", o.spec_path, "JSON problem spec")->required();
    sc->add_option("--d-min", o.d_min, "Smallest amplitude");
    sc->add_option("--d-max", o.d_max, "Largest amplitude");
    sc->add_option("--points", o.points, "Log-spaced amplitudes (>= 16)");
    sc->add_option("--out", o.out_path, "Branch CSV output");
    sc->add_option("--threads", o.threads, "Worker threads (default: HB_THREADS or 1)");
    add_geometry(sc);
    add_solver(sc);
  };
  auto add_verify = [&](CLI::App* sc) {
    sc->add_option("--samples", o.samples, "Lambda samples per check window");
    sc->add_option("--report", o.report_path, "JSON report output");
    sc->add_option("--f0", o.f0_override, "Override the f0 class: zero | infinite | finite:<v>");
    sc->add_option("--finf", o.finf_override, "Override the finf class: zero | infinite | finite:<v>");
  };

  std::function<int()> action;
  auto* eigen = app.add_subcommand("eigen", "First eigenvalue lambda1 of the radial k-Hessian operator");
  add_geometry(eigen);
  add_solver(eigen);
  eigen->callback([&] { action = [&] { return cmd_eigen(o, out); }; });

  auto* trace = app.add_subcommand("trace", "Trace lambda(d) and write the branch CSV");
  add_trace(trace);
  trace->callback([&] { action = [&] { return cmd_trace(o, out); }; });

  auto* verify = app.add_subcommand("verify", "Trace and check the existence / multiplicity predictions");
  add_trace(verify);
  add_verify(verify);
  verify->callback([&] { action = [&] { return cmd_verify(o, out); }; });

  auto* strace = app.add_subcommand("system-trace", "Trace a coupled system over d_u");
  add_trace(strace);
  strace->callback([&] { action = [&] { return cmd_system_trace(o, out); }; });

  auto* sverify = app.add_subcommand("system-verify", "Trace and check a coupled system");
  add_trace(sverify);
  add_verify(sverify);
  sverify->callback([&] { action = [&] { return cmd_system_verify(o, out); }; });

  auto* pp = app.add_subcommand("power-pair", "Constant C of lambda mu^(alpha/k) = C for power pairs");
  add_geometry(pp);
  add_solver(pp);
  pp->add_option("--alpha", o.alpha, "Exponent of -v in the u equation")->required();
  pp->add_option("--beta", o.beta, "Exponent of -u in the v equation")->required();
  pp->add_option("--samples", o.samples, "Number of mu samples");
  pp->add_option("--mu-lo", o.mu_lo, "Smallest mu");
  pp->add_option("--mu-hi", o.mu_hi, "Largest mu");
  pp->add_option("--out", o.out_path, "Sample CSV output");
  pp->callback([&] { action = [&] { return cmd_power_pair(o, out); }; });

  auto* plot = app.add_subcommand("plot", "Render branch CSV files as an SVG diagram");
  plot->add_option("--in", o.inputs, "Branch CSV (repeatable)")->required();
  plot->add_option("--out", o.out_path, "SVG output");
  plot->add_option("--shade-lo", o.shade_lo, "Lower end of the shaded lambda band");
  plot->add_option("--shade-hi", o.shade_hi, "Upper end of the shaded lambda band");
  plot->add_option("--title", o.title, "Diagram title");
  plot->callback([&] { action = [&] { return cmd_plot(o, out); }; });

  auto* sweep = app.add_subcommand("sweep-k", "Exploratory trace for every k = 1..N (no assertions)");
  add_trace(sweep);
  sweep->callback([&] { action = [&] { return cmd_sweep_k(o, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hbif: " << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    return action ? action() : kInvalidInput;
  } catch (const InvalidInput& e) {
    err << "hbif: invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const NumericalFailure& e) {
    err << "hbif: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "hbif: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace hessbif::cli
