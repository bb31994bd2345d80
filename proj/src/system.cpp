#include "hessbif/system.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hessbif/detail/tracing.hpp"
#include "hessbif/errors.hpp"
#include "hessbif/hessian.hpp"
#include "hessbif/radial_ode.hpp"

namespace hessbif {

// ---------------------------------------------------------------- g and h

NonlinearitySpec2 NonlinearitySpec2::of_active(NonlinearitySpec phi) {
  NonlinearitySpec2 s;
  s.kind = Kind::OfActive;
  s.phi = std::move(phi);
  return s;
}

NonlinearitySpec2 NonlinearitySpec2::coupled_product(NonlinearitySpec phi, double c) {
  NonlinearitySpec2 s;
  s.kind = Kind::CoupledProduct;
  s.phi = std::move(phi);
  s.coupling = c;
  return s;
}

NonlinearitySpec2 NonlinearitySpec2::from_function(std::function<double(double, double)> f) {
  NonlinearitySpec2 s;
  s.kind = Kind::Custom;
  s.custom = std::move(f);
  return s;
}

double NonlinearitySpec2::operator()(double active, double passive) const {
  switch (kind) {
    case Kind::OfActive:
      return eval_nonlinearity_unchecked(phi, active);
    case Kind::CoupledProduct:
      return eval_nonlinearity_unchecked(phi, active) * (1.0 + coupling * passive);
    case Kind::Custom:
      return custom(active, passive);
  }
  return 0.0;
}

void NonlinearitySpec2::validate() const {
  switch (kind) {
    case Kind::OfActive:
      validate_nonlinearity(phi);
      return;
    case Kind::CoupledProduct:
      validate_nonlinearity(phi);
      if (!(coupling >= 0) || !std::isfinite(coupling)) throw InvalidInput("coupling must be a non-negative number");
      return;
    case Kind::Custom:
      break;
  }
  if (!custom) throw InvalidInput("custom two-argument nonlinearity is empty");
  for (int i = -8; i <= 8; ++i) {
    const double p = std::pow(10.0, i);
    if ((*this)(0.0, p) != 0.0) throw InvalidInput("two-argument nonlinearity must vanish when its active argument is 0");
    for (int j = -8; j <= 8; j += 2) {
      const double v = (*this)(std::pow(10.0, j), p);
      if (!(v > 0) || !std::isfinite(v))
        throw InvalidInput("two-argument nonlinearity must be positive when its active argument is positive");
    }
  }
}

void SystemSpec::validate() const {
  check_order(dimension, order);
  if (!(radius > 0) || !std::isfinite(radius)) throw InvalidInput("radius R must be positive");
  g.validate();
  h.validate();
}

SystemSpec symmetric_system(int N, int k, double R, const NonlinearitySpec& phi) {
  SystemSpec s;
  s.dimension = N;
  s.order = k;
  s.radius = R;
  s.g = NonlinearitySpec2::of_active(phi);
  s.h = NonlinearitySpec2::of_active(phi);
  return s;
}

// ---------------------------------------------------------------- JSON

namespace {

NonlinearitySpec2 spec2_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + " must be an object");
  const std::string kind = j.value("kind", std::string("of_active"));
  if (!j.contains("phi")) throw InvalidInput(std::string(what) + ": \"phi\" required");
  const NonlinearitySpec phi = nonlinearity_from_json(j.at("phi"));
  if (kind == "of_active") return NonlinearitySpec2::of_active(phi);
  if (kind == "coupled_product") {
    if (!j.contains("coupling") || !j.at("coupling").is_number())
      throw InvalidInput(std::string(what) + ": \"coupling\" must be a number");
    return NonlinearitySpec2::coupled_product(phi, j.at("coupling").get<double>());
  }
  throw InvalidInput(std::string(what) + ": unknown kind '" + kind + "'");
}

nlohmann::json to_json(const NonlinearitySpec2& s) {
  switch (s.kind) {
    case NonlinearitySpec2::Kind::OfActive:
      return {{"kind", "of_active"}, {"phi", to_json(s.phi)}};
    case NonlinearitySpec2::Kind::CoupledProduct:
      return {{"kind", "coupled_product"}, {"phi", to_json(s.phi)}, {"coupling", s.coupling}};
    case NonlinearitySpec2::Kind::Custom:
      break;
  }
  throw InvalidInput("custom two-argument nonlinearities cannot be serialised");
}

}  // namespace

SystemSpec system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("system spec must be a JSON object");
  // The scalar fields share the scalar schema.
  nlohmann::json scalar = {{"kind", "linear"}};
  for (const char* key : {"N", "k", "R"})
    if (j.contains(key)) scalar[key] = j.at(key);
  const ProblemSpec base = problem_from_json(scalar);
  SystemSpec s;
  s.dimension = base.dimension;
  s.order = base.order;
  s.radius = base.radius;
  if (j.contains("symmetric")) {
    const NonlinearitySpec phi = nonlinearity_from_json(j.at("symmetric"));
    s.g = NonlinearitySpec2::of_active(phi);
    s.h = NonlinearitySpec2::of_active(phi);
  } else {
    if (!j.contains("g") || !j.contains("h")) throw InvalidInput("system spec needs \"g\" and \"h\" (or \"symmetric\")");
    s.g = spec2_from_json(j.at("g"), "g");
    s.h = spec2_from_json(j.at("h"), "h");
  }
  if (j.contains("monotone")) {
    const auto& m = j.at("monotone");
    if (!m.is_object()) throw InvalidInput("\"monotone\" must be an object");
    for (const auto& [key, val] : m.items()) {
      if (!val.is_boolean()) throw InvalidInput("monotone flags must be booleans");
      if (key == "g_in_t")
        s.g_monotone_in_t = val.get<bool>();
      else if (key == "h_in_s")
        s.h_monotone_in_s = val.get<bool>();
      else
        throw InvalidInput("unknown monotone flag '" + key + "'");
    }
  }
  auto cls = [&](const char* key, std::optional<LimitClass>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = limit_class_from_json(j.at(key));
  };
  cls("g0", s.declared_g0);
  cls("h0", s.declared_h0);
  cls("ginf", s.declared_ginf);
  cls("hinf", s.declared_hinf);
  s.validate();
  return s;
}

nlohmann::json to_json(const SystemSpec& s) {
  nlohmann::json j = {{"N", s.dimension}, {"k", s.order}, {"R", s.radius}, {"g", to_json(s.g)}, {"h", to_json(s.h)}};
  if (s.g_monotone_in_t) j["monotone"]["g_in_t"] = *s.g_monotone_in_t;
  if (s.h_monotone_in_s) j["monotone"]["h_in_s"] = *s.h_monotone_in_s;
  if (s.declared_g0) j["g0"] = to_json(*s.declared_g0);
  if (s.declared_h0) j["h0"] = to_json(*s.declared_h0);
  if (s.declared_ginf) j["ginf"] = to_json(*s.declared_ginf);
  if (s.declared_hinf) j["hinf"] = to_json(*s.declared_hinf);
  return j;
}

SystemClasses classify_system(const SystemSpec& spec) {
  spec.validate();
  const auto gc = classify_ratio([&](double s) { return spec.eval_g(s, s) / s; });
  const auto hc = classify_ratio([&](double s) { return spec.eval_h(s, s) / s; });
  SystemClasses out;
  out.g0 = gc.f0;
  out.h0 = hc.f0;
  out.ginf = gc.finf;
  out.hinf = hc.finf;
  out.matched = out.g0.matches(out.h0) && out.ginf.matches(out.hinf);
  std::ostringstream detail;
  auto check = [&](const std::optional<LimitClass>& declared, const LimitClass& est, const char* name) {
    if (declared && !declared->matches(est)) {
      out.conflict = true;
      detail << "declared " << name << ' ' << declared->to_string() << " vs estimated " << est.to_string() << "; ";
    }
  };
  check(spec.declared_g0, out.g0, "g0");
  check(spec.declared_h0, out.h0, "h0");
  check(spec.declared_ginf, out.ginf, "ginf");
  check(spec.declared_hinf, out.hinf, "hinf");
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------- shooting

namespace {

using Vec2 = Eigen::Vector2d;
using Shoot = std::function<Vec2(double lambda, double d_v)>;  // (u(R), v(R)) at fixed d_u

template <typename Forcing>
Vec2 boundary_pair(int N, int k, double R, double d_u, double d_v, double rtol, Forcing forcing) {
  const detail::RadialSystem<2, Forcing> sys(N, k, std::move(forcing));
  const auto y = detail::integrate_to_boundary(sys, Vec2(d_u, d_v), R, rtol);
  return {y(0), y(2)};
}

auto system_forcing(const SystemSpec& spec, double lambda) {
  const SystemSpec* sp = &spec;
  const int k = spec.order;
  return [sp, lambda, k](const Vec2& depth) {
    return Vec2(ipow(lambda * sp->eval_g(depth(0), depth(1)), k), ipow(lambda * sp->eval_h(depth(0), depth(1)), k));
  };
}

Shoot system_shooter(const SystemSpec& spec, double d_u, const ShootingConfig& cfg) {
  return [&spec, d_u, &cfg](double lambda, double d_v) {
    return boundary_pair(spec.dimension, spec.order, spec.radius, d_u, d_v, cfg.integrator_rtol,
                         system_forcing(spec, lambda));
  };
}

struct NewtonResult {
  double lambda, d_v;
  Vec2 residual;
  int iterations;
};

Vec2 normalised(const Shoot& shoot, double d_u, double x0, double x1) {
  const double d_v = std::exp(x1);
  const Vec2 r = shoot(std::exp(x0), d_v);
  return {r(0) / d_u, r(1) / d_v};
}

NewtonResult newton(const Shoot& shoot, double d_u, std::pair<double, double> init, const NewtonOptions& opts) {
  if (!(init.first > 0) || !(init.second > 0)) throw InvalidInput("Newton start needs positive lambda and d_v");
  auto F = [&](const Vec2& x) -> std::optional<Vec2> {
    try {
      Vec2 r = normalised(shoot, d_u, x(0), x(1));
      if (!r.allFinite()) return std::nullopt;
      return r;
    } catch (const NumericalFailure&) {
      return std::nullopt;
    }
  };
  Vec2 x(std::log(init.first), std::log(init.second));
  auto r0 = F(x);
  if (!r0) throw NumericalFailure("Newton: start point cannot be integrated");
  Vec2 r = *r0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double norm = r.lpNorm<Eigen::Infinity>();
    if (norm <= opts.tol) return {std::exp(x(0)), std::exp(x(1)), r, it};
    Eigen::Matrix2d J;
    for (int c = 0; c < 2; ++c) {
      Vec2 xp = x;
      xp(c) += opts.fd_step;
      auto rp = F(xp);
      if (!rp) throw NumericalFailure("Newton: Jacobian evaluation failed");
      J.col(c) = (*rp - r) / opts.fd_step;
    }
    if (!(std::abs(J.determinant()) > 1e-300)) throw NumericalFailure("Newton: singular Jacobian");
    Vec2 step = -J.partialPivLu().solve(r);
    const double cap = step.lpNorm<Eigen::Infinity>();
    if (cap > 2.0) step *= 2.0 / cap;  // at most a factor e^2 per iteration
    bool accepted = false;
    double alpha = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, alpha *= 0.5) {
      auto rt = F(x + alpha * step);
      if (rt && rt->lpNorm<Eigen::Infinity>() < norm) {
        x += alpha * step;
        r = *rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Residual at the integration noise floor: accept.
      if (norm <= 1e3 * opts.tol) return {std::exp(x(0)), std::exp(x(1)), r, it};
      throw NumericalFailure("Newton: no decrease after step halving (residual " + std::to_string(norm) + ")");
    }
  }
  if (r.lpNorm<Eigen::Infinity>() <= 1e3 * opts.tol) return {std::exp(x(0)), std::exp(x(1)), r, opts.max_iterations};
  throw NumericalFailure("Newton: no convergence within the iteration limit");
}

// lambda with u(R) = 0 at fixed (d_u, d_v); u(R) increases with lambda.
std::optional<double> lambda_for_u(const Shoot& shoot, double R, double d_v, double rel_tol) {
  const double floor = 1e-14 / (R * R), ceiling = 1e14 / (R * R);
  double lo = 1.0 / (R * R), hi = 4.0 / (R * R);
  double rlo = shoot(lo, d_v)(0), rhi = shoot(hi, d_v)(0);
  while (!(rlo <= 0 && rhi >= 0)) {
    if (rhi < 0) {
      if (hi >= ceiling) return std::nullopt;
      lo = hi;
      rlo = rhi;
      hi = std::min(4 * hi, ceiling);
      rhi = shoot(hi, d_v)(0);
    } else {
      if (lo <= floor) return std::nullopt;
      hi = lo;
      rhi = rlo;
      lo = std::max(lo / 4, floor);
      rlo = shoot(lo, d_v)(0);
    }
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (shoot(mid, d_v)(0) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

// Nested reduction: lambda_u(d_v) zeroes u(R); then a sign change of
// v(R)/d_v over a log grid of d_v / d_u, closest to the ratio 1, refined by
// a few bisection steps.
std::pair<double, double> initial_guess(const Shoot& shoot, double d_u, double R) {
  struct Sample {
    double ratio, lambda, rv;
  };
  auto sample = [&](double ratio) -> std::optional<Sample> {
    try {
      const auto lam = lambda_for_u(shoot, R, ratio * d_u, 1e-7);
      if (!lam) return std::nullopt;
      return Sample{ratio, *lam, shoot(*lam, ratio * d_u)(1) / (ratio * d_u)};
    } catch (const NumericalFailure&) {
      return std::nullopt;
    }
  };
  std::vector<Sample> s;
  for (int e = -12; e <= 12; ++e)
    if (auto v = sample(std::pow(10.0, e / 4.0))) s.push_back(*v);
  std::optional<std::pair<Sample, Sample>> best;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if ((s[i].rv < 0) == (s[i + 1].rv < 0)) continue;
    const double dist = std::abs(std::log(std::sqrt(s[i].ratio * s[i + 1].ratio)));
    if (!best || dist < std::abs(std::log(std::sqrt(best->first.ratio * best->second.ratio)))) best = {s[i], s[i + 1]};
  }
  if (!best) throw NumericalFailure("system initial guess: no sign change of v(R) over d_v / d_u in [1e-3, 1e3]");
  auto [a, b] = *best;
  for (int it = 0; it < 12; ++it) {
    auto m = sample(std::sqrt(a.ratio * b.ratio));
    if (!m) break;
    if ((m->rv < 0) == (a.rv < 0))
      a = *m;
    else
      b = *m;
  }
  const Sample& pick = std::abs(a.rv) < std::abs(b.rv) ? a : b;
  return {pick.lambda, pick.ratio * d_u};
}

bool admissible_profile(const RadialProfile& p, int N, int k) {
  for (Eigen::Index i = 1; i + 1 < p.radii.size(); ++i)
    if (!gamma_k_membership(radial_hessian_eigenvalues(p.uprime2(i), p.uprime(i) / p.radii(i), N), k)) return false;
  return true;
}

}  // namespace

SystemProfiles integrate_system(const SystemSpec& spec, double lambda, double d_u, double d_v,
                                const ShootingConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!(d_u > 0) || !(d_v > 0) || !std::isfinite(d_u) || !std::isfinite(d_v))
    throw InvalidInput("integrate_system: amplitudes must be positive");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidInput("integrate_system: lambda must be non-negative");
  const int N = spec.dimension, k = spec.order;
  const auto forcing = system_forcing(spec, lambda);
  const detail::RadialSystem<2, decltype(forcing)> sys(N, k, forcing);
  const Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(cfg.grid_points, 0.0, spec.radius);
  const auto states = detail::integrate_on_grid(sys, Vec2(d_u, d_v), radii, cfg.integrator_rtol);
  const Eigen::Index n = radii.size();

  SystemProfiles out;
  RadialProfile* comp[2] = {&out.u, &out.v};
  for (int c = 0; c < 2; ++c) {
    RadialProfile& p = *comp[c];
    p.radii = radii;
    p.lambda = lambda;
    p.amplitude = c == 0 ? d_u : d_v;
    p.u = states.col(2 * c);
    p.uprime.resize(n);
    p.uprime2.resize(n);
  }
  Eigen::MatrixXd forcing_values(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 f = sys.forcing(states.row(i).transpose());
    forcing_values.row(i) = f.transpose();
    for (int c = 0; c < 2; ++c) {
      const double m = states(i, 2 * c + 1);
      comp[c]->uprime(i) = radii(i) * sys.slope_over_r(m);
      comp[c]->uprime2(i) = sys.second_derivative(m, f(c));
    }
  }
  for (int c = 0; c < 2; ++c) {
    RadialProfile& p = *comp[c];
    // Differential-form residual with u'' from finite differences of u'.
    double res = 0.0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double h1 = radii(i) - radii(i - 1), h2 = radii(i + 1) - radii(i);
      const double upp = -h2 / (h1 * (h1 + h2)) * p.uprime(i - 1) + (h2 - h1) / (h1 * h2) * p.uprime(i) +
                         h1 / (h2 * (h1 + h2)) * p.uprime(i + 1);
      res = std::max(res, std::abs(sk_from_radial(upp, p.uprime(i) / radii(i), N, k) - forcing_values(i, c)));
    }
    p.max_consistency_residual = res;
    p.admissible = lambda > 0 && admissible_profile(p, N, k);
  }
  return out;
}

std::pair<double, double> system_boundary_values(const SystemSpec& spec, double lambda, double d_u, double d_v,
                                                 const ShootingConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!(d_u > 0) || !(d_v > 0)) throw InvalidInput("system_boundary_values: amplitudes must be positive");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidInput("system_boundary_values: lambda must be non-negative");
  if (lambda == 0.0) return {-d_u, -d_v};
  const Vec2 r = system_shooter(spec, d_u, cfg)(lambda, d_v);
  return {r(0), r(1)};
}

std::pair<double, double> system_initial_guess(const SystemSpec& spec, double d_u, const ShootingConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!(d_u > 0) || !std::isfinite(d_u)) throw InvalidInput("d_u must be positive");
  return initial_guess(system_shooter(spec, d_u, cfg), d_u, spec.radius);
}

SystemBranchPoint solve_system_shooting(const SystemSpec& spec, double d_u, std::pair<double, double> init,
                                        const ShootingConfig& cfg, const NewtonOptions& opts) {
  spec.validate();
  cfg.validate();
  if (!(d_u > 0) || !std::isfinite(d_u)) throw InvalidInput("solve_system_shooting: d_u must be positive");
  const auto nr = newton(system_shooter(spec, d_u, cfg), d_u, init, opts);
  SystemBranchPoint p;
  p.d_u = d_u;
  p.d_v = nr.d_v;
  p.lambda = nr.lambda;
  p.res_u = nr.residual(0) * d_u;
  p.res_v = nr.residual(1) * nr.d_v;
  p.iterations = nr.iterations;
  const auto prof = integrate_system(spec, p.lambda, d_u, p.d_v, cfg);
  p.admissible = prof.u.admissible && prof.v.admissible;
  return p;
}

SystemEigenResult system_eigenvalue(int N, int k, double R, const ShootingConfig& cfg) {
  SystemEigenResult out;
  out.lambda0 = first_eigenvalue(N, k, R, cfg).lambda1;
  const SystemSpec spec = symmetric_system(N, k, R, NonlinearitySpec::linear());
  const auto p = solve_system_shooting(spec, 1.0, {out.lambda0 * 1.05, 0.9}, cfg);
  out.lambda_asymmetric = p.lambda;
  out.d_v = p.d_v;
  out.relative_gap = std::abs(p.lambda - out.lambda0) / out.lambda0;
  out.consistent = out.relative_gap <= 1e-6;
  return out;
}

PowerPairResult power_pair_constant(int N, int k, double alpha, double beta, double R, int n_samples,
                                    const ShootingConfig& cfg, std::optional<double> mu_lo,
                                    std::optional<double> mu_hi) {
  check_order(N, k);
  cfg.validate();
  if (!(R > 0) || !std::isfinite(R)) throw InvalidInput("radius R must be positive");
  if (!(alpha > 0) || !(beta > 0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw InvalidInput("power pair: alpha and beta must be positive");
  if (std::abs(alpha * beta - k * k) > 1e-12 * k * k) throw InvalidInput("power pair: alpha beta must equal k^2");
  if (n_samples < 2) throw InvalidInput("power pair: need at least 2 samples");
  const double lk = ipow(first_eigenvalue(N, k, R, cfg).lambda1, k);
  const double lo = mu_lo.value_or(lk * 0.1), hi = mu_hi.value_or(lk * 10.0);
  if (!(lo > 0) || !(hi > lo)) throw InvalidInput("power pair: need 0 < mu_lo < mu_hi");

  PowerPairResult out;
  out.alpha = alpha;
  out.beta = beta;
  constexpr double d_u = 1.0;
  std::optional<PowerPairSample> prev;
  for (int i = 0; i < n_samples; ++i) {
    const double mu = lo * std::pow(hi / lo, double(i) / (n_samples - 1));
    // S_k(D^2 u) = lambda t^alpha, S_k(D^2 v) = mu s^beta.
    Shoot shoot = [&, mu](double lambda, double d_v) {
      auto forcing = [lambda, mu, alpha, beta](const Vec2& depth) {
        return Vec2(lambda * std::pow(depth(1), alpha), mu * std::pow(depth(0), beta));
      };
      return boundary_pair(N, k, R, d_u, d_v, cfg.integrator_rtol, forcing);
    };
    std::pair<double, double> init;
    if (prev) {
      // Plain continuation from the previous sample; the scaling law is the
      // quantity under test, so it is not used to seed.
      init = {prev->lambda, prev->d_v};
    } else {
      init = initial_guess(shoot, d_u, R);
    }
    const auto nr = newton(shoot, d_u, init, NewtonOptions{});
    PowerPairSample s{mu, nr.lambda, nr.d_v, nr.lambda * std::pow(mu, alpha / k)};
    out.samples.push_back(s);
    prev = s;
  }
  double log_sum = 0.0;
  for (const auto& s : out.samples) log_sum += std::log(s.product);
  out.constant = std::exp(log_sum / out.samples.size());
  for (const auto& s : out.samples)
    out.max_relative_dev = std::max(out.max_relative_dev, std::abs(s.product / out.constant - 1.0));
  return out;
}

// ---------------------------------------------------------------- tracing

namespace {

struct SystemNode {
  double t = 0.0;  // d_u
  BranchPoint point;
  SystemBranchPoint sys;
};

}  // namespace

SystemBranch trace_system_branch(const SystemSpec& spec, const std::vector<double>& d_u_grid,
                                 const ShootingConfig& cfg, const TraceOptions& opts) {
  spec.validate();
  cfg.validate();
  if (d_u_grid.size() < 16) throw InvalidInput("trace_system_branch: need at least 16 grid points");
  for (std::size_t i = 0; i < d_u_grid.size(); ++i) {
    if (!(d_u_grid[i] > 0) || !std::isfinite(d_u_grid[i])) throw InvalidInput("d_u grid must be positive");
    if (i > 0 && !(d_u_grid[i] > d_u_grid[i - 1])) throw InvalidInput("d_u grid must be strictly increasing");
  }

  auto solve = [&](double d_u, const SystemNode* seed) -> std::optional<SystemNode> {
    std::optional<SystemBranchPoint> p;
    if (seed) {
      try {
        p = solve_system_shooting(spec, d_u, {seed->sys.lambda, seed->sys.d_v * d_u / seed->t}, cfg);
      } catch (const NumericalFailure&) {
      }
    }
    if (!p) p = solve_system_shooting(spec, d_u, system_initial_guess(spec, d_u, cfg), cfg);
    SystemNode n;
    n.t = d_u;
    n.sys = *p;
    n.point = {p->d_u + p->d_v, p->lambda, std::max(std::abs(p->res_u), std::abs(p->res_v)), p->admissible};
    return n;
  };

  auto traced = detail::trace_nodes<SystemNode>(solve, d_u_grid, opts);
  if (opts.refine_folds) detail::polish_folds(traced.nodes, solve, 1e-6);

  SystemBranch out;
  for (const auto& n : traced.nodes) {
    out.branch.points.push_back(n.point);
    out.points.push_back(n.sys);
  }
  out.branch.gaps = std::move(traced.gaps);
  finalize_branch(out.branch);
  return out;
}

bool check_monotonicity(const SystemSpec& spec, double S, int n, double tol) {
  if (!(S > 0) || n < 2) throw InvalidInput("check_monotonicity: need S > 0 and n >= 2");
  for (int i = 0; i < n; ++i) {
    const double a = S * i / (n - 1);
    for (int j = 0; j + 1 < n; ++j) {
      const double b0 = S * j / (n - 1), b1 = S * (j + 1) / (n - 1);
      const double g0 = spec.eval_g(a, b0), g1 = spec.eval_g(a, b1);
      if (g1 - g0 < -tol * std::max(1.0, std::abs(g0))) return false;
      const double h0 = spec.eval_h(b0, a), h1 = spec.eval_h(b1, a);
      if (h1 - h0 < -tol * std::max(1.0, std::abs(h0))) return false;
    }
  }
  return true;
}

VerificationReport system_apriori_monitor(const SystemBranch& sb, const SystemSpec& spec, double lambda1) {
  VerificationReport rep;
  const Branch& b = sb.branch;
  if (b.points.size() < 3) throw InvalidInput("system_apriori_monitor: branch has fewer than 3 points");
  const auto classes = classify_system(spec);
  char buf[256];

  if (classes.ginf.is_infinite() && classes.hinf.is_infinite()) {
    double lc = 0.0;
    for (const auto& f : b.folds)
      if (f.kind == FoldKind::Max) lc = lc > 0 ? std::min(lc, f.lambda) : f.lambda;
    lc = lc > 0 ? 0.5 * lc : std::sqrt(b.lambda_min() * b.lambda_max());
    const auto c = count_solutions(b, lc);
    double dmax = 0.0;
    for (double d : c.crossings_d) dmax = std::max(dmax, d);
    const double tail = b.points.back().lambda;
    std::snprintf(buf, sizeof buf, "sup d_u+d_v = %.6g at lambda = %.6g, tail lambda = %.6g", dmax, lc, tail);
    rep.add("superlinear a-priori bound", "bounded inside the traced range", buf,
            c.count >= 1 && dmax < b.points.back().d && tail < lc, 0.0);
  } else {
    rep.notes.push_back("nu is not infinite: superlinear bound not applicable");
  }

  // sup of the ratios g(s,t)/t and h(s,t)/s over a log grid.
  double G = 0.0;
  for (int i = -16; i <= 16; ++i)
    for (int j = -16; j <= 16; ++j) {
      const double s = std::pow(10.0, i / 2.0), t = std::pow(10.0, j / 2.0);
      G = std::max({G, spec.eval_g(s, t) / t, spec.eval_h(s, t) / s});
    }
  const double lambda_h = lambda1 / G;  // below this the sublinear hypothesis holds
  std::vector<const BranchPoint*> inside;
  for (const auto& p : b.points)
    if (p.lambda < lambda_h * (1 - 1e-6)) inside.push_back(&p);
  if (inside.empty()) {
    std::snprintf(buf, sizeof buf, "hypothesis lambda max(g/t, h/s) < lambda1 holds for lambda < %.6g; "
                                   "no branch point there (vacuous)", lambda_h);
    rep.notes.push_back(buf);
  } else {
    double dmax = 0.0;
    for (const auto* p : inside) dmax = std::max(dmax, p->d);
    std::snprintf(buf, sizeof buf, "%zu points, sup d_u+d_v = %.6g", inside.size(), dmax);
    rep.add("uniform bound where lambda < " + std::to_string(lambda_h), "sup d < traced maximum", buf,
            dmax < b.points.back().d, 0.0);
  }
  rep.notes.push_back("checks cover radial solutions on the traced branch only");
  return rep;
}

void write_system_branch_csv(std::ostream& os, const SystemBranch& sb) {
  std::vector<bool> is_fold(sb.points.size(), false);
  for (const auto& f : sb.branch.folds) is_fold[f.index] = true;
  os << "index,d_u,d_v,lambda,res_u,res_v,is_fold\n";
  char buf[192];
  for (std::size_t i = 0; i < sb.points.size(); ++i) {
    const auto& p = sb.points[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", i, p.d_u, p.d_v, p.lambda, p.res_u,
                  p.res_v, is_fold[i] ? 1 : 0);
    os << buf;
  }
}

}  // namespace hessbif
