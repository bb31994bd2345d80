#include "hessbif/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hessbif/errors.hpp"
#include "hessbif/hessian.hpp"
#include "hessbif/radial_ode.hpp"

namespace hessbif {

void ShootingConfig::validate() const {
  if (grid_points < 64) throw InvalidInput("grid_points must be >= 64");
  if (!(integrator_rtol > 0) || !(root_tol > 0)) throw InvalidInput("tolerances must be positive");
  if (max_root_iterations < 1) throw InvalidInput("max_root_iterations must be >= 1");
  if (scan_cells < 1) throw InvalidInput("scan_cells must be >= 1");
}

namespace {

auto scalar_system(const ProblemSpec& spec, double lambda) {
  const int k = spec.order;
  const NonlinearitySpec* f = &spec.nonlinearity;
  auto forcing = [f, lambda, k](const Eigen::Matrix<double, 1, 1>& depth) {
    Eigen::Matrix<double, 1, 1> out;
    out(0) = ipow(lambda * eval_nonlinearity_unchecked(*f, depth(0)), k);
    return out;
  };
  return detail::RadialSystem<1, decltype(forcing)>(spec.dimension, k, forcing);
}

void check_inputs(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!(d > 0) || !std::isfinite(d)) throw InvalidInput("amplitude d must be positive");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be non-negative");
}

bool admissible_everywhere(const Eigen::VectorXd& radii, const Eigen::VectorXd& uprime, const Eigen::VectorXd& upp,
                           int N, int k) {
  for (Eigen::Index i = 1; i + 1 < radii.size(); ++i) {
    const auto eigs = radial_hessian_eigenvalues(upp(i), uprime(i) / radii(i), N);
    if (!gamma_k_membership(eigs, k)) return false;
  }
  return true;
}

double bisect(const std::function<double(double)>& residual, double a, double b, double ra,
              const ShootingConfig& cfg, int* iterations = nullptr) {
  int it = 0;
  while (b - a > cfg.root_tol * b && it < cfg.max_root_iterations) {
    const double mid = a > 0 ? std::sqrt(a * b) : 0.5 * (a + b);
    const double rm = residual(mid);
    ++it;
    if (rm == 0.0) {
      a = b = mid;
      break;
    }
    if ((rm < 0) == (ra < 0)) {
      a = mid;
      ra = rm;
    } else {
      b = mid;
    }
  }
  if (iterations) *iterations = it;
  return 0.5 * (a + b);
}

}  // namespace

RadialProfile integrate_profile(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg) {
  check_inputs(spec, lambda, d, cfg);
  const auto sys = scalar_system(spec, lambda);
  RadialProfile p;
  p.lambda = lambda;
  p.amplitude = d;
  p.radii = Eigen::VectorXd::LinSpaced(cfg.grid_points, 0.0, spec.radius);
  const auto states = detail::integrate_on_grid(sys, Eigen::Matrix<double, 1, 1>::Constant(d), p.radii,
                                                cfg.integrator_rtol);
  const Eigen::Index n = p.radii.size();
  p.u = states.col(0);
  p.uprime.resize(n);
  p.uprime2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = states(i, 1);
    const double f = sys.forcing(states.row(i).transpose())(0);
    p.uprime(i) = p.radii(i) * sys.slope_over_r(m);
    p.uprime2(i) = sys.second_derivative(m, f);
  }
  p.admissible = admissible_everywhere(p.radii, p.uprime, p.uprime2, spec.dimension, spec.order);
  p.max_consistency_residual = self_consistency_residual(p, spec).residual;
  return p;
}

double boundary_residual(const RadialProfile& profile) { return profile.u(profile.u.size() - 1); }

namespace {

double shoot_unchecked(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg) {
  if (lambda == 0.0) return -d;
  const auto sys = scalar_system(spec, lambda);
  const auto y = detail::integrate_to_boundary(sys, Eigen::Matrix<double, 1, 1>::Constant(d), spec.radius,
                                               cfg.integrator_rtol);
  return y(0);
}

}  // namespace

double shoot_boundary_value(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg) {
  check_inputs(spec, lambda, d, cfg);
  return shoot_unchecked(spec, lambda, d, cfg);
}

std::vector<double> solve_lambda(const ProblemSpec& spec, double d, std::pair<double, double> bracket,
                                 const ShootingConfig& cfg) {
  auto [lo, hi] = bracket;
  if (!(lo >= 0) || !(hi > lo) || !std::isfinite(hi)) throw InvalidInput("solve_lambda: need 0 <= lo < hi");
  check_inputs(spec, 0.0, d, cfg);
  auto residual = [&](double lambda) { return shoot_unchecked(spec, lambda, d, cfg); };

  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(cfg.scan_cells) + 1);
  if (lo > 0) {
    for (int i = 0; i <= cfg.scan_cells; ++i) nodes.push_back(lo * std::pow(hi / lo, double(i) / cfg.scan_cells));
  } else {
    nodes.push_back(0.0);
    const double start = hi * 1e-6;
    const int cells = std::max(1, cfg.scan_cells - 1);
    for (int i = 0; i <= cells; ++i) nodes.push_back(start * std::pow(hi / start, double(i) / cells));
  }
  nodes.back() = hi;

  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = residual(nodes[i]);

  std::vector<double> roots;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (values[i] == 0.0 && nodes[i] > 0) roots.push_back(nodes[i]);
    if (i + 1 < nodes.size() && values[i] != 0.0 && values[i + 1] != 0.0 && (values[i] < 0) != (values[i + 1] < 0))
      roots.push_back(bisect(residual, nodes[i], nodes[i + 1], values[i], cfg));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

bool expand_bracket(const ProblemSpec& spec, double d, double& lo, double& hi, const ShootingConfig& cfg) {
  if (!(lo > 0) || !(hi > lo)) throw InvalidInput("expand_bracket: need 0 < lo < hi");
  const double r2 = spec.radius * spec.radius;
  const double floor = 1e-14 / r2, ceiling = 1e14 / r2;
  check_inputs(spec, lo, d, cfg);
  double rlo = shoot_unchecked(spec, lo, d, cfg);
  double rhi = shoot_unchecked(spec, hi, d, cfg);
  while (true) {
    if (rlo <= 0 && rhi >= 0) return true;
    if (rhi < 0) {
      if (hi >= ceiling) return false;
      lo = hi;
      rlo = rhi;
      hi = std::min(hi * 4.0, ceiling);
      rhi = shoot_unchecked(spec, hi, d, cfg);
    } else {  // rlo > 0
      if (lo <= floor) return false;
      hi = lo;
      rhi = rlo;
      lo = std::max(lo / 4.0, floor);
      rlo = shoot_unchecked(spec, lo, d, cfg);
    }
  }
}

EigenvalueResult first_eigenvalue(int N, int k, double R, const ShootingConfig& cfg) {
  ProblemSpec spec{N, k, R, NonlinearitySpec::linear()};
  spec.validate();
  cfg.validate();
  double lo = 1.0 / (R * R), hi = 4.0 / (R * R);
  if (!expand_bracket(spec, 1.0, lo, hi, cfg)) throw NumericalFailure("first_eigenvalue: root not bracketed");
  auto residual = [&](double lambda) { return shoot_unchecked(spec, lambda, 1.0, cfg); };
  EigenvalueResult out;
  out.lambda1 = bisect(residual, lo, hi, residual(lo), cfg, &out.iterations);
  const RadialProfile p = integrate_profile(spec, out.lambda1, 1.0, cfg);
  out.residual = boundary_residual(p);
  for (Eigen::Index i = 0; i + 1 < p.u.size(); ++i)
    if (!(p.u(i) < 0)) throw NumericalFailure("first_eigenvalue: eigenfunction changes sign inside the ball");
  return out;
}

ConsistencyReport self_consistency_residual(const RadialProfile& profile, const ProblemSpec& spec) {
  const int N = spec.dimension, k = spec.order;
  const auto& r = profile.radii;
  const auto& up = profile.uprime;
  ConsistencyReport rep;
  double max_forcing = 0.0;
  for (Eigen::Index i = 1; i + 1 < r.size(); ++i) {
    const double h1 = r(i) - r(i - 1), h2 = r(i + 1) - r(i);
    const double upp = -h2 / (h1 * (h1 + h2)) * up(i - 1) + (h2 - h1) / (h1 * h2) * up(i) +
                       h1 / (h2 * (h1 + h2)) * up(i + 1);
    const double sk = sk_from_radial(upp, up(i) / r(i), N, k);
    const double depth = profile.u(i) < 0 ? -profile.u(i) : 0.0;
    const double forcing = ipow(profile.lambda * eval_nonlinearity_unchecked(spec.nonlinearity, depth), k);
    rep.residual = std::max(rep.residual, std::abs(sk - forcing));
    max_forcing = std::max(max_forcing, forcing);
  }
  rep.relative_residual = rep.residual / std::max(1.0, max_forcing);
  rep.admissible = admissible_everywhere(r, up, profile.uprime2, N, k);
  return rep;
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
  os << "r,u,uprime\n";
  char buf[128];
  for (Eigen::Index i = 0; i < profile.radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", profile.radii(i), profile.u(i), profile.uprime(i));
    os << buf;
  }
}

}  // namespace hessbif
