#pragma once

// Coupled radial systems
//
//   (S_k(D^2 u))^(1/k) = lambda g(-u, -v),  (S_k(D^2 v))^(1/k) = lambda h(-u, -v)
//
// solved by two-parameter shooting in (lambda, d_v) at fixed d_u.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hessbif/branch.hpp"
#include "hessbif/nonlinearity.hpp"
#include "hessbif/shooting.hpp"

namespace hessbif {

/// Two-argument right-hand side evaluated as (active, passive). For g the
/// active argument is t = -v, for h it is s = -u; the function must vanish
/// exactly when the active argument does.
struct NonlinearitySpec2 {
  enum class Kind {
    OfActive,        // phi(active)
    CoupledProduct,  // phi(active) (1 + c passive)
    Custom,          // programmatic only
  };

  Kind kind = Kind::OfActive;
  NonlinearitySpec phi;
  double coupling = 0.0;
  std::function<double(double, double)> custom;

  static NonlinearitySpec2 of_active(NonlinearitySpec phi);
  static NonlinearitySpec2 coupled_product(NonlinearitySpec phi, double c);
  static NonlinearitySpec2 from_function(std::function<double(double, double)> f);

  double operator()(double active, double passive) const;
  void validate() const;
};

struct SystemSpec {
  int dimension = 1;
  int order = 1;
  double radius = 1.0;
  NonlinearitySpec2 g;  // u-equation, active in t = -v
  NonlinearitySpec2 h;  // v-equation, active in s = -u
  std::optional<bool> g_monotone_in_t;
  std::optional<bool> h_monotone_in_s;
  std::optional<LimitClass> declared_g0, declared_h0, declared_ginf, declared_hinf;

  double eval_g(double s, double t) const { return g(t, s); }
  double eval_h(double s, double t) const { return h(s, t); }
  void validate() const;
};

/// Symmetric system g(s,t) = phi(t), h(s,t) = phi(s).
SystemSpec symmetric_system(int N, int k, double R, const NonlinearitySpec& phi);

SystemSpec system_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemSpec& spec);

struct SystemClasses {
  LimitClass g0, h0, ginf, hinf;
  bool matched = false;  // g0 == h0 and ginf == hinf
  bool conflict = false; // a declared class disagrees with the numeric one
  std::string detail;
};

/// Ratios g(s,s)/s and h(s,s)/s along the diagonal.
SystemClasses classify_system(const SystemSpec& spec);

struct SystemProfiles {
  RadialProfile u;
  RadialProfile v;
};

SystemProfiles integrate_system(const SystemSpec& spec, double lambda, double d_u, double d_v,
                                const ShootingConfig& cfg);

/// (u(R), v(R)).
std::pair<double, double> system_boundary_values(const SystemSpec& spec, double lambda, double d_u, double d_v,
                                                 const ShootingConfig& cfg);

struct SystemBranchPoint {
  double d_u = 0.0;
  double d_v = 0.0;
  double lambda = 0.0;
  double res_u = 0.0;
  double res_v = 0.0;
  bool admissible = false;
  int iterations = 0;
};

struct NewtonOptions {
  int max_iterations = 60;
  int max_halvings = 8;
  double fd_step = 1e-6;  // in log coordinates
  double tol = 1e-10;     // on residuals normalised by the amplitudes
};

/// Damped Newton on (u(R)/d_u, v(R)/d_v) over (log lambda, log d_v).
/// Throws NumericalFailure when it does not converge.
SystemBranchPoint solve_system_shooting(const SystemSpec& spec, double d_u, std::pair<double, double> init,
                                        const ShootingConfig& cfg, const NewtonOptions& opts = {});

/// Best (lambda, d_v) on a coarse log grid; a starting point for Newton.
std::pair<double, double> system_initial_guess(const SystemSpec& spec, double d_u, const ShootingConfig& cfg);

struct SystemEigenResult {
  double lambda0 = 0.0;            // symmetric reduction
  double lambda_asymmetric = 0.0;  // full two-residual solve from a perturbed start
  double d_v = 0.0;                // of the asymmetric solve with d_u = 1
  double relative_gap = 0.0;
  bool consistent = false;  // relative_gap <= 1e-6
};

SystemEigenResult system_eigenvalue(int N, int k, double R, const ShootingConfig& cfg = {});

struct PowerPairSample {
  double mu = 0.0;
  double lambda = 0.0;
  double d_v = 0.0;  // with d_u = 1
  double product = 0.0;  // lambda mu^(alpha/k)
};

struct PowerPairResult {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<PowerPairSample> samples;
  double constant = 0.0;         // geometric mean of the products
  double max_relative_dev = 0.0;
};

/// S_k(D^2 u) = lambda (-v)^alpha, S_k(D^2 v) = mu (-u)^beta with alpha beta = k^2.
/// mu runs over [mu_lo, mu_hi] (default lambda1^k [1e-1, 1e1]) on a log grid.
PowerPairResult power_pair_constant(int N, int k, double alpha, double beta, double R, int n_samples,
                                    const ShootingConfig& cfg = {}, std::optional<double> mu_lo = std::nullopt,
                                    std::optional<double> mu_hi = std::nullopt);

struct SystemBranch {
  Branch branch;  // d = d_u + d_v
  std::vector<SystemBranchPoint> points;
};

SystemBranch trace_system_branch(const SystemSpec& spec, const std::vector<double>& d_u_grid,
                                 const ShootingConfig& cfg, const TraceOptions& opts = {});

/// Finite differences of g in t and h in s on an n x n grid over [0, S]^2
/// are >= -tol (relative to the local value).
bool check_monotonicity(const SystemSpec& spec, double S, int n, double tol = 1e-12);

/// A-priori bounds: superlinear compact bound when nu is infinite, uniform
/// bound where lambda max(g/t, h/s) < lambda1 holds on the sampled grid.
VerificationReport system_apriori_monitor(const SystemBranch& branch, const SystemSpec& spec, double lambda1);

/// "index,d_u,d_v,lambda,res_u,res_v,is_fold".
void write_system_branch_csv(std::ostream& os, const SystemBranch& branch);

}  // namespace hessbif
