#pragma once

// Shooting for the radial Dirichlet problem: integrate outward from the
// centre at amplitude d = -u(0) and root-find lambda on u(R) = 0.

#include <Eigen/Core>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hessbif/problem.hpp"

namespace hessbif {

struct ShootingConfig {
  int grid_points = 1024;          // output grid of integrate_profile
  double integrator_rtol = 1e-10;  // embedded RK relative tolerance
  double root_tol = 1e-10;         // relative bracket width at which bisection stops
  int max_root_iterations = 200;
  int scan_cells = 64;             // log-spaced cells of the sign-change scan

  void validate() const;
};

struct RadialProfile {
  Eigen::VectorXd radii;    // uniform on [0, R]
  Eigen::VectorXd u;        // <= 0 for Dirichlet solutions
  Eigen::VectorXd uprime;   // >= 0
  Eigen::VectorXd uprime2;  // u'' recovered from the integrated state
  double lambda = 0.0;
  double amplitude = 0.0;   // d = -u(0)
  double max_consistency_residual = 0.0;
  bool admissible = false;  // Gamma_k membership at every interior grid point
};

RadialProfile integrate_profile(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg);

/// u(R) of the profile.
double boundary_residual(const RadialProfile& profile);

/// u(R) without materialising the output grid.
double shoot_boundary_value(const ProblemSpec& spec, double lambda, double d, const ShootingConfig& cfg);

/// All roots of lambda -> u(R; lambda, d) in [lo, hi], ascending. A lower end
/// of 0 is allowed (u(R) = -d there).
std::vector<double> solve_lambda(const ProblemSpec& spec, double d, std::pair<double, double> bracket,
                                 const ShootingConfig& cfg);

/// Grows [lo, hi] geometrically until u(R) changes sign across it. Returns
/// false when no sign change appears within lambda in [1e-14, 1e14] / R^2.
bool expand_bracket(const ProblemSpec& spec, double d, double& lo, double& hi, const ShootingConfig& cfg);

struct EigenvalueResult {
  double lambda1 = 0.0;
  double residual = 0.0;  // v(R) of the eigenfunction with v(0) = -1
  int iterations = 0;
};

/// First eigenvalue of S_k(D^2 v) = lambda^k |v|^k on B_R.
EigenvalueResult first_eigenvalue(int N, int k, double R, const ShootingConfig& cfg = {});

struct ConsistencyReport {
  double residual = 0.0;           // sup |S_k(u''_fd, u'/r) - (lambda f(-u))^k| over interior points
  double relative_residual = 0.0;  // residual / max(1, sup forcing)
  bool admissible = false;
};

/// Cross-checks the integral form against the differential form with a
/// finite-difference u''.
ConsistencyReport self_consistency_residual(const RadialProfile& profile, const ProblemSpec& spec);

/// CSV "r,u,uprime" with 17 significant digits.
void write_profile_csv(std::ostream& os, const RadialProfile& profile);

}  // namespace hessbif
