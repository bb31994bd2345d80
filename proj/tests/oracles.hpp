#pragma once

// Independent reference computations for the test suite. They integrate the
// second-order differential form
//
//   u'' = ((lambda f(-u))^k - C(N-1,k) b^k) / (C(N-1,k-1) b^(k-1)),  b = u'/r,
//
// with Boost.Odeint's dense-output Dormand-Prince stepper, starting off the
// origin from the quadratic series. Nothing here shares code with the
// library's integral-form integrator.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

inline double choose(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

using State = std::array<double, 2>;  // (u, u')

struct Radial {
  int N, k;
  double lambda;
  std::function<double(double)> f;

  void operator()(const State& y, State& dy, double r) const {
    const double depth = y[0] < 0 ? -y[0] : 0.0;
    const double rhs = std::pow(lambda * f(depth), k);
    const double b = y[1] / r;
    dy[0] = y[1];
    dy[1] = (rhs - choose(N - 1, k) * std::pow(b, k)) / (choose(N - 1, k - 1) * std::pow(b, k - 1));
  }
};

inline State series_start(const Radial& sys, double d, double r0) {
  const double a = sys.lambda * sys.f(d) / std::pow(choose(sys.N, sys.k), 1.0 / sys.k);
  return {-d + 0.5 * a * r0 * r0, a * r0};
}

/// u(R) for the profile with u(0) = -d.
inline double boundary_value(int N, int k, const std::function<double(double)>& f, double lambda, double d,
                             double R = 1.0, double tol = 1e-12) {
  namespace ode = boost::numeric::odeint;
  Radial sys{N, k, lambda, f};
  const double r0 = 1e-6 * R;
  State y = series_start(sys, d, r0);
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(tol * d, tol), sys, y, r0, R,
                          1e-4 * R);
  return y[0];
}

/// First zero of the lambda = 1 linear eigenfunction profile; by scaling
/// u(r) = w(sqrt(lambda) r), lambda1(R) = (rho0 / R)^2.
inline double first_zero_linear(int N, int k, double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  Radial sys{N, k, 1.0, [](double s) { return s; }};
  const double r0 = 1e-6;
  State y = series_start(sys, 1.0, r0);
  auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(y, r0, 1e-4);
  while (true) {
    const auto [a, b] = stepper.do_step(sys);
    if (stepper.current_state()[0] >= 0) {
      double lo = a, hi = b;
      State tmp;
      for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        (tmp[0] < 0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    if (b > 1e3) throw std::runtime_error("oracle: no zero found");
  }
}

inline double lambda1(int N, int k, double R = 1.0) {
  const double rho = first_zero_linear(N, k);
  return rho * rho / (R * R);
}

/// lambda with u(R) = 0 at amplitude d by plain geometric bisection in [lo, hi].
inline double lambda_at(int N, int k, const std::function<double(double)>& f, double d, double lo, double hi,
                        double R = 1.0) {
  double flo = boundary_value(N, k, f, lo, d, R);
  if (flo >= 0 || boundary_value(N, k, f, hi, d, R) <= 0) throw std::runtime_error("oracle: root not bracketed");
  while (hi - lo > 1e-12 * hi) {
    const double mid = std::sqrt(lo * hi);
    if (boundary_value(N, k, f, mid, d, R) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace oracle
