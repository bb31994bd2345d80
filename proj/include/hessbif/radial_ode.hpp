#pragma once

// Outward integration of M coupled radial k-Hessian equations
//
//   S_k(D^2 u_i) = F_i(-u_1, ..., -u_M),   u_i(0) = -d_i,  u_i'(0) = 0.
//
// Using S_k(D^2 u) = C(N-1,k-1)/k r^(1-N) (r^(N-k) u'^k)', each equation is
// carried as the pair (u_i, m_i) with the running mean forcing
//   m_i(r) = r^-N int_0^r s^(N-1) F_i ds,
// so that u_i' = r (k m_i / C(N-1,k-1))^(1/k) and m_i' = (F_i - N m_i) / r.
// m_i(0) = F_i(d)/N and m_i'(0) = 0; u_i' >= 0 holds by construction.
//
// Past the first zero of u_i the depth -u_i is clamped at 0; with F(0) = 0
// this continues the forcing by zero so u_i(R) stays continuous in the
// shooting parameters.

#include <Eigen/Core>
#include <cmath>

#include "hessbif/binomial.hpp"
#include "hessbif/dormand_prince.hpp"
#include "hessbif/errors.hpp"

namespace hessbif::detail {

inline double kth_root(double x, int k) {
  if (k == 1) return x;
  if (k == 2) return std::sqrt(x);
  return std::pow(x, 1.0 / k);
}

template <int M, typename Forcing>
class RadialSystem {
 public:
  using State = Eigen::Matrix<double, 2 * M, 1>;
  using Depth = Eigen::Matrix<double, M, 1>;

  RadialSystem(int N, int k, Forcing forcing)
      : N_(N), k_(k), c0_(binomial_real(N - 1, k - 1)), forcing_(std::move(forcing)) {}

  Depth depth(const State& y) const {
    Depth s;
    for (int i = 0; i < M; ++i) s(i) = y(2 * i) < 0 ? -y(2 * i) : 0.0;
    return s;
  }

  Depth forcing(const State& y) const {
    const Depth f = forcing_(depth(y));
    for (int i = 0; i < M; ++i)
      if (!(f(i) >= 0) || !std::isfinite(f(i))) throw NumericalFailure("forcing is negative or not finite");
    return f;
  }

  /// u'/r for component i; m must be >= 0.
  double slope_over_r(double m) const { return kth_root(k_ * m / c0_, k_); }

  bool operator()(double r, const State& y, State& dy) const {
    const Depth f = forcing(y);
    for (int i = 0; i < M; ++i) {
      const double m = y(2 * i + 1);
      if (!(m >= 0)) return false;  // stage left the domain; the integrator retries smaller
      dy(2 * i) = r * slope_over_r(m);
      dy(2 * i + 1) = r > 0 ? (f(i) - N_ * m) / r : 0.0;
    }
    return true;
  }

  State initial_state(const Depth& amplitudes) const {
    State y;
    const Depth f = forcing_(amplitudes);
    for (int i = 0; i < M; ++i) {
      if (!(f(i) >= 0) || !std::isfinite(f(i))) throw NumericalFailure("forcing is negative or not finite at r = 0");
      y(2 * i) = -amplitudes(i);
      y(2 * i + 1) = f(i) / N_;
    }
    return y;
  }

  /// Radial second derivative from the state: u'' = b (1 - N/k + F/(k m)), b = u'/r.
  double second_derivative(double m, double f) const {
    if (m <= 0) return 0.0;
    const double b = slope_over_r(m);
    return b * (1.0 - static_cast<double>(N_) / k_ + f / (k_ * m));
  }

  int dimension() const { return N_; }
  int order() const { return k_; }

 private:
  int N_, k_;
  double c0_;
  Forcing forcing_;
};

template <int M>
DormandPrince45<double, 2 * M> make_stepper(const Eigen::Matrix<double, 2 * M, 1>& y0, double rtol, double radius) {
  typename DormandPrince45<double, 2 * M>::Options opts;
  opts.rtol = rtol;
  for (int i = 0; i < M; ++i) {
    opts.abs_scale(2 * i) = std::abs(y0(2 * i));
    opts.abs_scale(2 * i + 1) = std::abs(y0(2 * i + 1));
  }
  opts.initial_step = radius * 1e-3;
  return DormandPrince45<double, 2 * M>(opts);
}

/// Final state at r = R.
template <int M, typename Forcing>
typename RadialSystem<M, Forcing>::State integrate_to_boundary(const RadialSystem<M, Forcing>& sys,
                                                               const typename RadialSystem<M, Forcing>::Depth& amp,
                                                               double radius, double rtol) {
  const auto y0 = sys.initial_state(amp);
  auto stepper = make_stepper<M>(y0, rtol, radius);
  const auto y = stepper.advance(sys, 0.0, radius, y0);
  for (int i = 0; i < M; ++i)
    if (y(2 * i + 1) < 0) throw NumericalFailure("negative mean forcing in an accepted step");
  return y;
}

/// States at every radius of `radii` (ascending, radii(0) == 0); one row per radius.
template <int M, typename Forcing>
Eigen::Matrix<double, Eigen::Dynamic, 2 * M> integrate_on_grid(const RadialSystem<M, Forcing>& sys,
                                                               const typename RadialSystem<M, Forcing>::Depth& amp,
                                                               const Eigen::VectorXd& radii, double rtol) {
  const auto y0 = sys.initial_state(amp);
  auto stepper = make_stepper<M>(y0, rtol, radii(radii.size() - 1));
  Eigen::Matrix<double, Eigen::Dynamic, 2 * M> out(radii.size(), 2 * M);
  typename RadialSystem<M, Forcing>::State y = y0;
  out.row(0) = y.transpose();
  for (Eigen::Index i = 1; i < radii.size(); ++i) {
    y = stepper.advance(sys, radii(i - 1), radii(i), y);
    for (int c = 0; c < M; ++c)
      if (y(2 * c + 1) < 0) throw NumericalFailure("negative mean forcing in an accepted step");
    out.row(i) = y.transpose();
  }
  return out;
}

}  // namespace hessbif::detail
