#pragma once

// Embedded Runge-Kutta 5(4) of Dormand and Prince with FSAL reuse and
// per-component mixed error control.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "hessbif/errors.hpp"

namespace hessbif {

template <typename Scalar, int Dim>
class DormandPrince45 {
 public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  struct Options {
    Scalar rtol = Scalar(1e-10);
    State abs_scale = State::Ones();  // atol_i = rtol * abs_scale_i
    Scalar initial_step = Scalar(1e-3);
    std::size_t max_steps = 5'000'000;
  };

  explicit DormandPrince45(Options opts) : opts_(std::move(opts)), h_(opts_.initial_step) {}

  /// Integrates y from t0 to t1 (t1 > t0). `rhs(t, y, dy)` returns false when y
  /// lies outside the domain of the right-hand side; the step is then retried
  /// with a smaller size.
  template <typename Rhs>
  State advance(Rhs&& rhs, Scalar t0, Scalar t1, State y) {
    Scalar t = t0;
    const Scalar span = t1 - t0;
    const Scalar h_min = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(std::abs(t1), std::abs(span));
    State k1, k2, k3, k4, k5, k6, k7, ynew, ytmp, err;
    if (!(have_fsal_ && fsal_t_ == t0 && fsal_y_ == y)) {
      if (!rhs(t, y, k1)) throw NumericalFailure("right-hand side undefined at the initial state");
    } else {
      k1 = fsal_dy_;
    }
    while (t < t1) {
      if (++steps_ > opts_.max_steps) throw NumericalFailure("integrator exceeded the step budget");
      bool last = false;
      Scalar h = h_;
      if (t + h >= t1 || t + h * Scalar(1.0001) >= t1) {
        h = t1 - t;
        last = true;
      }
      bool ok = true;
      ytmp = y + h * (Scalar(1) / 5) * k1;
      ok = ok && rhs(t + h / 5, ytmp, k2);
      if (ok) {
        ytmp = y + h * (Scalar(3) / 40 * k1 + Scalar(9) / 40 * k2);
        ok = rhs(t + h * Scalar(3) / 10, ytmp, k3);
      }
      if (ok) {
        ytmp = y + h * (Scalar(44) / 45 * k1 - Scalar(56) / 15 * k2 + Scalar(32) / 9 * k3);
        ok = rhs(t + h * Scalar(4) / 5, ytmp, k4);
      }
      if (ok) {
        ytmp = y + h * (Scalar(19372) / 6561 * k1 - Scalar(25360) / 2187 * k2 + Scalar(64448) / 6561 * k3 -
                        Scalar(212) / 729 * k4);
        ok = rhs(t + h * Scalar(8) / 9, ytmp, k5);
      }
      if (ok) {
        ytmp = y + h * (Scalar(9017) / 3168 * k1 - Scalar(355) / 33 * k2 + Scalar(46732) / 5247 * k3 +
                        Scalar(49) / 176 * k4 - Scalar(5103) / 18656 * k5);
        ok = rhs(t + h, ytmp, k6);
      }
      if (ok) {
        ynew = y + h * (Scalar(35) / 384 * k1 + Scalar(500) / 1113 * k3 + Scalar(125) / 192 * k4 -
                        Scalar(2187) / 6784 * k5 + Scalar(11) / 84 * k6);
        ok = rhs(last ? t1 : t + h, ynew, k7);
      }
      Scalar norm = std::numeric_limits<Scalar>::infinity();
      if (ok) {
        err = h * (Scalar(71) / 57600 * k1 - Scalar(71) / 16695 * k3 + Scalar(71) / 1920 * k4 -
                   Scalar(17253) / 339200 * k5 + Scalar(22) / 525 * k6 - Scalar(1) / 40 * k7);
        norm = Scalar(0);
        for (int i = 0; i < y.size(); ++i) {
          Scalar sc = opts_.rtol * (opts_.abs_scale(i) + std::max(std::abs(y(i)), std::abs(ynew(i))));
          if (!(sc > 0)) sc = std::numeric_limits<Scalar>::min();
          norm = std::max(norm, std::abs(err(i)) / sc);
        }
        if (!std::isfinite(norm) || !ynew.allFinite()) norm = std::numeric_limits<Scalar>::infinity();
      }
      if (norm <= Scalar(1)) {
        t = last ? t1 : t + h;
        y = ynew;
        k1 = k7;
        ++accepted_;
        const Scalar grow = norm == 0 ? Scalar(5) : std::min(Scalar(5), Scalar(0.9) * std::pow(norm, Scalar(-0.2)));
        // keep the controller's step when the last step was clipped to t1
        if (!last || grow < Scalar(1)) h_ = h * std::max(Scalar(0.2), grow);
      } else {
        ++rejected_;
        const Scalar shrink = std::isfinite(norm) ? std::max(Scalar(0.2), Scalar(0.9) * std::pow(norm, Scalar(-0.2)))
                                                  : Scalar(0.25);
        h_ = h * shrink;
        if (h_ < h_min) throw NumericalFailure("integrator step size underflow");
      }
    }
    have_fsal_ = true;
    fsal_t_ = t1;
    fsal_y_ = y;
    fsal_dy_ = k1;
    return y;
  }

  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }

 private:
  Options opts_;
  Scalar h_;
  std::size_t steps_ = 0, accepted_ = 0, rejected_ = 0;
  bool have_fsal_ = false;
  Scalar fsal_t_{};
  State fsal_y_, fsal_dy_;
};

}  // namespace hessbif
