#pragma once

// k-Hessian operator on radial functions and Garding-cone membership.
//
// For a radial u(r) the Hessian has eigenvalues u'' (once) and u'/r
// (N-1 times), so S_k(D^2 u) collapses to two binomial terms.

#include <Eigen/Core>
#include <cmath>

#include "hessbif/binomial.hpp"
#include "hessbif/errors.hpp"

namespace hessbif {

inline void check_order(int dimension, int order) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw InvalidInput("dimension N must lie in [1, 60]");
  if (order < 1 || order > dimension) throw InvalidInput("order k must lie in [1, N]");
}

/// Integer power by repeated squaring; k >= 0.
template <typename Scalar>
Scalar ipow(Scalar x, int k) {
  Scalar r(1);
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

/// S_k of the multiset {upp} u {up_over_r x (N-1)}:
///   C(N-1,k) b^k + C(N-1,k-1) b^(k-1) a,  a = upp, b = up_over_r.
template <typename Scalar>
Scalar sk_from_radial(Scalar upp, Scalar up_over_r, int N, int k) {
  check_order(N, k);
  const Scalar tangential = static_cast<Scalar>(binomial_real(N - 1, k)) * ipow(up_over_r, k);
  const Scalar mixed = static_cast<Scalar>(binomial_real(N - 1, k - 1)) * ipow(up_over_r, k - 1) * upp;
  return tangential + mixed;
}

/// Elementary symmetric polynomials S_0..S_k of `eigs` (S_0 = 1).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> elementary_symmetric(
    const Eigen::MatrixBase<Derived>& eigs, int k) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(k + 1);
  e(0) = Scalar(1);
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    for (int j = std::min<int>(k, static_cast<int>(i) + 1); j >= 1; --j) e(j) += eigs(i) * e(j - 1);
  return e;
}

/// True iff S_j(eigs) > 0 for every j = 1..k (the open Garding cone).
template <typename Derived>
bool gamma_k_membership(const Eigen::MatrixBase<Derived>& eigs, int k) {
  if (k < 1) throw InvalidInput("gamma_k_membership: k must be >= 1");
  if (eigs.size() < k) throw InvalidInput("gamma_k_membership: fewer eigenvalues than k");
  const auto e = elementary_symmetric(eigs, k);
  for (int j = 1; j <= k; ++j)
    if (!(e(j) > 0)) return false;
  return true;
}

/// Radial Hessian eigenvalues (upp, b, ..., b) as a length-N vector.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> radial_hessian_eigenvalues(Scalar upp, Scalar up_over_r, int N) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(N, up_over_r);
  v(0) = upp;
  return v;
}

}  // namespace hessbif
