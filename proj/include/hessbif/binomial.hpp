#pragma once

#include <cstdint>

namespace hessbif {

/// Largest supported space dimension; C(60, 30) still fits in 64 bits.
inline constexpr int kMaxDimension = 60;

/// Exact C(n, r) for 0 <= n <= kMaxDimension. Returns 0 when r < 0 or r > n.
/// Throws InvalidInput when n is negative or exceeds kMaxDimension.
std::uint64_t binomial(int n, int r);

/// binomial() converted to double (exact: all values are below 2^57).
double binomial_real(int n, int r);

}  // namespace hessbif
