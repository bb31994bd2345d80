#include "hessbif/binomial.hpp"

#include <array>
#include <string>

#include "hessbif/errors.hpp"

namespace hessbif {
namespace {

using PascalTable = std::array<std::array<std::uint64_t, kMaxDimension + 1>, kMaxDimension + 1>;

constexpr PascalTable make_pascal() {
  PascalTable t{};
  for (int n = 0; n <= kMaxDimension; ++n) {
    t[n][0] = 1;
    for (int r = 1; r <= n; ++r) t[n][r] = t[n - 1][r - 1] + (r < n ? t[n - 1][r] : 0);
  }
  return t;
}

constexpr PascalTable kPascal = make_pascal();

}  // namespace

std::uint64_t binomial(int n, int r) {
  if (n < 0 || n > kMaxDimension)
    throw InvalidInput("binomial: n = " + std::to_string(n) + " outside [0, " +
                       std::to_string(kMaxDimension) + "]");
  if (r < 0 || r > n) return 0;
  return kPascal[n][r];
}

double binomial_real(int n, int r) { return static_cast<double>(binomial(n, r)); }

}  // namespace hessbif
