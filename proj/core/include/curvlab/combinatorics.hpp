#pragma once

#include <cstdint>

namespace curvlab {

// Largest dimension for which binomial() is guaranteed exact.
inline constexpr int kMaxExactBinomial = 60;

// C(n, k) with the convention C(n, k) = 0 for k < 0 or k > n.
// Exact in 64-bit integer arithmetic for 0 <= n <= 60.
std::int64_t binomial(int n, int k);

// Same value as a double, for use inside floating-point formulas.
double binomial_d(int n, int k);

// Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1).
double unit_ball_volume(int n);

}  // namespace curvlab
