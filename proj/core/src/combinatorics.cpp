#include "curvlab/combinatorics.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "curvlab/errors.hpp"

namespace curvlab {

std::int64_t binomial(int n, int k) {
    if (n < 0) throw DomainError("binomial: negative n");
    if (n > kMaxExactBinomial) throw DomainError("binomial: n exceeds exact range");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    // Multiplicative formula; each partial product is itself a binomial
    // coefficient, so the division is exact and nothing exceeds C(60,30).
    std::int64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

double binomial_d(int n, int k) { return static_cast<double>(binomial(n, k)); }

double unit_ball_volume(int n) {
    if (n < 0) throw DomainError("unit_ball_volume: negative dimension");
    const double half_n = 0.5 * n;
    return std::pow(boost::math::constants::pi<double>(), half_n) / boost::math::tgamma(half_n + 1.0);
}

}  // namespace curvlab
