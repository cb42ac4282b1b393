#include "curvlab/fitting.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m != y.size()) throw DomainError("fit_line: size mismatch");
    if (m < 2) throw InsufficientDataError("fit_line: need at least two samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw InsufficientDataError("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / m);
    f.samples = static_cast<int>(m);
    return f;
}

std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int m = static_cast<int>(x.size());
    if (m != static_cast<int>(y.size())) throw DomainError("fit_polynomial: size mismatch");
    if (degree < 0 || m < degree + 1) throw InsufficientDataError("fit_polynomial: too few samples for the degree");
    double lo = x[0], hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (!(half > 0)) throw InsufficientDataError("fit_polynomial: abscissae are all equal");

    // Monomials in t = (x - mid)/half stay well conditioned on [-1, 1] for
    // the modest degrees used here.
    Eigen::MatrixXd A(m, degree + 1);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        const double t = (x[i] - mid) / half;
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            A(i, k) = p;
            p *= t;
        }
        b(i) = y[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);

    // Re-expand sum_k c_k ((x - mid)/half)^k in powers of x.
    std::vector<double> a(degree + 1, 0.0);
    for (int k = 0; k <= degree; ++k) {
        const double ck = c(k) / std::pow(half, k);
        for (int j = 0; j <= k; ++j) a[j] += ck * binomial_d(k, j) * std::pow(-mid, k - j);
    }
    return a;
}

}  // namespace curvlab
