#pragma once

// Reference computations written independently of the library code paths.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <curvlab/geometry.hpp>

namespace oracle {

using curvlab::Vec;

inline constexpr double pi = std::numbers::pi;

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Coefficients of prod_i (1 + t kappa_i) as a polynomial in t, expanded one
// factor at a time from the explicit list of n principal curvatures.
inline std::vector<double> product_expansion(const curvlab::CurvaturePair& c, int n) {
    std::vector<double> kappas(n - 1, c.kappa1);
    kappas.push_back(c.kappan);
    std::vector<double> poly{1.0};
    for (double k : kappas) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] += k * poly[i];
        }
        poly = std::move(next);
    }
    return poly;
}

// Profile base + sum_k amp[k] cos(k pi z/d), k >= 1, sampled on N nodes.
inline Vec cosine_series(const std::vector<double>& amp, double base, int N, double d) {
    Vec v(N, base);
    for (int j = 0; j < N; ++j) {
        const double z = j * d / (N - 1);
        for (std::size_t k = 1; k < amp.size(); ++k) v[j] += amp[k] * std::cos(k * pi * z / d);
    }
    return v;
}

// Random smooth even profile around `base` with a few decaying modes.
inline Vec random_profile(std::mt19937_64& rng, double base, double scale, int N, double d, int modes = 5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> amp(modes + 1, 0.0);
    for (int k = 1; k <= modes; ++k) amp[k] = scale * u(rng) / k;
    return cosine_series(amp, base, N, d);
}

}  // namespace oracle
