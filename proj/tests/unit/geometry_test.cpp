#include <doctest.h>

#include <cmath>
#include <random>

#include <curvlab/combinatorics.hpp>
#include <curvlab/errors.hpp>
#include <curvlab/geometry.hpp>

#include "oracles.hpp"

using namespace curvlab;
using oracle::pi;

TEST_CASE("curvatures of a cylinder") {
    for (int n : {2, 3, 7}) {
        const GridCalculus g(32, 1.0);
        const auto k = principal_curvatures(cylinder(n, 1.0, 32, 2.0), g);
        for (const auto& c : k) {
            CHECK(c.kappa1 == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(std::abs(c.kappan) < 1e-10);
        }
    }
    CHECK(cylinder_curvatures(4.0).kappa1 == 0.25);
}

TEST_CASE("curvatures of a single cosine bump") {
    const int N = 129;  // odd, so z = d/2 is a node
    const double d = 1.4, R = 0.9, eps = 0.07;
    const GridCalculus g(N, d);
    RadialProfile p{3, d, g.sample([&](double z) { return R + eps * std::cos(pi * z / d); })};
    const auto k = principal_curvatures(p, g);
    CHECK(k[0].kappan == doctest::Approx(eps * (pi / d) * (pi / d)).epsilon(1e-10));
    CHECK(k[0].kappa1 == doctest::Approx(1.0 / (R + eps)).epsilon(1e-12));
    const double slope = eps * pi / d;
    CHECK(k[N / 2].kappa1 == doctest::Approx(1.0 / (R * std::sqrt(1 + slope * slope))).epsilon(1e-10));
    CHECK(std::abs(k[N / 2].kappan) < 1e-10);
}

TEST_CASE("profiles must be positive and large enough") {
    const GridCalculus g(32, 1.0);
    RadialProfile p = cylinder(2, 1.0, 32, 1.0);
    p.values[5] = 0.0;
    CHECK_THROWS_AS(principal_curvatures(p, g), DomainError);
    CHECK_THROWS_AS(cylinder(2, 1.0, 8, 1.0), DomainError);
    CHECK_THROWS_AS(cylinder(1, 1.0, 32, 1.0), DomainError);
}

TEST_CASE("elementary symmetric functions: examples") {
    CHECK(elementary_symmetric(0, {0.3, -2.0}, 4) == 1.0);
    CHECK(elementary_symmetric(1, {1.0 / 1.5, 0.0}, 3) == doctest::Approx(2 / 1.5));
    CHECK(elementary_symmetric(5, {0.7, 0.0}, 5) == 0.0);
    CHECK_THROWS_AS(elementary_symmetric(-1, {1, 0}, 3), DomainError);
    CHECK_THROWS_AS(elementary_symmetric(4, {1, 0}, 3), DomainError);
}

TEST_CASE("elementary symmetric functions match the brute-force product") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n = 2; n <= 12; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const CurvaturePair c{u(rng), u(rng)};
            const auto coeffs = oracle::product_expansion(c, n);
            for (double t : {0.5, 1.0, 2.0}) {
                double lib = 0.0, ref = 0.0, scale = 0.0;
                for (int a = 0; a <= n; ++a) {
                    lib += elementary_symmetric(a, c, n) * std::pow(t, a);
                    ref += coeffs[a] * std::pow(t, a);
                    scale += std::abs(coeffs[a] * std::pow(t, a));
                }
                CHECK(std::abs(lib - ref) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("weight evaluation") {
    const double R = 1.7;
    const CurvaturePair cyl = cylinder_curvatures(R);
    CHECK(weight_eval(WeightModel::volume(4), {3.0, -1.0}, 4) == 1.0);
    CHECK(weight_eval(WeightModel::mixed(2, 1), cyl, 2) == doctest::Approx(1 / R));
    for (int n : {2, 3, 5}) {
        std::vector<double> c(n + 1, 0.0);
        c[0] = c[1] = 1.0;
        const WeightModel w(c);
        CHECK(weight_eval(w, cyl, n) == doctest::Approx(1 + (n - 1) / R));
        CHECK(w.at_cylinder(R) == doctest::Approx(1 + (n - 1) / R));
    }
    CHECK(WeightModel::mixed(5, 3).mixed_index() == 3);
    CHECK(WeightModel({1.0, 1.0, 0.0}).mixed_index() == -1);
    CHECK_THROWS_AS(weight_eval(WeightModel::volume(3), cyl, 2), DomainError);
}

TEST_CASE("weight models reject degenerate coefficient lists") {
    CHECK_THROWS_AS(WeightModel({0.0, 0.0, 1.0}), DomainError);  // pure c_n
    CHECK_THROWS_AS(WeightModel({1.0}), DomainError);
    CHECK_THROWS_AS(WeightModel::mixed(3, 3), DomainError);
    CHECK_THROWS_AS(WeightModel::mixed(3, -1), DomainError);
}

TEST_CASE("weight partial derivatives match finite differences") {
    const WeightModel w({0.5, 1.0, -0.3, 0.2});
    const CurvaturePair c{0.8, -0.4};
    const double h = 1e-6;
    // One rotational slot moves, so the change is taken on the explicit product.
    auto xi = [&](std::vector<double> k) {
        std::vector<double> poly{1.0};
        for (double x : k) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i];
                next[i + 1] += x * poly[i];
            }
            poly = next;
        }
        double s = 0.0;
        for (int a = 0; a <= 3; ++a) s += w.coeff(a) * poly[a];
        return s;
    };
    const double d1 = (xi({c.kappa1 + h, c.kappa1, c.kappan}) - xi({c.kappa1 - h, c.kappa1, c.kappan})) / (2 * h);
    const double dn = (xi({c.kappa1, c.kappa1, c.kappan + h}) - xi({c.kappa1, c.kappa1, c.kappan - h})) / (2 * h);
    CHECK(w.d_kappa1(c) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(w.d_kappan(c) == doctest::Approx(dn).epsilon(1e-8));
}

TEST_CASE("Q density on cylinders") {
    const GridCalculus g(32, 1.0);
    for (int n : {2, 3, 6}) {
        const double R = 1.3;
        const Vec q0 = q_density(cylinder(n, 1.0, 32, R), WeightModel::volume(n), g);
        for (double v : q0) CHECK(v == doctest::Approx(std::pow(R, n)).epsilon(1e-13));
        const Vec q1 = q_density(cylinder(n, 1.0, 32, R), WeightModel::mixed(n, 1), g);
        for (double v : q1) CHECK(v == doctest::Approx(n * std::pow(R, n - 1)).epsilon(1e-13));

        // General weight against the closed form sum c_a (n-1)^(n-a) C(n,a) eta^-(n-a).
        std::vector<double> c(n + 1);
        for (int a = 0; a <= n; ++a) c[a] = 1.0 / (a + 1);
        const WeightModel w(c);
        const double eta = 2.2;
        double closed = 0.0;
        for (int a = 0; a <= n; ++a)
            closed += c[a] * std::pow(n - 1.0, n - a) * binomial_d(n, a) * std::pow(eta, -(n - a));
        const Vec q = q_density(cylinder(n, 1.0, 32, (n - 1) / eta), w, g);
        for (double v : q) CHECK(v == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("weighted volume examples") {
    const double d = 1.5, R = 0.8;
    const GridCalculus g(64, d);
    CHECK(weighted_volume(cylinder(3, d, 64, R), WeightModel::volume(3), g) ==
          doctest::Approx(2 * d * R * R * R).epsilon(1e-13));
    const GridCalculus g1(64, 1.0);
    RadialProfile p{2, 1.0, oracle::cosine_series({0, 0.1}, 1.0, 64, 1.0)};
    CHECK(weighted_volume(p, WeightModel::volume(2), g1) == doctest::Approx(2.01).epsilon(1e-13));
}

TEST_CASE("mixed volumes of cylinders") {
    const double d = 1.3, R = 0.7;
    const GridCalculus g(40, d);
    for (int n : {2, 3, 5}) {
        const RadialProfile p = cylinder(n, d, 40, R);
        const double wn = unit_ball_volume(n);
        CHECK(mixed_volume(n + 1, p, g) == doctest::Approx(wn * std::pow(R, n) * d).epsilon(1e-13));
        CHECK(mixed_volume(1, p, g) == doctest::Approx(wn * d / (n + 1)).epsilon(1e-12));
        CHECK_THROWS_AS(mixed_volume(0, p, g), DomainError);
        CHECK_THROWS_AS(mixed_volume(n + 2, p, g), DomainError);
    }
    CHECK(mixed_volume(2, cylinder(2, d, 40, R), g) == doctest::Approx(2 * pi * R * d / 3).epsilon(1e-13));
}

TEST_CASE("weighted volume equals its mixed-volume expansion") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> cu(-1.0, 1.0);
    for (int n = 2; n <= 6; ++n) {
        const double d = 1.0 + 0.2 * n;
        const int N = 96;
        const GridCalculus g(N, d);
        for (int trial = 0; trial < 4; ++trial) {
            const RadialProfile p{n, d, oracle::random_profile(rng, 1.0, 0.15, N, d)};
            std::vector<double> c(n + 1, 0.0);
            for (int a = 0; a < n; ++a) c[a] = cu(rng);
            c[0] += 2.0;
            const WeightModel w(c);
            double expansion = c[0] * mixed_volume(n + 1, p, g);
            for (int a = 1; a <= n; ++a) expansion += c[a] * binomial_d(n + 1, a) * mixed_volume(n + 1 - a, p, g);
            expansion *= 2.0 / unit_ball_volume(n);
            CHECK(oracle::rel(weighted_volume(p, w, g), expansion) < 1e-9);
        }
    }
}

TEST_CASE("Gateaux derivative of the weighted volume pairs v with Xi u^(n-1)") {
    std::mt19937_64 rng(2024);
    const int N = 128;
    const double d = 1.0;
    const GridCalculus g(N, d);
    for (int n : {2, 3, 4}) {
        std::vector<WeightModel> weights{WeightModel::mixed(n, 0), WeightModel::mixed(n, 1)};
        std::vector<double> both(n + 1, 0.0);
        both[0] = both[1] = 1.0;
        weights.emplace_back(both);
        for (int trial = 0; trial < 3; ++trial) {
            const Vec u = oracle::random_profile(rng, 1.0, 0.08, N, d);
            const Vec v = oracle::random_profile(rng, 0.3, 1.0, N, d);
            for (const auto& w : weights) {
                auto wvol = [&](double e) {
                    RadialProfile p{n, d, u};
                    for (int j = 0; j < N; ++j) p.values[j] += e * v[j];
                    return weighted_volume(p, w, g);
                };
                auto central = [&](double h) { return (wvol(h) - wvol(-h)) / (2 * h); };
                const double fd = (4 * central(5e-4) - central(1e-3)) / 3;
                const auto k = principal_curvatures({n, d, u}, g);
                Vec pairing(N);
                for (int j = 0; j < N; ++j) pairing[j] = v[j] * w.eval(k[j]) * std::pow(u[j], n - 1);
                // Circle of circumference 2d: twice the [0, d] integral.
                CHECK(oracle::rel(fd, 2.0 * n * g.integrate(pairing)) < 1e-7);
            }
        }
    }
}

TEST_CASE("surface fields bundle the derivatives and curvatures") {
    const GridCalculus g(48, 1.0);
    const RadialProfile p{2, 1.0, oracle::cosine_series({0, 0.1}, 1.0, 48, 1.0)};
    const SurfaceFields f = surface_fields(p, g);
    const auto k = principal_curvatures(p, g);
    for (int j = 0; j < 48; ++j) {
        CHECK(f.L[j] == doctest::Approx(std::sqrt(1 + f.du[j] * f.du[j])));
        CHECK(f.kappa[j].kappa1 == doctest::Approx(k[j].kappa1));
    }
    CHECK(p.min() == doctest::Approx(0.9));
    CHECK(p.max() == doctest::Approx(1.1));
}
