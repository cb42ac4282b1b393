#include <doctest.h>

#include <cmath>
#include <random>

#include <curvlab/combinatorics.hpp>
#include <curvlab/errors.hpp>
#include <curvlab/fitting.hpp>
#include <curvlab/grid.hpp>

#include "oracles.hpp"

using namespace curvlab;
using oracle::pi;

TEST_CASE("binomial uses exact integers and the out-of-range-zero convention") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(60, 30) == 118264581564861424LL);
    CHECK(binomial(4, -1) == 0);
    CHECK(binomial(4, 5) == 0);
    CHECK(binomial(0, 0) == 1);
    // Pascal's rule as an independent check across the whole exact range.
    for (int n = 1; n <= kMaxExactBinomial; ++n)
        for (int k = 0; k <= n; ++k) REQUIRE(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
    CHECK(binomial_d(10, 3) == 120.0);
}

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unit_ball_volume(2) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
    CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2).epsilon(1e-14));
    // omega_n = (2 pi / n) omega_{n-2} covers both parities of n/2.
    for (int n = 3; n <= 30; ++n)
        CHECK(oracle::rel(unit_ball_volume(n), 2 * pi / n * unit_ball_volume(n - 2)) < 1e-12);
}

TEST_CASE("spectral derivatives of cosine modes are exact") {
    const int N = 129;
    const double d = 1.7;
    const GridCalculus g(N, d);
    for (int m = 0; m <= N / 4; ++m) {
        const double k = m * pi / d;
        const Vec u = g.sample([&](double z) { return std::cos(k * z); });
        const Vec du = g.first_derivative(u), ddu = g.second_derivative(u);
        double e1 = 0, e2 = 0;
        for (int j = 0; j < N; ++j) {
            const double z = g.node(j);
            e1 = std::max(e1, std::abs(du[j] + k * std::sin(k * z)));
            e2 = std::max(e2, std::abs(ddu[j] + k * k * std::cos(k * z)));
        }
        const double s1 = std::max(k, 1.0), s2 = std::max(k * k, 1.0);
        CHECK_MESSAGE(e1 / s1 < 1e-10, "m=" << m);
        CHECK_MESSAGE(e2 / s2 < 1e-10, "m=" << m);
    }
}

TEST_CASE("derivative operators annihilate constants in both modes") {
    for (DiffMode mode : {DiffMode::SpectralCosine, DiffMode::FiniteDifference4}) {
        const GridCalculus g(64, 1.0, mode);
        const Vec c(64, 3.25);
        CHECK(oracle::max_abs(g.first_derivative(c)) < 1e-11);
        CHECK(oracle::max_abs(g.second_derivative(c)) < 1e-9);
    }
}

TEST_CASE("fourth-order differences agree with the spectral route on smooth data") {
    const int N = 256;
    const double d = 1.0;
    const GridCalculus spec(N, d), fd(N, d, DiffMode::FiniteDifference4);
    const Vec u = oracle::cosine_series({0, 0.1, -0.05, 0.02}, 1.0, N, d);
    CHECK(oracle::max_diff(spec.first_derivative(u), fd.first_derivative(u)) < 1e-6);
    CHECK(oracle::max_diff(spec.second_derivative(u), fd.second_derivative(u)) < 1e-6);
}

TEST_CASE("derivatives() matches the separate calls") {
    const GridCalculus g(100, 2.0);
    const Vec u = oracle::cosine_series({0, 0.3, 0.1}, 2.0, 100, 2.0);
    Vec du, ddu;
    g.derivatives(u, du, ddu);
    CHECK(oracle::max_diff(du, g.first_derivative(u)) == 0.0);
    CHECK(oracle::max_diff(ddu, g.second_derivative(u)) == 0.0);
}

TEST_CASE("cosine coefficients round trip") {
    const int N = 50;
    const GridCalculus g(N, 1.0);
    const Vec u = oracle::cosine_series({0, 0.5, 0, 0.25}, 1.5, N, 1.0);
    const Vec a = g.cosine_coefficients(u);
    CHECK(a[0] == doctest::Approx(1.5));
    CHECK(a[1] == doctest::Approx(0.5));
    CHECK(a[3] == doctest::Approx(0.25));
    CHECK(oracle::max_diff(g.from_cosine_coefficients(a), u) < 1e-14);
}

TEST_CASE("trapezoid mean and integral are exact on the cosine basis") {
    const GridCalculus g(33, 2.0);
    const Vec c2 = g.sample([](double z) { return std::pow(std::cos(pi * z / 2.0), 2); });
    CHECK(g.integrate(c2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.mean(c2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.dot(c2, Vec(33, 2.0)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mean-zero projection examples and algebra") {
    const int N = 40;
    const double d = 1.3;
    const GridCalculus g(N, d);
    CHECK(oracle::max_abs(g.project_meanzero(Vec(N, 7.0))) < 1e-14);
    const Vec c1 = g.sample([&](double z) { return std::cos(pi * z / d); });
    CHECK(oracle::max_diff(g.project_meanzero(c1), c1) < 1e-15);
    const Vec c2 = g.sample([&](double z) { return std::cos(2 * pi * z / d); });
    const Vec shifted = g.sample([&](double z) { return 1 + std::cos(2 * pi * z / d); });
    CHECK(oracle::max_diff(g.project_meanzero(shifted), c2) < 1e-14);

    std::mt19937_64 rng(7);
    const Vec u = oracle::random_profile(rng, 0.4, 1.0, N, d), v = oracle::random_profile(rng, -2.0, 1.0, N, d);
    const Vec pu = g.project_meanzero(u);
    CHECK(std::abs(g.mean(pu)) < 1e-15);
    CHECK(oracle::max_diff(g.project_meanzero(pu), pu) < 1e-15);
    Vec comb(N);
    for (int j = 0; j < N; ++j) comb[j] = 2 * u[j] - 3 * v[j];
    const Vec pv = g.project_meanzero(v), pc = g.project_meanzero(comb);
    for (int j = 0; j < N; ++j) CHECK(pc[j] == doctest::Approx(2 * pu[j] - 3 * pv[j]).epsilon(1e-13));
}

TEST_CASE("grid rejects bad sizes") {
    CHECK_THROWS_AS(GridCalculus(8, 1.0), DomainError);
    CHECK_THROWS_AS(GridCalculus(32, -1.0), DomainError);
    const GridCalculus g(32, 1.0);
    CHECK_THROWS_AS(g.first_derivative(Vec(31, 1.0)), DomainError);
}

TEST_CASE("least-squares fits recover exact polynomials") {
    std::vector<double> x, y, yl;
    for (int i = 0; i < 30; ++i) {
        const double t = 0.01 + 0.003 * i;
        x.push_back(t);
        y.push_back(1 - 2 * t + 0.5 * t * t * t);
        yl.push_back(4 - 3 * t);
    }
    const auto c = fit_polynomial(x, y, 4);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(std::abs(c[2]) < 1e-6);
    const LineFit f = fit_line(x, yl);
    CHECK(f.slope == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(f.samples == 30);
}
