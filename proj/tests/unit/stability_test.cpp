#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <curvlab/errors.hpp>
#include <curvlab/stability.hpp>

#include "oracles.hpp"

using namespace curvlab;
using oracle::pi;

namespace {

// Speed known only through a prescribed eta profile, used to exercise the
// root-finding and degeneracy paths with shapes no preset produces.
class ProfileOnlySpeed : public SpeedModel {
public:
    using Fn_t = double (*)(double);
    ProfileOnlySpeed(int n, Fn_t f1, Fn_t fn) : n_(n), f1_(f1), fn_(fn) {}
    int n() const override { return n_; }
    std::string name() const override { return "profile-only"; }
    bool has_pointwise() const override { return false; }
    double eval(const CurvaturePair&) const override { throw DomainError("no pointwise form"); }
    double d_kappa1(const CurvaturePair&) const override { throw DomainError("no pointwise form"); }
    double d_kappan(const CurvaturePair&) const override { throw DomainError("no pointwise form"); }
    EtaProfile eta_profile(double eta) const override {
        EtaProfile e;
        e.F1 = f1_(eta);
        e.Fn = fn_(eta);
        return e;
    }

private:
    int n_;
    Fn_t f1_, fn_;
};

std::vector<SpeedPtr> all_presets(int n) {
    std::vector<SpeedPtr> s = {make_mean_curvature(n), make_mean_curvature_pow(n, 2.0),
                               make_mean_curvature_pow(n, 0.5), make_polynomial_example(n, 1.0, 1),
                               make_polynomial_example(n, 1.0, 2)};
    for (int r = 1; r <= n; ++r) s.push_back(make_elementary(n, r));
    return s;
}

}  // namespace

TEST_CASE("linear eigenvalues of the mean-curvature flow") {
    for (int n : {2, 3, 7}) {
        const auto F = make_mean_curvature(n);
        const double d = 1.3, eta = 2.1;
        for (int m = 1; m <= 4; ++m)
            CHECK(linear_eigenvalue(m, eta, *F, n, d) ==
                  doctest::Approx(eta * eta / (n - 1) - std::pow(m * pi / d, 2)).epsilon(1e-14));
        const double eta0 = pi * std::sqrt(n - 1.0) / d;
        CHECK(std::abs(linear_eigenvalue(1, eta0, *F, n, d)) < 1e-12);
        CHECK(linear_eigenvalue(1, 0.99 * eta0, *F, n, d) < 0);
        CHECK(linear_eigenvalue(200, eta, *F, n, d) < -1e4);
        CHECK(critical_function(eta, *F, n, d) == linear_eigenvalue(1, eta, *F, n, d));
    }
}

TEST_CASE("critical radius") {
    for (int n = 2; n <= 13; ++n)
        for (double d : {0.5, 1.0, 2.0}) {
            const auto c = r_crit_find(*make_mean_curvature(n), n, d, {1e-3, 1e3});
            REQUIRE(c);
            CHECK(oracle::rel(c->R_crit, d * std::sqrt(n - 1.0) / pi) < 1e-12);
        }
    for (double d : {0.7, 1.0, 1.6}) {
        const auto one = r_crit_find(*make_polynomial_example(4, d, 1), 4, d, {0.1, 100});
        REQUIRE(one);
        CHECK(one->R_crit == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(one->eta == doctest::Approx(3.0).epsilon(1e-10));
        CHECK_FALSE(r_crit_find(*make_polynomial_example(4, d, 2), 4, d, {0.1, 100}));
    }
}

TEST_CASE("critical radius reports every root when there are several") {
    // f(eta) = pi^2 (eta-1)(eta-2)(eta-3) for n = 2, d = 1.
    const ProfileOnlySpeed F(
        2, [](double e) { return pi * pi * (1 + (e - 1) * (e - 2) * (e - 3)) / (e * e); }, [](double) { return 1.0; });
    try {
        (void)r_crit_find(F, 2, 1.0, {0.5, 3.5});
        FAIL("expected AmbiguityError");
    } catch (const AmbiguityError& e) {
        REQUIRE(e.roots().size() == 3);
        CHECK(e.roots()[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(e.roots()[2] == doctest::Approx(3.0).epsilon(1e-9));
    }
    const auto single = r_crit_find(F, 2, 1.0, {2.5, 3.5});
    REQUIRE(single);
    CHECK(single->eta == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("bifurcation condition") {
    CHECK(bif_condition(pi, *make_mean_curvature(2), 2) == doctest::Approx(2.0).epsilon(1e-14));
    for (int n : {3, 5}) {
        for (const auto& F : {make_mean_curvature_pow(n, 2.0), make_mean_curvature_pow(n, 0.5), make_elementary(n, 2)}) {
            const double eta = 1.7;
            CHECK(bif_condition(eta, *F, n) == doctest::Approx(2 * F->eta_profile(eta).F1).epsilon(1e-12));
        }
    }
    CHECK(std::abs(bif_condition(3.0, *make_polynomial_example(4, 1.0, 1), 4)) > 0.1);
    const ProfileOnlySpeed flat(2, [](double) { return 1.0; }, [](double) { return 0.0; });
    CHECK_THROWS_AS(bif_condition(1.0, flat, 2), DegeneracyError);
}

TEST_CASE("composite coefficient and its transcription guard") {
    for (int n : {2, 4, 9}) {
        for (const auto& F : all_presets(n)) {
            for (double eta : {0.9, 2.3}) {
                // E_n has no kappa_1 dependence at a cylinder, so the expansion is undefined.
                if (F->eta_profile(eta).F1 == 0.0) {
                    CHECK_THROWS_AS((void)bif_shape_coefficients(*F, n, eta), DegeneracyError);
                    continue;
                }
                const auto c = bif_shape_coefficients(*F, n, eta);
                const double scale = std::max(1.0, std::abs(c.script_F));
                CHECK_MESSAGE(std::abs(script_F_from_parts(c) - c.script_F) <= 1e-10 * scale, F->name());
            }
        }
    }
}

TEST_CASE("homogeneous coefficients follow the eta scaling") {
    const int n = 4;
    const auto F = make_mean_curvature_pow(n, 2.0);
    const double eta0 = 1.9;
    const auto c = bif_shape_coefficients(*F, n, eta0);
    const EtaProfile one = F->eta_profile(1.0);
    CHECK(c.F.F1p == doctest::Approx(one.F1).epsilon(1e-12));           // (k-1) eta^(k-2) F1(1), k = 2
    CHECK(c.F.Fnp == doctest::Approx(one.Fn).epsilon(1e-12));
    CHECK(std::abs(c.F.F1pp) < 1e-12);
}

TEST_CASE("mean-curvature sign thresholds") {
    for (int n = 2; n <= 30; ++n) {
        const auto F = make_mean_curvature(n);
        const auto c = bif_shape_coefficients(*F, n, pi * std::sqrt(n - 1.0));
        const WeightModel w = WeightModel::volume(n);
        CHECK(weight_correction(c, w) == 0.0);
        const int expected = n <= 10 ? 1 : -1;
        CHECK_MESSAGE(lambda_dd_sign(c, w) == expected, "n=" << n);
        CHECK_MESSAGE(eta_dd_sign(c, w) == -expected, "n=" << n);
    }
}

TEST_CASE("eta'' and lambda'' signs are tied through the bifurcation condition") {
    int compared = 0;
    for (int n = 2; n <= 14; ++n) {
        for (const auto& F : all_presets(n)) {
            const auto rc = r_crit_find(*F, n, 1.0, {1e-3, 1e3});
            if (!rc) continue;
            const auto c = bif_shape_coefficients(*F, n, rc->eta);
            const double bc = bif_condition(rc->eta, *F, n);
            for (int b = 0; b < n; ++b) {
                const WeightModel w = WeightModel::mixed(n, b);
                const int eta_s = eta_dd_sign(c, w), lam_s = lambda_dd_sign(c, w);
                if (eta_s == 0 || lam_s == 0) continue;
                CHECK_MESSAGE(lam_s == -eta_s * (bc > 0 ? 1 : -1), F->name() << " n=" << n << " b=" << b);
                ++compared;
            }
        }
    }
    CHECK(compared > 300);
}

TEST_CASE("homogeneous condition for the mean-curvature flow") {
    for (int n = 2; n <= 30; ++n) {
        const double v = homog_condition(n, 1.0, 1.0, 1.0, 0.0, 0.0, WeightModel::volume(n), 1.0);
        CHECK(v == doctest::Approx(-(n * n - 10.0 * n - 2.0)).epsilon(1e-12));
        for (int b = 0; b < n; ++b) {
            const double h = homog_condition(n, 1.0, 1.0, 1.0, 0.0, 0.0, WeightModel::mixed(n, b), 1.7);
            const Rational mv = mixed_volume_condition(n, b);
            const int exact = mv > 0 ? 1 : (mv < 0 ? -1 : 0);
            const int approx = std::abs(h) < 1e-9 ? 0 : (h > 0 ? 1 : -1);
            CHECK_MESSAGE(approx == exact, "n=" << n << " b=" << b);
        }
    }
    CHECK(homog_condition(11, 1.0, 1.0, 1.0, 0.0, 0.0, WeightModel::volume(11), 1.0) < 0);
}

TEST_CASE("homogeneous condition agrees in sign with the general bracket") {
    for (int n = 2; n <= 30; ++n) {
        for (const auto& F : {make_mean_curvature(n), make_mean_curvature_pow(n, 2.0), make_mean_curvature_pow(n, 0.5)}) {
            const double k = *F->homogeneity_degree();
            const EtaProfile one = F->eta_profile(1.0);
            const auto rc = r_crit_find(*F, n, 1.0, {1e-3, 1e3});
            REQUIRE(rc);
            const auto c = bif_shape_coefficients(*F, n, rc->eta);
            for (int b = 0; b < n; b += 3) {
                const WeightModel w = WeightModel::mixed(n, b);
                const double h = homog_condition(n, k, one.F1, one.Fn, one.Fnn, one.Fnnn, w, 1.0);
                const int lam = lambda_dd_sign(c, w);
                if (lam == 0) continue;
                CHECK_MESSAGE((h < 0) == (lam < 0), F->name() << " n=" << n << " b=" << b);
            }
        }
    }
}

TEST_CASE("exact mixed-volume condition") {
    CHECK(mixed_volume_condition(10, 0) == Rational(2));
    CHECK(mixed_volume_condition(11, 0) == Rational(-9));
    CHECK(mixed_volume_condition(12, 4) < 0);
    CHECK_THROWS_AS(mixed_volume_condition(5, 5), DomainError);
    // Direct evaluation of the cubic over n - b as a second opinion.
    for (int n = 2; n <= 30; ++n)
        for (int b = 0; b < n; ++b) {
            const long long num = -(1LL * n * n * n - (b + 10LL) * n * n + 2LL * (5 * b - 1) * n - 2LL * b * (3 * b - 4));
            CHECK(mixed_volume_condition(n, b) == Rational(num, n - b));
        }
}

TEST_CASE("real root of the threshold cubic") {
    for (int b = 2; b <= 50; ++b) {
        const GammaRoot g = gamma_root(b);
        CHECK(std::abs(g.residual) <= 1e-10);
        const double x = g.value;
        CHECK(std::abs(x * x * x - (b + 10.0) * x * x + 2.0 * (5 * b - 1) * x - 2.0 * b * (3 * b - 4)) < 1e-8 * x * x * x);
        if (b >= 9) {
            CHECK(b + 5 < x);
            CHECK(x < b + 6);
        }
        if (b <= 12) CHECK(std::abs(x - gamma_radical(b)) < 1e-8);
    }
    const double g2 = gamma_root(2).value;
    CHECK(g2 > 10);
    CHECK(g2 < 11);
}

TEST_CASE("stability table") {
    const auto table = stability_table(30, 12);
    auto find = [&](int n, int b) {
        for (const auto& e : table)
            if (e.n == n && e.b == b) return e;
        FAIL("missing entry");
        return StabilityTableEntry{};
    };
    CHECK(find(13, 6).stable);
    CHECK_FALSE(find(12, 6).stable);
    CHECK(find(15, 9).stable);
    for (const auto& e : table) {
        CHECK(e.b < e.n);
        CHECK(e.stable == (e.value < 0));
    }
}

TEST_CASE("finite-difference linearisation") {
    const int n = 2;
    const double d = 1.0;
    const GridCalculus g(64, d);
    const auto F = make_mean_curvature(n);
    const double eta0 = pi;
    for (double f : {0.8, 1.0, 1.2}) {
        const auto resp = jacobian_fd(f * eta0, *F, WeightModel::volume(n), g, {1, 2, 3, 4, 5});
        REQUIRE(resp.size() == 5);
        for (const auto& r : resp) {
            const double lam = linear_eigenvalue(r.m, f * eta0, *F, n, d);
            const double scale = std::max(std::abs(lam), std::pow(r.m * pi / d, 2));
            CHECK(std::abs(r.rayleigh - lam) / scale < 1e-6);
            CHECK(r.off_mode < 1e-6);
        }
    }
}

TEST_CASE("polynomial example changes stability of mode one at eta = 3") {
    const auto F = make_polynomial_example(4, 1.0, 1);
    CHECK(linear_eigenvalue(1, 2.9, *F, 4, 1.0) * linear_eigenvalue(1, 3.1, *F, 4, 1.0) < 0);
    const GridCalculus g(64, 1.0);
    const WeightModel w = WeightModel::volume(4);
    const double below = jacobian_fd(2.9, *F, w, g, {1})[0].rayleigh;
    const double above = jacobian_fd(3.1, *F, w, g, {1})[0].rayleigh;
    CHECK(below * above < 0);
}

TEST_CASE("homogeneous speeds: the m-th critical eta zeroes lambda_m") {
    for (int n : {3, 5})
        for (const auto& F : {make_mean_curvature(n), make_mean_curvature_pow(n, 2.0), make_elementary(n, 2)}) {
            const EtaProfile one = F->eta_profile(1.0);
            for (int m = 1; m <= 3; ++m) {
                const double eta_m = m * pi / 1.2 * std::sqrt((n - 1) * one.Fn / one.F1);
                const double scale = std::abs(F->eta_profile(eta_m).Fn) * std::pow(m * pi / 1.2, 2);
                CHECK(std::abs(linear_eigenvalue(m, eta_m, *F, n, 1.2)) < 1e-12 * scale);
            }
        }
}

TEST_CASE("stability report and condition chain") {
    for (int n : {5, 10, 11, 20}) {
        const auto F = make_mean_curvature(n);
        const auto rep = stability_report(*F, WeightModel::volume(n), n, 1.0, {1e-3, 1e3});
        CHECK((rep.verdict == Verdict::Stable) == (rep.lambda_dd_sign == -1));
        CHECK((rep.verdict == Verdict::Stable) == (n >= 11));
        CHECK(rep.lambda.size() == 5);
        CHECK(std::abs(rep.lambda[0].second) < 1e-10);
        CHECK_FALSE(rep.provenance.empty());
        const auto chain = condition_chain(*F, WeightModel::mixed(n, 2), n, 1.0, {1e-3, 1e3});
        CHECK(chain.homogeneous);
        CHECK(chain.mixed_volume);
        CHECK(chain.consistent());
    }
    CHECK(to_string(Verdict::Stable) == "stable");
    CHECK_THROWS_AS(condition_chain(*make_polynomial_example(4, 1.0, 2), WeightModel::volume(4), 4, 1.0, {0.1, 100}),
                    DegeneracyError);
}
