#include <doctest.h>

#include <cmath>
#include <random>

#include <curvlab/errors.hpp>
#include <curvlab/flow.hpp>
#include <curvlab/reduction.hpp>
#include <curvlab/stability.hpp>
#include <curvlab/unduloid.hpp>

#include "oracles.hpp"

using namespace curvlab;
using oracle::pi;

namespace {

FlowConfig mcf(int n, double R, std::vector<std::pair<int, double>> modes, int N = 48, double t_end = 0.3,
               double tol = 1e-8) {
    FlowConfig f;
    f.n = n;
    f.d = 1.0;
    f.N = N;
    f.speed = make_mean_curvature(n);
    f.weight = WeightModel::volume(n);
    f.initial.R = R;
    f.initial.modes = std::move(modes);
    f.t_end = t_end;
    f.rtol = f.atol = tol;
    f.record_every = 0.02;
    return f;
}

double critical_radius(int n) { return std::sqrt(n - 1.0) / pi; }

}  // namespace

TEST_CASE("configuration validation") {
    FlowConfig f = mcf(2, 1.0, {});
    CHECK_NOTHROW(validate(f));
    f.rtol = 1e-1;
    CHECK_THROWS_AS(validate(f), DomainError);
    f = mcf(2, 1.0, {});
    f.atol = 1e-15;
    CHECK_THROWS_AS(validate(f), DomainError);
    f = mcf(2, 1.0, {});
    f.t_end = 0.0;
    CHECK_THROWS_AS(validate(f), DomainError);
    f = mcf(2, 1.0, {});
    f.speed.reset();
    CHECK_THROWS_AS(validate(f), DomainError);
    f = mcf(3, 1.0, {});
    f.weight = WeightModel::volume(2);
    CHECK_THROWS_AS(validate(f), DomainError);
}

TEST_CASE("initial profiles") {
    InitialCondition ic;
    ic.R = 0.7;
    ic.modes = {{1, 0.1}, {3, -0.02}};
    const RadialProfile p = make_initial_profile(ic, 3, 1.0, 33);
    CHECK(p.values[0] == doctest::Approx(0.7 * (1 + 0.1 - 0.02)));
    CHECK(p.values[16] == doctest::Approx(0.7));
    ic.family = InitialCondition::Family::Unduloid;
    ic.s = 0.2;
    ic.modes.clear();
    const RadialProfile u = make_initial_profile(ic, 3, 1.0, 64);
    CHECK(u.values.front() == doctest::Approx(rho0({3, 1.0, 0.2})).epsilon(1e-9));
}

TEST_CASE("a cylinder does not move") {
    // The explicit stepper runs at its stability limit here, so round-off is
    // amplified up to roughly the error tolerance but no further.
    const Trajectory t = integrate(mcf(3, 1.0, {}, 32, 0.2, 1e-11));
    REQUIRE(t.times.size() >= 10);
    CHECK(t.termination == Termination::Completed);
    CHECK(conservation_drift(t) < 1e-12);
    for (double v : t.sup_dev) CHECK(v < 1e-9);
    CHECK_THROWS_AS(decay_rate_fit(t, 0.0, 0.05), InsufficientDataError);
    CHECK(equivalence_check(mcf(3, 1.0, {}, 32, 0.1, 1e-11)) < 1e-9);
}

TEST_CASE("records are strictly increasing and land on the output times") {
    const Trajectory t = integrate(mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 32, 0.2));
    REQUIRE(t.times.size() == 11);
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        CHECK(t.times[i] == doctest::Approx(0.02 * i).epsilon(1e-12));
        CHECK(std::isfinite(t.wvol[i]));
        CHECK(t.states[i].size() == 32);
    }
    CHECK(t.stats.accepted > 0);
    CHECK(t.stats.rhs_evaluations >= 6 * t.stats.accepted);
}

TEST_CASE("rate fit of an exact exponential") {
    Trajectory t;
    for (int i = 0; i <= 20; ++i) {
        t.times.push_back(0.05 * i);
        t.sup_dev.push_back(3.0 * std::exp(-2.0 * t.times.back()));
    }
    const LineFit f = decay_rate_fit(t, 0.0, 1.0);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(f.residual_rms < 1e-12);
    CHECK_THROWS_AS(decay_rate_fit(t, 0.0, 0.15), InsufficientDataError);
}

TEST_CASE("stable side decays at the linear rate, unstable side grows") {
    const double Rs = 1.2 * critical_radius(2);
    const Trajectory s = integrate(mcf(2, Rs, {{1, 0.05}}, 48, 1.0, 1e-9));
    const LineFit fs = decay_rate_fit(s, 0.2, 1.0);
    const double lam_s = linear_eigenvalue(1, 1.0 / Rs, *make_mean_curvature(2), 2, 1.0);
    CHECK(std::abs(fs.slope - lam_s) < 0.03 * std::abs(lam_s));
    for (std::size_t i = s.sup_dev.size() / 2; i + 1 < s.sup_dev.size(); ++i) CHECK(s.sup_dev[i + 1] < s.sup_dev[i]);

    const double Ru = 0.8 * critical_radius(2);
    FlowConfig cu = mcf(2, Ru, {{1, 1e-3}}, 48, 0.3, 1e-10);
    const Trajectory u = integrate(cu);
    CHECK(u.sup_dev[1] > u.sup_dev[0]);
    CHECK(u.sup_dev[2] > u.sup_dev[1]);
}

TEST_CASE("weighted volume is conserved and drift shrinks with the tolerance") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> amp(0.02, 0.06), sign(-1.0, 1.0);
    for (int seed = 0; seed < 3; ++seed) {
        const double a1 = amp(rng) * (sign(rng) > 0 ? 1 : -1), a2 = 0.5 * amp(rng) * (sign(rng) > 0 ? 1 : -1);
        FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, a1}, {2, a2}}, 32, 0.3, 1e-4);
        const double coarse = conservation_drift(integrate(f));
        f.rtol = f.atol = 5e-5;
        const double half = conservation_drift(integrate(f));
        CHECK_MESSAGE(half <= 2 * coarse, "seed " << seed << ": " << coarse << " -> " << half);
        f.rtol = f.atol = 1e-9;
        CHECK(conservation_drift(integrate(f)) < 1e-8);
    }
    FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 32, 0.3, 1e-3);
    const double coarse = conservation_drift(integrate(f));
    f.rtol = f.atol = 1e-9;
    CHECK(conservation_drift(integrate(f)) < coarse);
}

TEST_CASE("mirror symmetry about the midpoint is preserved") {
    // Only even modes: the profile is symmetric about z = d/2.
    const Trajectory t = integrate(mcf(3, 1.2 * critical_radius(3), {{2, 0.05}, {4, 0.01}}, 49, 0.2));
    for (const auto& p : t.states) CHECK(mirror_asymmetry(p) < 1e-12);
    // A generic profile is not symmetric, and the doubled unduloid is.
    CHECK(mirror_asymmetry(t.states.front()) < 1e-14);
    CHECK(mirror_asymmetry(integrate(mcf(2, 0.5, {{1, 0.05}}, 32, 0.02)).states.back()) > 1e-3);
    const RadialProfile doubled = reflect_concatenate(unduloid_profile({2, 0.5, 0.2}, 33), 2);
    CHECK(mirror_asymmetry(doubled) == 0.0);
}

TEST_CASE("full and reduced modes agree") {
    FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 32, 0.3, 1e-10);
    CHECK(equivalence_check(f) < 1e-6);
    FlowConfig g = mcf(3, 1.2 * critical_radius(3), {{1, 0.05}}, 32, 0.3, 1e-10);
    g.weight = WeightModel::mixed(3, 1);
    CHECK(equivalence_check(g) < 1e-6);
    g.mode = FlowMode::Reduced;
    const Trajectory t = integrate(g);
    for (double e : t.eta) CHECK(e == doctest::Approx(t.eta.front()).epsilon(1e-14));
    CHECK(conservation_drift(t) < 1e-9);
}

TEST_CASE("semi-implicit splitting tracks the explicit stepper") {
    FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 64, 0.2, 1e-8);
    const Trajectory a = integrate(f);
    f.semi_implicit = true;
    const Trajectory b = integrate(f);
    REQUIRE(a.times.size() == b.times.size());
    CHECK(oracle::max_diff(a.states.back().values, b.states.back().values) < 1e-5);
    CHECK(conservation_drift(b) < 1e-6);
}

TEST_CASE("finite-difference mode agrees with the spectral mode") {
    FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 128, 0.1, 1e-9);
    const Trajectory a = integrate(f);
    f.diff_mode = DiffMode::FiniteDifference4;
    const Trajectory b = integrate(f);
    CHECK(oracle::max_diff(a.states.back().values, b.states.back().values) < 1e-5);
}

TEST_CASE("events stop the run with a reason") {
    FlowConfig a = mcf(2, 0.5 * critical_radius(2), {{1, 0.5}}, 64, 1.0, 1e-6);
    a.record_every = 0.01;
    const Trajectory ta = integrate(a);
    CHECK(ta.termination == Termination::AxisApproach);
    CHECK(to_string(ta.termination) == "min-rho");
    CHECK(ta.times.back() < 1.0);

    // Xi = 1 - 0.05 E_1 turns negative once the neck curvature exceeds 20.
    FlowConfig b = a;
    b.weight = WeightModel({1.0, -0.05, 0.0});
    const Trajectory tb = integrate(b);
    CHECK(tb.termination == Termination::WeightNonPositive);
    CHECK(to_string(tb.termination) == "xi-nonpositive");
    CHECK_FALSE(tb.message.empty());
}

TEST_CASE("step budget exhaustion carries the last state") {
    FlowConfig f = mcf(2, 1.2 * critical_radius(2), {{1, 0.05}}, 32, 1.0, 1e-10);
    f.max_steps = 3;
    try {
        (void)integrate(f);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.last_state().size() == 32);
        CHECK(e.time() >= 0.0);
    }
}

TEST_CASE("an unduloid is stationary under the flow") {
    FlowConfig f = mcf(2, 1.0, {}, 64, 0.1, 1e-9);
    f.initial.family = InitialCondition::Family::Unduloid;
    f.initial.s = 0.2;
    const Trajectory t = integrate(f);
    CHECK(oracle::max_diff(t.states.front().values, t.states.back().values) < 1e-4);
}
