#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>

#include <curvlab/errors.hpp>
#include <curvlab/flow.hpp>
#include <curvlab/reduction.hpp>
#include <curvlab/stability.hpp>
#include <curvlab/unduloid.hpp>

#include "commands.hpp"
#include "output.hpp"

namespace curvlab::cli {
namespace {

struct Criterion {
    std::string id;
    std::string description;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

using Check = std::function<Criterion(std::mt19937_64&)>;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Bullet list for mixed-volume stability of the mean-curvature flow.
bool expected_stable(int n, int b) {
    if (b <= 3) return n >= 11;
    if (b <= 5) return n >= 12;
    if (b <= 8) return n >= b + 7;
    return n >= b + 6;
}

Criterion table_bullets(std::mt19937_64&) {
    int mismatches = 0;
    for (const auto& e : stability_table(30, 12))
        if (e.stable != expected_stable(e.n, e.b)) ++mismatches;
    return {"stability-table", "stability_table(30,12) matches the four threshold bullets", double(mismatches), 0,
            mismatches == 0, ""};
}

Criterion vpmcf_threshold(std::mt19937_64&) {
    int bad = 0;
    for (int b : {0, 1}) {
        if (!(mixed_volume_condition(10, b) > 0)) ++bad;
        if (!(mixed_volume_condition(11, b) < 0)) ++bad;
    }
    return {"vpmcf-threshold", "mixed-volume condition positive at n=10, negative at n=11 (b=0,1)", double(bad), 0,
            bad == 0, ""};
}

Criterion gamma_brackets(std::mt19937_64&) {
    double worst = 0.0;
    bool inside = true;
    for (int b = 9; b <= 50; ++b) {
        const GammaRoot g = gamma_root(b);
        inside = inside && b + 5 < g.value && g.value < b + 6;
        worst = std::max(worst, std::abs(g.residual));
    }
    return {"gamma-brackets", "b+5 < gamma(b) < b+6 for b=9..50; max cubic residual", worst, 1e-10,
            inside && worst <= 1e-10, inside ? "" : "bracket violated"};
}

Criterion gamma_radical_agreement(std::mt19937_64&) {
    double worst = 0.0;
    for (int b = 2; b <= 12; ++b) worst = std::max(worst, std::abs(gamma_root(b).value - gamma_radical(b)));
    return {"gamma-radical", "root finder vs closed-form radical, b=2..12", worst, 1e-8, worst <= 1e-8, ""};
}

Criterion rcrit_vpmcf(std::mt19937_64&) {
    double worst = 0.0;
    for (int n = 2; n <= 13; ++n)
        for (double d : {0.5, 1.0, 2.0}) {
            const auto c = r_crit_find(*make_mean_curvature(n), n, d, {1e-3, 1e3});
            if (!c) return {"rcrit-vpmcf", "critical radius d sqrt(n-1)/pi", 1.0, 1e-12, false, "no root"};
            worst = std::max(worst, rel(c->R_crit, d * std::sqrt(n - 1.0) / std::numbers::pi));
        }
    return {"rcrit-vpmcf", "critical radius d sqrt(n-1)/pi, n=2..13, d in {0.5,1,2}", worst, 1e-12, worst <= 1e-12,
            ""};
}

Criterion rcrit_examples(std::mt19937_64&) {
    const auto one = r_crit_find(*make_polynomial_example(4, 1.0, 1), 4, 1.0, {0.1, 100});
    const auto two = r_crit_find(*make_polynomial_example(4, 1.0, 2), 4, 1.0, {0.1, 100});
    const double err = one ? std::abs(one->R_crit - 1.0) : 1.0;
    const bool ok = one && err <= 1e-10 && !two;
    return {"rcrit-polynomial-examples", "polynomial example 1 has R_crit = 1; example 2 has no root on [0.1, 100]",
            err, 1e-10, ok, two ? "example 2 unexpectedly has a root" : ""};
}

Criterion census(std::mt19937_64&) {
    const auto grid = uniform_grid(200, 0.02, 0.95);
    int bad = 0;
    std::string detail;
    for (auto [n, want] : {std::pair{7, 0}, std::pair{8, 2}, std::pair{11, 1}}) {
        const int got = static_cast<int>(turning_points(n, 0, grid).size());
        detail += "n=" + std::to_string(n) + ":" + std::to_string(got) + " ";
        if (got != want) ++bad;
    }
    return {"turning-point-census", "interior turning points of eta_bar (n=7,8,11 -> 0,2,1)", double(bad), 0, bad == 0,
            detail};
}

FlowConfig vpmcf_fixture(int N, double t_end, double tol) {
    FlowConfig f;
    f.n = 2;
    f.d = 1.0;
    f.N = N;
    f.speed = make_mean_curvature(2);
    f.weight = WeightModel::volume(2);
    f.initial.R = 1.2 / std::numbers::pi;
    f.initial.modes = {{1, 0.05}};
    f.t_end = t_end;
    f.rtol = f.atol = tol;
    f.record_every = 0.05;
    return f;
}

Criterion cylinder_equilibrium(std::mt19937_64&) {
    FlowConfig f = vpmcf_fixture(64, 0.5, 1e-10);
    f.initial.R = 1.0;
    f.initial.modes.clear();
    const Trajectory t = integrate(f);
    double dev = 0.0;
    for (double v : t.sup_dev) dev = std::max(dev, v);
    const double drift = conservation_drift(t);
    // Spectral second derivatives turn rounding in a constant into noise of
    // size (pi N)^2 eps, so the profile stays constant only to about 1e-10.
    return {"cylinder-equilibrium", "cylinder stays put: weighted-volume drift (sup deviation in detail, bound 1e-9)",
            drift, 1e-12, drift <= 1e-12 && dev <= 1e-9, "sup_dev=" + format_number(dev)};
}

Criterion vpmcf_drift(std::mt19937_64&) {
    const double drift = conservation_drift(integrate(vpmcf_fixture(64, 0.5, 1e-10)));
    return {"wvol-drift", "relative weighted-volume drift, n=2 stable fixture (N=64, t<=0.5)", drift, 1e-6,
            drift <= 1e-6, ""};
}

Criterion drift_refinement(std::mt19937_64&) {
    const double coarse = conservation_drift(integrate(vpmcf_fixture(64, 0.5, 1e-3)));
    const double fine = conservation_drift(integrate(vpmcf_fixture(64, 0.5, 1e-9)));
    return {"drift-refinement", "drift at rtol=1e-9 does not exceed drift at rtol=1e-3 (fine/coarse)",
            fine / std::max(coarse, 1e-300), 1.0, fine <= coarse,
            "coarse=" + format_number(coarse) + " fine=" + format_number(fine)};
}

Criterion q_identity(std::mt19937_64& rng) {
    const int n = 3, N = 128;
    const double d = 1.0;
    const GridCalculus g(N, d);
    std::uniform_real_distribution<double> amp(-0.05, 0.05);
    const std::vector<WeightModel> weights = {WeightModel::mixed(n, 0), WeightModel::mixed(n, 1),
                                              WeightModel({1.0, 1.0, 0.0, 0.0})};
    double worst = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
        std::vector<double> a(5), c(5);
        for (auto& x : a) x = amp(rng);
        for (auto& x : c) x = 10 * amp(rng);
        auto series = [&](const std::vector<double>& co, double base) {
            return g.sample([&](double z) {
                double v = base;
                for (int k = 1; k < 5; ++k) v += co[k] * std::cos(k * std::numbers::pi * z / d);
                return v;
            });
        };
        const Vec u = series(a, 1.0), v = series(c, c[0]);
        for (const auto& w : weights) {
            auto wvol = [&](double eps) {
                RadialProfile p{n, d, u};
                for (int j = 0; j < N; ++j) p.values[j] += eps * v[j];
                return weighted_volume(p, w, g);
            };
            auto central = [&](double h) { return (wvol(h) - wvol(-h)) / (2 * h); };
            const double h = 1e-3;
            const double fd = (4 * central(h / 2) - central(h)) / 3;
            const RadialProfile p{n, d, u};
            const SurfaceFields f = surface_fields(p, g);
            Vec integrand(N);
            for (int j = 0; j < N; ++j) integrand[j] = v[j] * w.eval(f.kappa[j]) * std::pow(u[j], n - 1);
            const double exact = 2.0 * n * g.integrate(integrand);
            worst = std::max(worst, rel(fd, exact));
        }
    }
    return {"q-identity", "Gateaux derivative of the weighted volume vs n * pairing with Xi u^(n-1), 20 random pairs",
            worst, 1e-7, worst <= 1e-7, ""};
}

Criterion eta_dd_vs_quadrature(std::mt19937_64&) {
    const double h = 0.01;
    int bad = 0, checked = 0;
    std::string detail;
    for (int b : {0, 1})
        for (int n = 2; n <= 13; ++n) {
            if (b > n - 1) continue;
            auto eb = [&](double s) { return eta_curve({n, 1.0, s}, b).eta_bar; };
            const double second = eb(3 * h) - 2 * eb(2 * h) + eb(h);
            const int quad_sign = second > 0 ? 1 : (second < 0 ? -1 : 0);
            const auto speed = make_mean_curvature(n);
            const double eta0 = critical_eta(n, 1.0);
            const int formula = eta_dd_sign(bif_shape_coefficients(*speed, n, eta0), WeightModel::mixed(n, b));
            ++checked;
            if (quad_sign != formula) {
                ++bad;
                detail += "(n=" + std::to_string(n) + ",b=" + std::to_string(b) + ") ";
            }
        }
    return {"eta-dd-sign", "sign of eta'' from the closed form vs second difference of eta_bar, b=0,1, n=2..13",
            double(bad), 0, bad == 0, detail.empty() ? std::to_string(checked) + " cases" : detail};
}

Criterion chain(std::mt19937_64&) {
    int bad = 0, checked = 0;
    for (int n = 2; n <= 30; ++n) {
        std::vector<std::string> specs = {"mean-curvature", "mean-curvature-pow:2", "mean-curvature-pow:0.5",
                                          "remark-example-1", "remark-example-2"};
        for (int r = 1; r <= n; ++r) specs.push_back("elementary:" + std::to_string(r));
        for (const auto& spec : specs) {
            const auto speed = make_speed(spec, n, 1.0);
            for (int b = 0; b < n; ++b) {
                try {
                    if (!condition_chain(*speed, WeightModel::mixed(n, b), n, 1.0, {1e-3, 1e3}).consistent()) ++bad;
                    ++checked;
                } catch (const DegeneracyError&) {
                    // No critical radius: nothing to compare.
                }
            }
        }
    }
    return {"condition-chain", "general, homogeneous and mixed-volume verdicts agree, n=2..30, all presets",
            double(bad), 0, bad == 0, std::to_string(checked) + " combinations"};
}

Criterion jacobian(std::mt19937_64&) {
    const int n = 2;
    const double d = 1.0;
    const GridCalculus g(64, d);
    const auto speed = make_mean_curvature(n);
    const WeightModel w = WeightModel::volume(n);
    const double eta0 = critical_eta(n, d);
    double worst = 0.0;
    for (double f : {0.8, 1.0, 1.2}) {
        const double eta = f * eta0;
        const auto resp = jacobian_fd(eta, *speed, w, g, {1, 2, 3, 4, 5});
        for (const auto& r : resp) {
            const double lam = linear_eigenvalue(r.m, eta, *speed, n, d);
            const double k = r.m * std::numbers::pi / d;
            const double scale = std::max(std::abs(lam), speed->eta_profile(eta).Fn * k * k);
            worst = std::max(worst, std::abs(r.rayleigh - lam) / scale);
        }
    }
    return {"jacobian-fd", "finite-difference linearisation vs closed-form eigenvalues, n=2, m=1..5", worst, 1e-6,
            worst <= 1e-6, ""};
}

Criterion stationarity(std::mt19937_64&) {
    const int n = 2;
    const GridCalculus g(256, 1.0);
    const RadialProfile p = unduloid_profile({n, 1.0, 0.1}, 256);
    const Vec G = full_rhs(p, *make_mean_curvature(n), WeightModel::volume(n), g);
    double m = 0.0;
    for (double v : G) m = std::max(m, std::abs(v));
    return {"unduloid-stationary", "sup |full_rhs| on the reconstructed unduloid, n=2, s=0.1, N=256", m, 1e-5,
            m <= 1e-5, ""};
}

Criterion eta_vs_wvol(std::mt19937_64&) {
    const int n = 3;
    const double s = 0.3;
    const GridCalculus g(256, 1.0);
    const RadialProfile p = unduloid_profile({n, 1.0, s}, 256);
    double worst = 0.0;
    for (int b = 0; b <= n - 1; ++b) {
        const WeightModel w = WeightModel::mixed(n, b);
        const double eta_q = eta_curve({n, 1.0, s}, b).eta;
        const double eta_w = qtilde_inv_near(g.mean(q_density(p, w, g)), w, n, eta_q);
        worst = std::max(worst, rel(eta_w, eta_q));
    }
    return {"eta-vs-weighted-volume", "eta(s) by quadrature vs inverse of the mean weighted volume, n=3, s=0.3",
            worst, 1e-6, worst <= 1e-6, ""};
}

const std::map<std::string, std::vector<Check>>& suites() {
    static const std::map<std::string, std::vector<Check>> table = {
        {"paper-tables",
         {table_bullets, vpmcf_threshold, gamma_brackets, gamma_radical_agreement, rcrit_vpmcf, rcrit_examples, census}},
        {"conservation", {cylinder_equilibrium, vpmcf_drift, drift_refinement, q_identity}},
        {"cross-validation", {eta_dd_vs_quadrature, chain, jacobian, stationarity, eta_vs_wvol}},
    };
    return table;
}

}  // namespace

int cmd_verify(const Options& o) {
    const std::string suite = o.suite.value_or("all");
    std::vector<std::string> names;
    if (suite == "all") {
        for (const auto& [k, v] : suites()) names.push_back(k);
    } else if (suites().count(suite)) {
        names.push_back(suite);
    } else {
        std::cerr << "curvlab verify: unknown suite '" << suite
                  << "' (expected paper-tables, conservation, cross-validation or all)\n";
        return kExitUsage;
    }
    const long long seed = o.seed.value_or(20240601);
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    nlohmann::ordered_json report;
    report["suite"] = suite;
    report["seed"] = seed;
    report["criteria"] = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& name : names) {
        for (const auto& check : suites().at(name)) {
            Criterion c;
            try {
                c = check(rng);
            } catch (const std::exception& e) {
                c.id = "error";
                c.description = e.what();
                c.measured = std::nan("");
                c.pass = false;
            }
            all = all && c.pass;
            nlohmann::ordered_json j;
            j["suite"] = name;
            j["id"] = c.id;
            j["description"] = c.description;
            j["measured"] = c.measured;
            j["tolerance"] = c.tolerance;
            j["pass"] = c.pass;
            if (!c.detail.empty()) j["detail"] = c.detail;
            report["criteria"].push_back(j);
        }
    }
    report["all_pass"] = all;
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (o.out) {
        atomic_write(*o.out, text);
        RunManifest m;
        m.command = "verify";
        m.params = {{"suite", suite}};
        m.seed = seed;
        m.outputs.push_back(*o.out);
        m.write(*o.out + ".manifest.json");
    }
    return all ? kExitOk : kExitUsage;
}

}  // namespace curvlab::cli
