#include "curvlab/stability.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {
namespace {

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

double linear_eigenvalue(int m, double eta, const SpeedModel& speed, int n, double d) {
    if (m < 1) throw DomainError("linear_eigenvalue: mode index must be at least 1");
    if (!(eta > 0.0)) throw DomainError("linear_eigenvalue: eta must be positive");
    const EtaProfile p = speed.eta_profile(eta);
    const double k = m * std::numbers::pi / d;
    return -p.Fn * k * k + eta * eta * p.F1 / (n - 1);
}

double critical_function(double eta, const SpeedModel& speed, int n, double d) {
    return linear_eigenvalue(1, eta, speed, n, d);
}

std::optional<CriticalRadius> r_crit_find(const SpeedModel& speed, int n, double d, Bracket b, int scan_points) {
    if (!(b.lo > 0.0) || !(b.hi > b.lo)) throw DomainError("r_crit_find: bracket must lie in (0, inf)");
    auto f = [&](double eta) { return critical_function(eta, speed, n, d); };

    // Geometric scan for sign changes, then refine each one.
    std::vector<std::pair<double, double>> brackets;
    double prev_x = b.lo, prev_f = f(b.lo);
    std::vector<double> exact_roots;
    if (prev_f == 0.0) exact_roots.push_back(prev_x);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = b.lo * std::pow(b.hi / b.lo, static_cast<double>(i) / scan_points);
        const double fx = f(x);
        if (fx == 0.0)
            exact_roots.push_back(x);
        else if (prev_f != 0.0 && sign_of(fx) != sign_of(prev_f))
            brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    std::vector<double> roots = exact_roots;
    for (auto [lo, hi] : brackets) {
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
        roots.push_back(0.5 * (r.first + r.second));
    }
    if (roots.empty()) return std::nullopt;
    if (roots.size() > 1) {
        std::ostringstream os;
        os << "r_crit_find: " << roots.size() << " sign changes in bracket at eta =";
        for (double r : roots) os << ' ' << r;
        throw AmbiguityError(os.str(), roots);
    }
    const double eta = roots.front();
    const EtaProfile p = speed.eta_profile(eta);
    CriticalRadius c;
    c.eta = eta;
    c.R_crit = (n - 1) / eta;
    c.residual = std::abs(f(eta));
    c.scale = std::abs(eta * eta * p.F1 / (n - 1)) + std::abs(std::numbers::pi * std::numbers::pi / (d * d) * p.Fn);
    return c;
}

double bif_condition(double eta, const SpeedModel& speed, int /*n*/) {
    const EtaProfile p = speed.eta_profile(eta);
    if (p.Fn == 0.0) throw DegeneracyError("bif_condition: Fn vanishes");
    return 2.0 * p.F1 + eta * (p.F1p - p.F1 * p.Fnp / p.Fn);
}

BifShapeCoefficients bif_shape_coefficients(const SpeedModel& speed, int n, double eta0) {
    BifShapeCoefficients c;
    c.n = n;
    c.eta0 = eta0;
    c.F = speed.eta_profile(eta0);
    const EtaProfile& F = c.F;
    if (F.Fn == 0.0 || F.F1 == 0.0) throw DegeneracyError("bif_shape_coefficients: F1 or Fn vanishes at eta0");
    const double e = eta0, e2 = e * e, m = n - 1, m2 = m * m;
    const double F1 = F.F1, Fn = F.Fn, Fn2 = Fn * Fn, Fn3 = Fn2 * Fn, Fn4 = Fn3 * Fn;
    const double F12 = F1 * F1, F13 = F12 * F1;

    c.script_F = 3 * e2 * F.F1pp / m2 - 9 * e2 * F1 * F.Fnpp / (m2 * Fn) + 9 * e2 * F12 * F.Fnnp / (m2 * Fn2) -
                 3 * e2 * F13 * F.Fnnn / (m2 * Fn3) + e2 * F.F1p * F.F1p / (m2 * F1) -
                 7 * e2 * F.F1p * F.Fnp / (m2 * Fn) + 5 * e2 * F1 * F.F1p * F.Fnn / (m2 * Fn2) +
                 10 * e2 * F1 * F.Fnp * F.Fnp / (m2 * Fn2) - 13 * e2 * F12 * F.Fnp * F.Fnn / (m2 * Fn3) +
                 4 * e2 * F13 * F.Fnn * F.Fnn / (m2 * Fn4) + 2 * (3 * n + 8) * e * F.F1p / m2 -
                 4 * e * F1 * F.F1p / (m * Fn) - 2 * (3 * n + 13) * e * F1 * F.Fnp / (m2 * Fn) +
                 2 * e * F12 * F.Fnp / (m * Fn2) + 10 * e * F12 * F.Fnn / (m2 * Fn2) +
                 2 * e * F13 * F.Fnn / (m * Fn3) + 2 * (6 * n + 5) * F1 / m2 + 4 * F12 / (m * Fn) - 2 * F13 / Fn2;

    c.script_F1 = e * F.F1p / m - 2 * e * F1 * F.Fnp / (m * Fn) + e * F12 * F.Fnn / (m * Fn2) + 2 * F1 / m;
    c.script_F2 = e * F.F1p / m - 5 * e * F1 * F.Fnp / (m * Fn) + 4 * e * F12 * F.Fnn / (m * Fn2) + 2 * F1 / m;
    c.script_F3 = e2 * F.F1pp / m - 3 * e2 * F1 * F.Fnpp / (m * Fn) + 3 * e2 * F12 * F.Fnnp / (m * Fn2) -
                  e2 * F13 * F.Fnnn / (m * Fn3) + 6 * e * F.F1p / m - 6 * e * F1 * F.Fnp / (m * Fn) + 6 * F1 / m;
    c.script_F4 = -e * F1 * F.F1p / Fn + e * F12 * F.Fnp / Fn2 + 2 * F12 / Fn;
    return c;
}

double script_F_from_parts(const BifShapeCoefficients& c) {
    const EtaProfile& F = c.F;
    const double e = c.eta0, m = c.n - 1;
    // The extra terms are twice the bifurcation bracket 2 F1 + eta (F1' - F1 Fn' / Fn).
    const double cubic = 3 * F.F1 / m *
                         (c.script_F3 + c.script_F4 + 2 * e * F.F1p - 2 * e * F.F1 * F.Fnp / F.Fn + 4 * F.F1);
    const double quadratic = (c.script_F1 + F.F1 * F.F1 / F.Fn) * (c.script_F2 - 2 * F.F1 * F.F1 / F.Fn);
    return (cubic + quadratic) / F.F1;
}

double weight_correction(const BifShapeCoefficients& c, const WeightModel& w) {
    const int n = c.n;
    if (w.n() != n) throw DomainError("weight_correction: weight dimension does not match n");
    const double m = n - 1;
    const double t = c.eta0 / m;  // curvature of the critical cylinder
    double s1 = 0.0, s0 = 0.0;
    for (int a = 0; a <= n; ++a) {
        const double ca = w.coeff(a);
        if (ca == 0.0) continue;
        const double ta = std::pow(t, a);
        s0 += ca * ta * binomial_d(n - 1, a);
        if (a >= 1) s1 += ca * ta * (binomial_d(n - 2, a - 1) - c.F.F1 / c.F.Fn * binomial_d(n - 1, a - 1));
    }
    if (s0 == 0.0) throw DegeneracyError("weight_correction: weight sum vanishes at the critical cylinder");
    return 6.0 * s1 / (m * s0);
}

namespace {
double bc_of(const BifShapeCoefficients& c) {
    const EtaProfile& F = c.F;
    return 2.0 * F.F1 + c.eta0 * (F.F1p - F.F1 * F.Fnp / F.Fn);
}

// Brackets below this fraction of the size of their own terms are treated as
// zero; several integer-coefficient presets cancel exactly.
constexpr double kCancellationTolerance = 1e-10;

int sign_with_tolerance(double v, double magnitude) {
    return std::abs(v) <= kCancellationTolerance * magnitude ? 0 : sign_of(v);
}

// Sum of absolute values of the terms that make up 6 S1/((n-1) S0) * |scale|.
double weight_correction_magnitude(const BifShapeCoefficients& c, const WeightModel& w) {
    const int n = c.n;
    const double t = c.eta0 / (n - 1);
    const double r = std::abs(c.F.F1 / c.F.Fn);
    double s1 = 0.0, s0 = 0.0;
    for (int a = 0; a <= n; ++a) {
        const double ca = w.coeff(a);
        if (ca == 0.0) continue;
        const double ta = std::pow(t, a);
        s0 += ca * ta * binomial_d(n - 1, a);
        if (a >= 1) s1 += std::abs(ca * ta) * (binomial_d(n - 2, a - 1) + r * binomial_d(n - 1, a - 1));
    }
    return 6.0 * s1 / ((n - 1) * std::abs(s0));
}

double script_F_magnitude(const BifShapeCoefficients& c) {
    const EtaProfile& F = c.F;
    const double e = std::abs(c.eta0), m = c.n - 1;
    const double q = F.F1 * F.F1 / std::abs(F.Fn);
    const double cubic = 3 * std::abs(F.F1) / m *
                         (std::abs(c.script_F3) + std::abs(c.script_F4) + 2 * e * std::abs(F.F1p) +
                          2 * e * std::abs(F.F1 * F.F1p / F.Fn) + 4 * std::abs(F.F1));
    const double quadratic = (std::abs(c.script_F1) + q) * (std::abs(c.script_F2) + 2 * q);
    return (cubic + quadratic) / std::abs(F.F1) + std::abs(c.script_F);
}

double bc_magnitude(const BifShapeCoefficients& c) {
    const EtaProfile& F = c.F;
    return 2.0 * std::abs(F.F1) + std::abs(c.eta0) * (std::abs(F.F1p) + std::abs(F.F1 * F.Fnp / F.Fn));
}
}  // namespace

double eta_dd_bracket(const BifShapeCoefficients& c, const WeightModel& w) {
    const double bc = bc_of(c);
    if (bc == 0.0) throw DegeneracyError("eta_dd_bracket: bifurcation condition vanishes");
    return c.script_F / bc - weight_correction(c, w);
}

int eta_dd_sign(const BifShapeCoefficients& c, const WeightModel& w) {
    const double magnitude = script_F_magnitude(c) / std::abs(bc_of(c)) + weight_correction_magnitude(c, w);
    return -sign_with_tolerance(eta_dd_bracket(c, w), magnitude);
}

double lambda_dd_bracket(const BifShapeCoefficients& c, const WeightModel& w) {
    return c.script_F - weight_correction(c, w) * bc_of(c);
}

int lambda_dd_sign(const BifShapeCoefficients& c, const WeightModel& w) {
    const double magnitude = script_F_magnitude(c) + weight_correction_magnitude(c, w) * bc_magnitude(c);
    return sign_with_tolerance(lambda_dd_bracket(c, w), magnitude);
}

namespace {
// Value and term magnitude of the homogeneous stability condition.
std::pair<double, double> homog_terms(int n, double k, double F1, double Fn, double Fnn, double Fnnn,
                                      const WeightModel& w, double d) {
    if (F1 == 0.0 || Fn == 0.0) throw DegeneracyError("homog_condition: F1 or Fn vanishes");
    if (w.n() != n) throw DomainError("homog_condition: weight dimension does not match n");
    const double m = n - 1;
    // pi/d * sqrt(Fn/((n-1) F1)) is the curvature of the critical cylinder.
    const double t = std::numbers::pi / d * std::sqrt(Fn / (m * F1));
    double num = 0.0, num_abs = 0.0, den = 0.0;
    for (int a = 0; a <= n; ++a) {
        const double ca = w.coeff(a);
        if (ca == 0.0) continue;
        const double ta = std::pow(t, a);
        den += ca * ta * binomial_d(n - 1, a);
        if (a >= 1) {
            num += ca * ta * (binomial_d(n - 2, a - 1) - F1 / Fn * binomial_d(n - 1, a - 1));
            num_abs += std::abs(ca * ta) * (binomial_d(n - 2, a - 1) + std::abs(F1 / Fn) * binomial_d(n - 1, a - 1));
        }
    }
    if (den == 0.0) throw DegeneracyError("homog_condition: weight sum vanishes");
    const double r = F1 / Fn;
    // The k F1 Fnn term carries Fn^2 in its denominator. With a single Fn the
    // condition would change under F -> alpha F, which leaves the flow's
    // stationary set and stability unchanged.
    const std::array<double, 9> terms = {-6.0 * m * num / den,
                                          -k * k,
                                          6.0 * n + 6.0,
                                          -1.5 * r * r * Fnnn / Fn,
                                          2.0 * r * r * Fnn * Fnn / (Fn * Fn),
                                          0.5 * k * r * Fnn / Fn,
                                          m * r * r * Fnn / Fn,
                                          -m * m * r * r,
                                          -m * (k - 3.0) * r};
    double value = 0.0, magnitude = 6.0 * m * num_abs / std::abs(den);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        value += terms[i];
        if (i > 0) magnitude += std::abs(terms[i]);
    }
    return {value, magnitude};
}
}  // namespace

double homog_condition(int n, double k, double F1, double Fn, double Fnn, double Fnnn, const WeightModel& w,
                       double d) {
    return homog_terms(n, k, F1, Fn, Fnn, Fnnn, w, d).first;
}

Rational mixed_volume_condition(int n, int b) {
    if (b < 0 || b >= n) throw DomainError("mixed_volume_condition: need 0 <= b <= n-1");
    const long long N = n, B = b;
    const long long cubic = N * N * N - (B + 10) * N * N + 2 * (5 * B - 1) * N - 2 * B * (3 * B - 4);
    return Rational(-cubic, N - B);
}

namespace {
long double gamma_cubic(long double x, int b) {
    const long double B = b;
    return ((x - (B + 10)) * x + 2 * (5 * B - 1)) * x - 2 * B * (3 * B - 4);
}
}  // namespace

double gamma_radical(int b) {
    const double B = b;
    const double disc = 2 * std::pow(B, 5) + 40 * std::pow(B, 4) - 288 * B * B * B + 1733 * B * B - 2540 * B - 36;
    if (disc < 0) throw DomainError("gamma_radical: radicand negative; the radical form needs b >= 2");
    const double C = std::cbrt(B * B * B + 66 * B * B - 249 * B + 1090 + 9 * std::sqrt(disc));
    return (B + 10 + (B * B - 10 * B + 106) / C + C) / 3.0;
}

GammaRoot gamma_root(int b) {
    if (b < 2) throw DomainError("gamma_root: need b >= 2");
    long double lo = 0.0L, hi = b + 20.0L;
    while (gamma_cubic(hi, b) <= 0) hi *= 2;
    auto f = [b](long double x) { return gamma_cubic(x, b); };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<long double>(), iters);
    long double x = 0.5L * (r.first + r.second);
    // The cubic has a single real root, so the bracket [0, hi] cannot hide a
    // second one. A final Newton step removes the bracket-midpoint bias.
    const long double B = b;
    const long double dp = (3 * x - 2 * (B + 10)) * x + 2 * (5 * B - 1);
    if (dp != 0) x -= gamma_cubic(x, b) / dp;
    GammaRoot g;
    g.value = static_cast<double>(x);
    g.residual = static_cast<double>(std::fabs(gamma_cubic(static_cast<long double>(g.value), b)));
    g.radical = gamma_radical(b);
    return g;
}

std::vector<StabilityTableEntry> stability_table(int n_max, int b_max) {
    if (n_max < 2 || b_max < 0) throw DomainError("stability_table: need n_max >= 2 and b_max >= 0");
    std::vector<StabilityTableEntry> rows;
    for (int n = 2; n <= n_max; ++n) {
        for (int b = 0; b <= std::min(b_max, n - 1); ++b) {
            const Rational v = mixed_volume_condition(n, b);
            rows.push_back({n, b, v, v < Rational(0)});
        }
    }
    return rows;
}

std::vector<ModeResponse> jacobian_fd(double eta, const SpeedModel& speed, const WeightModel& w,
                                      const GridCalculus& g, const std::vector<int>& modes) {
    const int n = speed.n();
    const double d = g.width();
    const double R = (n - 1) / eta;
    const EtaProfile F = speed.eta_profile(eta);
    std::vector<ModeResponse> out;
    constexpr int kLadder = 14;
    for (int m : modes) {
        const Vec v = g.sample([&](double z) { return std::cos(m * std::numbers::pi * z / d); });
        const double vv = g.dot(v, v);
        auto response = [&](double amp) {
            Vec up(v), dn(v);
            for (auto& x : up) x *= amp;
            for (auto& x : dn) x *= -amp;
            const Vec rp = reduced_rhs({up, eta}, n, d, speed, w, g);
            const Vec rm = reduced_rhs({dn, eta}, n, d, speed, w, g);
            Vec D(rp.size());
            for (std::size_t j = 0; j < D.size(); ++j) D[j] = (rp[j] - rm[j]) / (2.0 * amp);
            return D;
        };
        std::vector<Vec> D;
        std::vector<double> amps;
        // Largest step keeps both the radius and the added meridian curvature
        // within ten percent of the cylinder's, so curvature weights stay positive.
        const double kw = m * std::numbers::pi / d;
        const double amp0 = 0.1 * std::min(R, 1.0 / (R * kw * kw));
        for (int k = 0; k <= kLadder; ++k) {
            amps.push_back(amp0 * std::pow(0.5, k));
            D.push_back(response(amps.back()));
        }
        std::vector<Vec> E;
        std::vector<double> ray;
        for (int k = 0; k < kLadder; ++k) {
            Vec e(D[k].size());
            for (std::size_t j = 0; j < e.size(); ++j) e[j] = (4.0 * D[k + 1][j] - D[k][j]) / 3.0;
            ray.push_back(g.dot(e, v) / vv);
            E.push_back(std::move(e));
        }
        int best = 0;
        double gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k + 1 < kLadder; ++k) {
            const double dk = std::abs(ray[k] - ray[k + 1]);
            if (dk < gap) {
                gap = dk;
                best = k;
            }
        }
        const double lam = ray[best];
        const double kk = m * std::numbers::pi / d;
        const double scale = std::max(std::abs(lam), std::abs(F.Fn) * kk * kk);
        Vec resid(E[best]);
        for (std::size_t j = 0; j < resid.size(); ++j) resid[j] -= lam * v[j];
        ModeResponse r;
        r.m = m;
        r.rayleigh = lam;
        r.off_mode = std::sqrt(g.dot(resid, resid) / vv) / scale;
        r.step = amps[best + 1];
        r.richardson_gap = gap;
        out.push_back(r);
    }
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        default: return "degenerate";
    }
}

StabilityReport stability_report(const SpeedModel& speed, const WeightModel& w, int n, double d, Bracket bracket,
                                 int max_mode) {
    StabilityReport r;
    r.n = n;
    r.d = d;
    r.speed = speed.name();
    {
        std::ostringstream os;
        for (int a = 0; a <= w.n(); ++a) os << (a ? "," : "") << w.coeff(a);
        r.weight = os.str();
    }
    const auto crit = r_crit_find(speed, n, d, bracket);
    if (!crit) {
        r.verdict = Verdict::Degenerate;
        r.provenance.emplace_back("R_crit", "no sign change of lambda_1(eta) in the bracket");
        return r;
    }
    r.R_crit = crit->R_crit;
    r.eta0 = crit->eta;
    r.provenance.emplace_back("R_crit", "toms748 root of lambda_1(eta), R = (n-1)/eta");
    for (int m = 1; m <= max_mode; ++m) r.lambda.emplace_back(m, linear_eigenvalue(m, r.eta0, speed, n, d));
    r.provenance.emplace_back("lambda", "closed form -Fn (m pi/d)^2 + eta^2 F1/(n-1)");
    r.bif_cond_value = bif_condition(r.eta0, speed, n);
    r.provenance.emplace_back("bif_cond_value", "2 F1 + eta (F1' - F1 Fn'/Fn) from the eta profile");
    try {
        const BifShapeCoefficients c = bif_shape_coefficients(speed, n, r.eta0);
        r.eta_dd_bracket = eta_dd_bracket(c, w);
        r.lambda_dd_bracket = lambda_dd_bracket(c, w);
        r.eta_dd_sign = eta_dd_sign(c, w);
        r.lambda_dd_sign = lambda_dd_sign(c, w);
        r.provenance.emplace_back("eta_dd_sign", "minus the sign of script_F/BC - 6 S1/((n-1) S0)");
        r.provenance.emplace_back("lambda_dd_sign", "sign of script_F - 6 S1/((n-1) S0) * BC");
        r.verdict = r.lambda_dd_sign < 0 ? Verdict::Stable : (r.lambda_dd_sign > 0 ? Verdict::Unstable : Verdict::Degenerate);
    } catch (const DegeneracyError& e) {
        r.verdict = Verdict::Degenerate;
        r.provenance.emplace_back("verdict", e.what());
    }
    return r;
}

namespace {
Verdict verdict_from_sign(int sign) {
    return sign < 0 ? Verdict::Stable : (sign > 0 ? Verdict::Unstable : Verdict::Degenerate);
}
}  // namespace

ConditionChain condition_chain(const SpeedModel& speed, const WeightModel& w, int n, double d, Bracket bracket) {
    const auto crit = r_crit_find(speed, n, d, bracket);
    if (!crit) throw DegeneracyError("condition_chain: no critical radius in the bracket");
    ConditionChain c;
    c.eta0 = crit->eta;
    c.general = verdict_from_sign(lambda_dd_sign(bif_shape_coefficients(speed, n, c.eta0), w));
    if (const auto k = speed.homogeneity_degree()) {
        // The homogeneous form is written with the profile constants at eta = 1.
        const EtaProfile u = speed.eta_profile(1.0);
        const auto [value, magnitude] = homog_terms(n, *k, u.F1, u.Fn, u.Fnn, u.Fnnn, w, d);
        c.homogeneous = verdict_from_sign(sign_with_tolerance(value, magnitude));
    }
    const int b = w.mixed_index();
    if (b >= 0 && speed.name() == "mean-curvature") {
        const Rational v = mixed_volume_condition(n, b);
        c.mixed_volume = v < 0 ? Verdict::Stable : (v > 0 ? Verdict::Unstable : Verdict::Degenerate);
    }
    return c;
}

}  // namespace curvlab
