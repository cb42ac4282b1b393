#include "curvlab/reduction.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {

double qtilde(double eta, const WeightModel& w, int n) {
    if (!(eta > 0.0)) throw DomainError("qtilde: eta must be positive");
    if (w.n() != n) throw DomainError("qtilde: weight dimension does not match n");
    const double m = n - 1;
    double s = 0.0;
    for (int a = 0; a <= n; ++a) {
        const double ca = w.coeff(a);
        if (ca != 0.0) s += ca * std::pow(m, n - a) * binomial_d(n, a) * std::pow(eta, a - n);
    }
    return s;
}

double qtilde_prime(double eta, const WeightModel& w, int n) {
    if (!(eta > 0.0)) throw DomainError("qtilde_prime: eta must be positive");
    const double m = n - 1;
    return -n * std::pow(m, n) / std::pow(eta, n + 1) * w.at_cylinder(m / eta);
}

double qtilde_inv(double x, const WeightModel& w, int n, Bracket b) {
    if (!(b.lo > 0.0) || !(b.hi > b.lo)) throw DomainError("qtilde_inv: invalid bracket");
    // Strict monotonicity: the derivative keeps one sign across the bracket.
    constexpr int kProbe = 64;
    int sign = 0;
    for (int i = 0; i <= kProbe; ++i) {
        const double eta = b.lo * std::pow(b.hi / b.lo, static_cast<double>(i) / kProbe);
        const double dq = qtilde_prime(eta, w, n);
        const int sg = dq > 0 ? 1 : (dq < 0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign)) throw DomainError("qtilde_inv: qtilde is not monotone on the bracket");
        sign = sg;
    }
    const double qlo = qtilde(b.lo, w, n), qhi = qtilde(b.hi, w, n);
    const double fmin = std::min(qlo, qhi), fmax = std::max(qlo, qhi);
    if (x < fmin || x > fmax) throw RangeError("qtilde_inv: value outside the image of the bracket");

    auto f = [&](double eta) { return std::make_pair(qtilde(eta, w, n) - x, qtilde_prime(eta, w, n)); };
    const double guess = 0.5 * (b.lo + b.hi);
    std::uintmax_t iters = 200;
    double eta = boost::math::tools::newton_raphson_iterate(f, guess, b.lo, b.hi,
                                                            std::numeric_limits<double>::digits - 2, iters);
    const double tol = 1e-12 * std::max(1.0, std::abs(x));
    // Polish: a couple of plain Newton steps from the bracketed answer.
    for (int k = 0; k < 3 && std::abs(qtilde(eta, w, n) - x) > tol; ++k) {
        const auto [r, dr] = f(eta);
        const double next = eta - r / dr;
        if (next > b.lo && next < b.hi) eta = next;
    }
    const double res = std::abs(qtilde(eta, w, n) - x);
    if (res > tol) throw ConvergenceError("qtilde_inv: residual above tolerance", res, static_cast<int>(iters));
    return eta;
}

double qtilde_inv_near(double x, const WeightModel& w, int n, double guess) {
    if (!(guess > 0.0)) throw DomainError("qtilde_inv_near: guess must be positive");
    double factor = 10.0;
    for (int attempt = 0; attempt <= 4; ++attempt) {
        try {
            return qtilde_inv(x, w, n, {guess / factor, guess * factor});
        } catch (const RangeError&) {
            factor *= 10.0;
        }
    }
    throw RangeError("qtilde_inv_near: value not attained after widening the bracket");
}

PsiResult psi_solve_detailed(const ReducedState& s, int n, double d, const WeightModel& w, const GridCalculus& g,
                             std::optional<double> offset_guess) {
    if (!(s.eta > 0.0)) throw DomainError("psi_solve: eta must be positive");
    if (static_cast<int>(s.ubar.size()) != g.size()) throw DomainError("psi_solve: ubar size does not match grid");
    const double target = qtilde(s.eta, w, n);
    const double umin = *std::min_element(s.ubar.begin(), s.ubar.end());
    // Offsets must keep the profile strictly positive.
    const double c_floor = -umin;

    RadialProfile p{n, d, s.ubar};
    auto set_offset = [&](double c) {
        for (std::size_t j = 0; j < p.values.size(); ++j) p.values[j] = s.ubar[j] + c;
    };
    auto residual_and_slope = [&](double c) {
        set_offset(c);
        const double r = g.mean(q_density(p, w, g)) - target;
        // d/dc of the circle mean of Q is n * mean(Xi u^(n-1)).
        const SurfaceFields f = surface_fields(p, g);
        Vec xi_u(p.values.size());
        for (std::size_t j = 0; j < xi_u.size(); ++j) {
            const double xi = w.eval(f.kappa[j]);
            if (!(xi > 0.0))
                throw ConvergenceError("psi_solve: weight Xi is not positive along the Newton path", std::abs(r), 0);
            xi_u[j] = xi * std::pow(p.values[j], n - 1);
        }
        return std::make_pair(r, n * g.mean(xi_u));
    };

    double c = offset_guess.value_or((n - 1) / s.eta);
    if (c <= c_floor) c = c_floor + std::abs(c_floor) * 0.5 + 1e-3;
    const double tol = 1e-13 * std::max(1.0, std::abs(target));
    double lo = c_floor, hi = std::numeric_limits<double>::infinity();
    double r = 0.0;
    int it = 0;
    for (; it < 100; ++it) {
        const auto [res, slope] = residual_and_slope(c);
        r = res;
        if (std::abs(r) <= tol) break;
        // The mean of Q increases with the offset while Xi > 0, so the sign of
        // the residual tells which side of the root we are on.
        if (r > 0)
            hi = std::min(hi, c);
        else
            lo = std::max(lo, c);
        double next = c - r / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : (c > 0 ? 2.0 * c : c + 1.0);
        }
        if (std::abs(next - c) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(c)) {
            c = next;
            r = residual_and_slope(c).first;
            break;
        }
        c = next;
    }
    set_offset(c);
    if (std::abs(r) > 1e-11 * std::max(1.0, std::abs(target)))
        throw ConvergenceError("psi_solve: Newton iteration did not converge (residual " + std::to_string(r) + ")",
                               std::abs(r), it);
    return {p, c, std::abs(r), it};
}

RadialProfile psi_solve(const ReducedState& s, int n, double d, const WeightModel& w, const GridCalculus& g) {
    return psi_solve_detailed(s, n, d, w, g).profile;
}

ReducedState psi_inverse(const RadialProfile& p, const WeightModel& w, const GridCalculus& g) {
    const double mq = g.mean(q_density(p, w, g));
    double mean_r = g.mean(p.values);
    const double eta = qtilde_inv_near(mq, w, p.n, (p.n - 1) / mean_r);
    return {g.project_meanzero(p.values), eta};
}

Vec full_rhs(const RadialProfile& p, const SpeedModel& speed, const WeightModel& w, const GridCalculus& g) {
    if (speed.n() != p.n || w.n() != p.n) throw DomainError("full_rhs: dimension mismatch");
    const SurfaceFields f = surface_fields(p, g);
    const int N = p.size();
    Vec F(N), xi_mu(N), fxi_mu(N);
    for (int j = 0; j < N; ++j) {
        F[j] = speed.eval(f.kappa[j]);
        const double mu = std::pow(p.values[j], p.n - 1) * f.L[j];
        xi_mu[j] = w.eval(f.kappa[j]) * mu;
        fxi_mu[j] = F[j] * xi_mu[j];
    }
    const double area = g.integrate(xi_mu);
    if (!(std::abs(area) > 1e-300) || !std::isfinite(area))
        throw DegeneracyError("full_rhs: Xi-weighted area vanishes");
    const double avg = g.integrate(fxi_mu) / area;
    Vec G(N);
    for (int j = 0; j < N; ++j) G[j] = f.L[j] * (avg - F[j]);
    return G;
}

Vec reduced_rhs(const ReducedState& s, int n, double d, const SpeedModel& speed, const WeightModel& w,
                const GridCalculus& g) {
    const RadialProfile u = psi_solve(s, n, d, w, g);
    return g.project_meanzero(full_rhs(u, speed, w, g));
}

}  // namespace curvlab
