#include "curvlab/unduloid.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {
namespace {

using Poly = std::vector<__int128>;  // integer coefficients in s, lowest first

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

Poly poly_axpy(__int128 alpha, const Poly& a, __int128 beta, const Poly& b) {
    Poly c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += alpha * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += beta * b[i];
    return c;
}

// (1 + sign*s)^p
Poly binomial_poly(int p, int sign) {
    Poly c(p + 1);
    for (int j = 0; j <= p; ++j) c[j] = static_cast<__int128>(binomial(p, j)) * ((sign < 0 && (j & 1)) ? -1 : 1);
    return c;
}

// (1+s)^p - (1-s)^p, with its exact cancellation done in integers.
Poly odd_difference(int p) { return poly_axpy(1, binomial_poly(p, 1), -1, binomial_poly(p, -1)); }

long double poly_eval(const Poly& c, long double s) {
    long double v = 0.0L;
    for (std::size_t i = c.size(); i-- > 0;) v = v * s + static_cast<long double>(c[i]);
    return v;
}

// Pointwise quantities of the arc-length integrand, given the distances to
// both ends of the interval. h = P x^(n-1) - D(x) vanishes at both ends and is
// evaluated from its Taylor coefficients about the nearer end.
struct Local {
    long double x, D, h, q, dh;
};

class Algebra {
public:
    explicit Algebra(const UnduloidParams& p) : n_(p.n) {
        if (p.n < 2 || p.n > kMaxUnduloidDimension) throw DomainError("unduloid: dimension n must be in [2, 40]");
        if (!(p.s > 0.0 && p.s < 1.0)) throw DomainError("unduloid: need 0 < s < 1");
        if (!(p.d > 0.0)) throw DomainError("unduloid: width must be positive");
        const int n = p.n;
        const long double s = p.s;
        s_ = s;
        Xm1_ = 2.0L * s / (1.0L - s);
        X_ = 1.0L + Xm1_;
        const Poly P = odd_difference(n), Q = odd_difference(n - 1);
        P_ = poly_eval(P, s);
        Q_ = poly_eval(Q, s);
        Qc_ = Q_ * (1.0L - s);
        D0_ = 2.0L * s * std::pow(1.0L + s, n - 1);
        const Poly one_minus = binomial_poly(1, -1);
        const Poly Qm = poly_mul(Q, one_minus);
        hL_.assign(n + 1, 0.0L);
        hR_.assign(n + 1, 0.0L);
        for (int k = 1; k <= n; ++k) {
            // Left: h(1+t) = sum_k [C(n-1,k) P - C(n,k) (1-s) Q] t^k.
            hL_[k] = poly_eval(poly_axpy(binomial(n - 1, k), P, -binomial(n, k), Qm), s);
            // Right: h(X-t) = sum_k hR_k t^k with
            // hR_k = (-1)^k [C(n-1,k) P (1+s)^(n-1-k) - C(n,k) Q (1+s)^(n-k)] (1-s)^(k+1-n).
            Poly a = k <= n - 1 ? poly_mul(P, binomial_poly(n - 1 - k, 1)) : Poly{0};
            Poly b = poly_mul(Q, binomial_poly(n - k, 1));
            const long double bracket = poly_eval(poly_axpy(binomial(n - 1, k), a, -binomial(n, k), b), s);
            hR_[k] = ((k & 1) ? -1.0L : 1.0L) * bracket * std::pow(1.0L - s, k + 1 - n);
        }
    }

    int n() const { return n_; }
    long double X() const { return X_; }
    long double width() const { return Xm1_; }
    long double P() const { return P_; }
    long double Q() const { return Q_; }
    long double s() const { return s_; }

    Local at(long double tL, long double tR) const {
        Local L;
        const bool left = tL <= tR;
        L.x = left ? 1.0L + tL : X_ - tR;
        L.D = D0_ + Qc_ * std::pow(L.x, n_);
        const auto& c = left ? hL_ : hR_;
        const long double t = left ? tL : tR;
        // h = t * inner(t), inner = sum_{k>=1} c_k t^(k-1); also dh/dt.
        long double inner = 0.0L, dinner = 0.0L;
        for (int k = n_; k >= 1; --k) {
            dinner = dinner * t + inner;
            inner = inner * t + c[k];
        }
        L.h = t * inner;
        const long double dh_dt = inner + t * dinner;
        L.dh = left ? dh_dt : -dh_dt;
        L.q = inner / (left ? tR : tL);
        return L;
    }

    // g = D / sqrt(h (h + 2D)) with h = tL tR q.
    long double g(const Local& L, long double tL, long double tR) const {
        return L.D / std::sqrt(tL * tR * L.q * (L.h + 2.0L * L.D));
    }
    // g * sqrt(tL tR): smooth across both ends.
    long double g_regular(const Local& L) const { return L.D / std::sqrt(L.q * (L.h + 2.0L * L.D)); }

    long double r(const Local& L) const { return 1.0L + L.h / L.D; }
    long double dr(const Local& L) const {
        const long double dD = n_ * Qc_ * std::pow(L.x, n_ - 1);
        return (L.dh * L.D - L.h * dD) / (L.D * L.D);
    }

private:
    int n_;
    long double s_ = 0, X_ = 0, Xm1_ = 0, P_ = 0, Q_ = 0, Qc_ = 0, D0_ = 0;
    std::vector<long double> hL_, hR_;
};

// Ratio integrand/g for the three integrals in the bifurcation formula:
// b < 0 selects the plain length integral, b = 0 the x^n moment, b >= 1 the
// mixed-volume integrand.
long double weight_factor(const Algebra& A, const Local& L, int b) {
    const int n = A.n();
    if (b < 0) return 1.0L;
    if (b == 0) return std::pow(L.x, n);
    const long double r = A.r(L);
    const long double t1 = std::pow(L.x, n - b) * std::pow(r, 2 - b);
    const long double t2 =
        (b - 1) * std::pow(L.x, n + 1 - b) * (-A.dr(L) * std::pow(r, 1 - b)) / static_cast<long double>(n + 1 - b);
    return t1 + t2;
}

constexpr double kTanhSinhTolerance = 1e-13;
constexpr double kAccuracyLimit = 1e-9;

QuadratureResult integrate_tanh_sinh(const Algebra& A, int b) {
    const long double W = A.width();
    auto f = [&](double /*x*/, double xc) -> double {
        long double tL, tR;
        if (xc < 0) {
            tL = -static_cast<long double>(xc);
            tR = W - tL;
        } else {
            tR = xc;
            tL = W - tR;
        }
        const Local L = A.at(tL, tR);
        return static_cast<double>(A.g(L, tL, tR) * weight_factor(A, L, b));
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    const double v = ts.integrate(f, 1.0, static_cast<double>(A.X()), kTanhSinhTolerance, &err, &l1);
    if (!std::isfinite(v) || err > kAccuracyLimit * std::abs(v))
        throw AccuracyError("unduloid: tanh-sinh quadrature did not reach the accuracy target", err / std::abs(v));
    return {v, err};
}

// Trapezoid rule in theta for x = 1 + (X-1)(1 - cos theta)/2; the integrand
// becomes an even, periodic, analytic function of theta.
QuadratureResult integrate_theta(const Algebra& A, int b) {
    const long double W = A.width();
    auto F = [&](long double theta) {
        const long double sh = std::sin(0.5L * theta), ch = std::cos(0.5L * theta);
        const long double tL = W * sh * sh, tR = W * ch * ch;
        const Local L = A.at(tL, tR);
        return A.g_regular(L) * weight_factor(A, L, b);
    };
    const long double pi = std::numbers::pi_v<long double>;
    int M = 32;
    long double sum = 0.5L * (F(0.0L) + F(pi));
    for (int i = 1; i < M; ++i) sum += F(pi * i / M);
    long double T = sum * pi / M;
    for (int level = 0; level < 12; ++level) {
        for (int i = 1; i < 2 * M; i += 2) sum += F(pi * i / (2 * M));
        M *= 2;
        const long double T2 = sum * pi / M;
        const long double diff = std::fabs(T2 - T);
        T = T2;
        if (diff <= 1e-15L * std::fabs(T)) return {static_cast<double>(T), static_cast<double>(diff)};
    }
    throw AccuracyError("unduloid: theta trapezoid rule did not converge", 1.0);
}

double eta_from_integrals(int n, int b, double d, double J, double I) {
    return (n - 1) / d * std::pow(std::pow(J, n + 1 - b) / I, 1.0 / (n - b));
}

void check_b(int n, int b) {
    if (b < 0 || b > n - 1) throw DomainError("eta_curve: need 0 <= b <= n-1");
}

}  // namespace

double unduloid_upper(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("unduloid: need 0 < s < 1");
    return (1.0 + s) / (1.0 - s);
}

double g_s(double x, const UnduloidParams& p) {
    const Algebra A(p);
    const long double tL = static_cast<long double>(x) - 1.0L, tR = A.X() - x;
    if (!(tL > 0.0L && tR > 0.0L)) throw DomainError("g_s: x must lie strictly inside (1, (1+s)/(1-s))");
    return static_cast<double>(A.g(A.at(tL, tR), tL, tR));
}

double g_s_prime(double x, const UnduloidParams& p) {
    const Algebra A(p);
    const long double tL = static_cast<long double>(x) - 1.0L, tR = A.X() - x;
    if (!(tL > 0.0L && tR > 0.0L)) throw DomainError("g_s_prime: x must lie strictly inside (1, (1+s)/(1-s))");
    const Local L = A.at(tL, tR);
    const long double g = A.g(L, tL, tR);
    return static_cast<double>(-A.r(L) * A.dr(L) * g * g * g);
}

QuadratureResult unduloid_length_integral(const UnduloidParams& p) { return integrate_tanh_sinh(Algebra(p), -1); }

QuadratureResult unduloid_length_integral_spectral(const UnduloidParams& p) { return integrate_theta(Algebra(p), -1); }

double rho0(const UnduloidParams& p) { return p.d / unduloid_length_integral(p).value; }

double mean_curvature(const UnduloidParams& p) {
    const Algebra A(p);
    const double r0 = p.d / integrate_tanh_sinh(A, -1).value;
    return static_cast<double>(A.Q() / A.P()) * p.n * (1.0 - p.s) / r0;
}

double critical_eta(int n, double d) { return std::numbers::pi * std::sqrt(static_cast<double>(n - 1)) / d; }

BifurcationSample eta_curve(const UnduloidParams& p, int b) {
    check_b(p.n, b);
    const Algebra A(p);
    const QuadratureResult J = integrate_tanh_sinh(A, -1);
    const QuadratureResult I = integrate_tanh_sinh(A, b);
    BifurcationSample out;
    out.s = p.s;
    out.eta = eta_from_integrals(p.n, b, p.d, J.value, I.value);
    out.eta_bar = out.eta / critical_eta(p.n, p.d);
    out.rho0 = p.d / J.value;
    out.H = static_cast<double>(A.Q() / A.P()) * p.n * (1.0 - p.s) / out.rho0;
    out.quadrature_error_estimate =
        ((p.n + 1 - b) * J.error / std::abs(J.value) + I.error / std::abs(I.value)) / (p.n - b);
    return out;
}

double eta_curve_spectral(const UnduloidParams& p, int b) {
    check_b(p.n, b);
    const Algebra A(p);
    return eta_from_integrals(p.n, b, p.d, integrate_theta(A, -1).value, integrate_theta(A, b).value);
}

RadialProfile unduloid_profile(const UnduloidParams& p, int N) {
    if (N < 16) throw DomainError("unduloid_profile: need at least 16 nodes");
    const Algebra A(p);
    const long double W = A.width();
    auto Phi = [&](double theta) {
        const double sh = std::sin(0.5 * theta), ch = std::cos(0.5 * theta);
        return static_cast<double>(A.g_regular(A.at(W * sh * sh, W * ch * ch)));
    };
    // Cosine series of the smooth theta-integrand; refine until the tail is
    // at rounding level.
    Vec a;
    for (int M = 64;; M *= 2) {
        const GridCalculus theta_grid(M + 1, std::numbers::pi);
        a = theta_grid.cosine_coefficients(theta_grid.sample(Phi));
        double tail = 0.0;
        for (int k = M - 7; k <= M; ++k) tail = std::max(tail, std::abs(a[k]));
        if (tail <= 1e-16 * std::abs(a[0])) break;
        if (M >= (1 << 16)) throw AccuracyError("unduloid_profile: cosine series did not converge", tail / a[0]);
    }
    const int K = static_cast<int>(a.size()) - 1;
    const double r0 = p.d / (std::numbers::pi * a[0]);
    auto z_of = [&](double th) {
        double v = a[0] * th;
        for (int k = 1; k <= K; ++k) v += a[k] * std::sin(k * th) / k;
        return r0 * v;
    };
    auto dz_of = [&](double th) {
        double v = 0.0;
        for (int k = 0; k <= K; ++k) v += a[k] * std::cos(k * th);
        return r0 * v;
    };

    RadialProfile prof{p.n, p.d, Vec(N)};
    const double Wd = static_cast<double>(W);
    for (int j = 0; j < N; ++j) {
        const double zj = p.d * j / (N - 1);
        double th;
        if (j == 0)
            th = 0.0;
        else if (j == N - 1)
            th = std::numbers::pi;
        else {
            // z(theta) is increasing; safeguarded Newton inside [lo, hi].
            double lo = 0.0, hi = std::numbers::pi;
            th = std::numbers::pi * zj / p.d;
            for (int it = 0; it < 100; ++it) {
                const double f = z_of(th) - zj;
                if (f > 0) hi = th; else lo = th;
                double next = th - f / dz_of(th);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (std::abs(next - th) <= 1e-15 * std::max(1.0, th)) {
                    th = next;
                    break;
                }
                th = next;
            }
        }
        const double sh = std::sin(0.5 * th);
        prof.values[j] = r0 * (1.0 + Wd * sh * sh);
    }
    check_profile(prof);
    return prof;
}

RadialProfile reflect_concatenate(const RadialProfile& half, int copies) {
    if (copies < 1) throw DomainError("reflect_concatenate: need at least one copy");
    const int N = half.size();
    RadialProfile out{half.n, half.d * copies, Vec()};
    out.values.reserve(static_cast<std::size_t>(copies) * (N - 1) + 1);
    for (int c = 0; c < copies; ++c) {
        for (int j = 0; j < N - 1; ++j) out.values.push_back(c % 2 == 0 ? half.values[j] : half.values[N - 1 - j]);
    }
    out.values.push_back(copies % 2 == 1 ? half.values.back() : half.values.front());
    return out;
}

std::vector<TurningPoint> turning_points_from_values(const std::vector<double>& s, const std::vector<double>& v) {
    if (s.size() != v.size() || s.size() < 3) throw DomainError("turning_points: need matching grids of size >= 3");
    std::vector<double> ds, mid;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        ds.push_back((v[i + 1] - v[i - 1]) / (s[i + 1] - s[i - 1]));
        mid.push_back(s[i]);
    }
    std::vector<TurningPoint> out;
    for (std::size_t i = 1; i < ds.size(); ++i) {
        if (ds[i - 1] > 0 && ds[i] <= 0 && !(ds[i] == 0 && i + 1 < ds.size() && ds[i + 1] > 0))
            out.push_back({0.5 * (mid[i - 1] + mid[i]), "max"});
        else if (ds[i - 1] < 0 && ds[i] >= 0 && !(ds[i] == 0 && i + 1 < ds.size() && ds[i + 1] < 0))
            out.push_back({0.5 * (mid[i - 1] + mid[i]), "min"});
    }
    return out;
}

std::vector<TurningPoint> turning_points(int n, int b, const std::vector<double>& s_grid, double d) {
    if (s_grid.size() < 100) throw DomainError("turning_points: need at least 100 samples");
    std::vector<double> v;
    v.reserve(s_grid.size());
    for (double s : s_grid) v.push_back(eta_curve({n, d, s}, b).eta_bar);
    return turning_points_from_values(s_grid, v);
}

std::vector<double> default_s_grid(int samples, double lo, double hi) {
    if (samples < 2 || !(lo > 0.0) || !(hi > lo) || !(hi < 1.0)) throw DomainError("default_s_grid: bad range");
    std::vector<double> s(samples);
    for (int i = 0; i < samples; ++i) s[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
    s.back() = hi;
    return s;
}

std::vector<double> uniform_grid(int samples, double lo, double hi) {
    if (samples < 2 || !(hi > lo)) throw DomainError("uniform_grid: bad range");
    std::vector<double> s(samples);
    for (int i = 0; i < samples; ++i) s[i] = lo + (hi - lo) * i / (samples - 1);
    s.back() = hi;
    return s;
}

}  // namespace curvlab
