#include "curvlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {

double RadialProfile::min() const { return *std::min_element(values.begin(), values.end()); }
double RadialProfile::max() const { return *std::max_element(values.begin(), values.end()); }

void check_profile(const RadialProfile& p) {
    if (p.n < 2) throw DomainError("profile: dimension n must be at least 2");
    if (p.size() < 16) throw DomainError("profile: need at least 16 samples");
    for (std::size_t j = 0; j < p.values.size(); ++j) {
        const double v = p.values[j];
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("profile: non-positive or non-finite radius at node " + std::to_string(j));
    }
}

RadialProfile cylinder(int n, double d, int N, double R) {
    RadialProfile p{n, d, Vec(N, R)};
    check_profile(p);
    return p;
}

SurfaceFields surface_fields(const RadialProfile& p, const GridCalculus& g) {
    check_profile(p);
    if (p.size() != g.size()) throw DomainError("profile size does not match grid");
    SurfaceFields f;
    g.derivatives(p.values, f.du, f.ddu);
    const int N = p.size();
    f.L.resize(N);
    f.kappa.resize(N);
    for (int j = 0; j < N; ++j) {
        const double L = std::sqrt(1.0 + f.du[j] * f.du[j]);
        f.L[j] = L;
        f.kappa[j] = {1.0 / (p.values[j] * L), -f.ddu[j] / (L * L * L)};
    }
    return f;
}

std::vector<CurvaturePair> principal_curvatures(const RadialProfile& p, const GridCalculus& g) {
    return surface_fields(p, g).kappa;
}

double elementary_symmetric(int a, const CurvaturePair& c, int n) {
    if (a < 0 || a > n) throw DomainError("elementary_symmetric: index out of range");
    if (a == 0) return 1.0;
    const double k1 = c.kappa1;
    double v = binomial_d(n - 1, a) * std::pow(k1, a);
    const double mixed = binomial_d(n - 1, a - 1);
    if (mixed != 0.0) v += mixed * std::pow(k1, a - 1) * c.kappan;
    return v;
}

WeightModel::WeightModel(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.size() < 3) throw DomainError("WeightModel: need coefficients c_0..c_n with n >= 2");
    const int n = this->n();
    bool lower = false;
    for (int a = 0; a < n; ++a) lower = lower || c_[a] != 0.0;
    if (!lower) throw DomainError("WeightModel: weight must involve some c_a with a < n");
    for (double v : c_)
        if (!std::isfinite(v)) throw DomainError("WeightModel: non-finite coefficient");
}

WeightModel WeightModel::volume(int n) { return mixed(n, 0); }

WeightModel WeightModel::mixed(int n, int b) {
    if (n < 2) throw DomainError("WeightModel::mixed: n must be at least 2");
    if (b < 0 || b > n - 1) throw DomainError("WeightModel::mixed: need 0 <= b <= n-1");
    std::vector<double> c(n + 1, 0.0);
    c[b] = 1.0;
    return WeightModel(std::move(c));
}

int WeightModel::mixed_index() const noexcept {
    int idx = -1;
    for (int a = 0; a <= n(); ++a) {
        if (c_[a] == 0.0) continue;
        if (c_[a] != 1.0 || idx >= 0) return -1;
        idx = a;
    }
    return idx;
}

double WeightModel::eval(const CurvaturePair& c) const {
    double s = 0.0;
    for (int a = 0; a <= n(); ++a)
        if (c_[a] != 0.0) s += c_[a] * elementary_symmetric(a, c, n());
    return s;
}

double WeightModel::at_cylinder(double R) const { return eval(cylinder_curvatures(R)); }

double WeightModel::d_kappa1(const CurvaturePair& c) const {
    // dE_a/dkappa_1 is E_{a-1} of the remaining n-1 curvatures
    // (kappa1 n-2 times, kappan once).
    double s = 0.0;
    const int n = this->n();
    for (int a = 1; a <= n; ++a) {
        if (c_[a] == 0.0) continue;
        double e = binomial_d(n - 2, a - 1) * std::pow(c.kappa1, a - 1);
        if (a >= 2) e += binomial_d(n - 2, a - 2) * std::pow(c.kappa1, a - 2) * c.kappan;
        s += c_[a] * e;
    }
    return s;
}

double WeightModel::d_kappan(const CurvaturePair& c) const {
    double s = 0.0;
    const int n = this->n();
    for (int a = 1; a <= n; ++a)
        if (c_[a] != 0.0) s += c_[a] * binomial_d(n - 1, a - 1) * std::pow(c.kappa1, a - 1);
    return s;
}

double weight_eval(const WeightModel& w, const CurvaturePair& c, int n) {
    if (w.n() != n) throw DomainError("weight_eval: weight dimension does not match n");
    return w.eval(c);
}

Vec q_density(const RadialProfile& p, const WeightModel& w, const GridCalculus& g) {
    if (w.n() != p.n) throw DomainError("q_density: weight dimension does not match profile");
    const int n = p.n;
    const int N = p.size();
    Vec q(N, 0.0);
    const bool curved = [&] {
        for (int a = 1; a <= n; ++a)
            if (w.coeff(a) != 0.0) return true;
        return false;
    }();
    if (!curved) {
        check_profile(p);
        for (int j = 0; j < N; ++j) q[j] = w.coeff(0) * std::pow(p.values[j], n);
        return q;
    }
    const SurfaceFields f = surface_fields(p, g);
    for (int j = 0; j < N; ++j) {
        const double u = p.values[j];
        double s = 0.0;
        for (int a = 1; a <= n; ++a) {
            const double ca = w.coeff(a);
            if (ca != 0.0) s += n * ca / a * elementary_symmetric(a - 1, f.kappa[j], n);
        }
        q[j] = w.coeff(0) * std::pow(u, n) + s * std::pow(u, n - 1) * f.L[j];
    }
    return q;
}

double weighted_volume(const RadialProfile& p, const WeightModel& w, const GridCalculus& g) {
    return 2.0 * g.integrate(q_density(p, w, g));
}

double mixed_volume(int b, const RadialProfile& p, const GridCalculus& g) {
    const int n = p.n;
    if (b < 1 || b > n + 1) throw DomainError("mixed_volume: need 1 <= b <= n+1");
    const double omega = unit_ball_volume(n);
    if (b == n + 1) {
        check_profile(p);
        Vec un(p.values);
        for (double& v : un) v = std::pow(v, n);
        return omega * g.integrate(un);
    }
    const SurfaceFields f = surface_fields(p, g);
    Vec integrand(p.size());
    for (int j = 0; j < p.size(); ++j)
        integrand[j] = elementary_symmetric(n - b, f.kappa[j], n) * std::pow(p.values[j], n - 1) * f.L[j];
    return n * omega / ((n + 1) * binomial_d(n, n - b)) * g.integrate(integrand);
}

Vec project_meanzero(const Vec& v, const GridCalculus& g) { return g.project_meanzero(v); }

}  // namespace curvlab
