#include "curvlab/speed.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "curvlab/combinatorics.hpp"
#include "curvlab/errors.hpp"

namespace curvlab {
namespace {

void require_dimension(int n) {
    if (n < 2 || n > kMaxExactBinomial) throw DomainError("speed: dimension n must be in [2, 60]");
}

class MeanCurvatureSpeed final : public SpeedModel {
public:
    explicit MeanCurvatureSpeed(int n) : n_(n) { require_dimension(n); }
    int n() const override { return n_; }
    std::string name() const override { return "mean-curvature"; }
    double eval(const CurvaturePair& c) const override { return (n_ - 1) * c.kappa1 + c.kappan; }
    double d_kappa1(const CurvaturePair&) const override { return 1.0; }
    double d_kappan(const CurvaturePair&) const override { return 1.0; }
    EtaProfile eta_profile(double) const override {
        EtaProfile e;
        e.F1 = e.Fn = 1.0;
        return e;
    }
    std::optional<double> homogeneity_degree() const override { return 1.0; }

private:
    int n_;
};

// Power kappa^p with the convention 0 * kappa^negative = 0 handled by callers
// through zero coefficients.
double pw(double x, int p) { return p == 0 ? 1.0 : std::pow(x, p); }

class ElementarySpeed final : public SpeedModel {
public:
    ElementarySpeed(int n, int r) : n_(n), r_(r) {
        require_dimension(n);
        if (r < 1 || r > n) throw DomainError("elementary speed: need 1 <= r <= n");
    }
    int n() const override { return n_; }
    std::string name() const override { return "elementary:" + std::to_string(r_); }
    double eval(const CurvaturePair& c) const override { return elementary_symmetric(r_, c, n_); }
    double d_kappa1(const CurvaturePair& c) const override {
        double v = binomial_d(n_ - 2, r_ - 1) * pw(c.kappa1, r_ - 1);
        if (r_ >= 2) v += binomial_d(n_ - 2, r_ - 2) * pw(c.kappa1, r_ - 2) * c.kappan;
        return v;
    }
    double d_kappan(const CurvaturePair& c) const override {
        return binomial_d(n_ - 1, r_ - 1) * pw(c.kappa1, r_ - 1);
    }
    EtaProfile eta_profile(double eta) const override {
        // At kappa = eta/(n-1): F1 = C(n-2,r-1) kappa^(r-1), Fn = C(n-1,r-1) kappa^(r-1).
        const double m = n_ - 1;
        const double k = eta / m;
        const int p = r_ - 1;
        const double base = pw(k, p);
        const double d1 = p >= 1 ? p * pw(k, p - 1) / m : 0.0;
        const double d2 = p >= 2 ? p * (p - 1) * pw(k, p - 2) / (m * m) : 0.0;
        const double a = binomial_d(n_ - 2, r_ - 1), b = binomial_d(n_ - 1, r_ - 1);
        EtaProfile e;
        e.F1 = a * base;
        e.Fn = b * base;
        e.F1p = a * d1;
        e.Fnp = b * d1;
        e.F1pp = a * d2;
        e.Fnpp = b * d2;
        return e;  // E_r is affine in kappan, so Fnn = Fnnp = Fnnn = 0.
    }
    std::optional<double> homogeneity_degree() const override { return static_cast<double>(r_); }

private:
    int n_, r_;
};

class MeanCurvaturePowSpeed final : public SpeedModel {
public:
    MeanCurvaturePowSpeed(int n, double k) : n_(n), k_(k) {
        require_dimension(n);
        if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("mean-curvature-pow: exponent must be positive");
    }
    int n() const override { return n_; }
    std::string name() const override {
        std::ostringstream os;
        os << "mean-curvature-pow:" << k_;
        return os.str();
    }
    double H(const CurvaturePair& c) const {
        const double h = (n_ - 1) * c.kappa1 + c.kappan;
        if (!(h > 0.0)) throw DomainError("mean-curvature-pow: mean curvature must be positive");
        return h;
    }
    double eval(const CurvaturePair& c) const override { return std::pow(H(c), k_); }
    double d_kappa1(const CurvaturePair& c) const override { return k_ * std::pow(H(c), k_ - 1); }
    double d_kappan(const CurvaturePair& c) const override { return k_ * std::pow(H(c), k_ - 1); }
    EtaProfile eta_profile(double eta) const override {
        // The cylinder's mean curvature (n-1) kappa equals eta.
        const double k = k_;
        const double f1 = k * std::pow(eta, k - 1);
        const double f2 = k * (k - 1) * std::pow(eta, k - 2);
        const double f3 = k * (k - 1) * (k - 2) * std::pow(eta, k - 3);
        EtaProfile e;
        e.F1 = e.Fn = f1;
        e.F1p = e.Fnp = f2;
        e.F1pp = e.Fnpp = f3;
        e.Fnn = f2;
        e.Fnnp = f3;
        e.Fnnn = f3;
        return e;
    }
    std::optional<double> homogeneity_degree() const override { return k_; }

private:
    int n_;
    double k_;
};

class PolynomialExampleSpeed final : public SpeedModel {
public:
    PolynomialExampleSpeed(int n, double d, int variant) : n_(n), variant_(variant) {
        require_dimension(n);
        if (!(d > 0.0)) throw DomainError("polynomial speed: width must be positive");
        if (variant != 1 && variant != 2) throw DomainError("polynomial speed: variant must be 1 or 2");
        const double pi2 = std::numbers::pi * std::numbers::pi / (d * d);
        alpha_ = variant == 1 ? pi2 / 12.0 : pi2 / 6.0;
        beta_ = pi2 / 18.0;
    }
    int n() const override { return n_; }
    std::string name() const override { return "remark-example-" + std::to_string(variant_); }
    double eval(const CurvaturePair& c) const override {
        const double k1 = c.kappa1, kn = c.kappan;
        return pw(k1, n_ - 1) * kn + alpha_ * ((n_ - 1) * k1 * k1 + kn * kn) +
               beta_ * ((n_ - 1) * k1 * k1 * k1 + kn * kn * kn);
    }
    double d_kappa1(const CurvaturePair& c) const override {
        const double k1 = c.kappa1;
        return pw(k1, n_ - 2) * c.kappan + 2.0 * alpha_ * k1 + 3.0 * beta_ * k1 * k1;
    }
    double d_kappan(const CurvaturePair& c) const override {
        const double kn = c.kappan;
        return pw(c.kappa1, n_ - 1) + 2.0 * alpha_ * kn + 3.0 * beta_ * kn * kn;
    }
    EtaProfile eta_profile(double eta) const override {
        const double m = n_ - 1;
        const double k = eta / m;
        EtaProfile e;
        e.F1 = 2.0 * alpha_ * k + 3.0 * beta_ * k * k;
        e.F1p = (2.0 * alpha_ + 6.0 * beta_ * k) / m;
        e.F1pp = 6.0 * beta_ / (m * m);
        e.Fn = pw(k, n_ - 1);
        e.Fnp = (n_ - 1) * pw(k, n_ - 2) / m;
        e.Fnpp = n_ >= 3 ? (n_ - 1) * (n_ - 2) * pw(k, n_ - 3) / (m * m) : 0.0;
        e.Fnn = 2.0 * alpha_;
        e.Fnnp = 0.0;
        e.Fnnn = 6.0 * beta_;
        return e;
    }

private:
    int n_, variant_;
    double alpha_ = 0, beta_ = 0;
};

class TabulatedSpeed final : public SpeedModel {
public:
    TabulatedSpeed(int n, std::vector<double> eta, std::vector<EtaProfile> rows, std::string label)
        : n_(n), label_(std::move(label)), eta_(std::move(eta)), rows_(std::move(rows)) {
        require_dimension(n);
        if (eta_.size() < 2 || eta_.size() != rows_.size())
            throw DomainError("tabulated speed: need at least two rows");
        for (std::size_t i = 1; i < eta_.size(); ++i)
            if (!(eta_[i] > eta_[i - 1])) throw DomainError("tabulated speed: eta column must increase strictly");
        F1_ = hermite(&EtaProfile::F1, &EtaProfile::F1p);
        Fn_ = hermite(&EtaProfile::Fn, &EtaProfile::Fnp);
        F1p_ = hermite(&EtaProfile::F1p, &EtaProfile::F1pp);
        Fnp_ = hermite(&EtaProfile::Fnp, &EtaProfile::Fnpp);
        Fnn_ = hermite(&EtaProfile::Fnn, &EtaProfile::Fnnp);
    }
    int n() const override { return n_; }
    std::string name() const override { return label_; }
    bool has_pointwise() const override { return false; }
    double eval(const CurvaturePair&) const override { throw unsupported(); }
    double d_kappa1(const CurvaturePair&) const override { throw unsupported(); }
    double d_kappan(const CurvaturePair&) const override { throw unsupported(); }
    EtaProfile eta_profile(double eta) const override {
        if (eta < eta_.front() || eta > eta_.back())
            throw DomainError("tabulated speed: eta outside the table range");
        EtaProfile e;
        e.F1 = (*F1_)(eta);
        e.Fn = (*Fn_)(eta);
        e.F1p = (*F1p_)(eta);
        e.Fnp = (*Fnp_)(eta);
        e.Fnn = (*Fnn_)(eta);
        e.F1pp = linear(&EtaProfile::F1pp, eta);
        e.Fnpp = linear(&EtaProfile::Fnpp, eta);
        e.Fnnp = linear(&EtaProfile::Fnnp, eta);
        e.Fnnn = linear(&EtaProfile::Fnnn, eta);
        return e;
    }

private:
    using Interp = boost::math::interpolators::cubic_hermite<std::vector<double>>;
    int n_;
    std::string label_;
    std::vector<double> eta_;
    std::vector<EtaProfile> rows_;
    std::shared_ptr<Interp> F1_, Fn_, F1p_, Fnp_, Fnn_;

    static DomainError unsupported() {
        return DomainError("tabulated speed: pointwise evaluation is not available");
    }
    std::shared_ptr<Interp> hermite(double EtaProfile::*value, double EtaProfile::*slope) const {
        std::vector<double> x(eta_), y, dy;
        for (const auto& r : rows_) {
            y.push_back(r.*value);
            dy.push_back(r.*slope);
        }
        return std::make_shared<Interp>(std::move(x), std::move(y), std::move(dy));
    }
    double linear(double EtaProfile::*value, double eta) const {
        auto it = std::upper_bound(eta_.begin(), eta_.end(), eta);
        std::size_t i = it == eta_.end() ? eta_.size() - 1 : static_cast<std::size_t>(it - eta_.begin());
        if (i == 0) i = 1;
        const double t = (eta - eta_[i - 1]) / (eta_[i] - eta_[i - 1]);
        return (1 - t) * (rows_[i - 1].*value) + t * (rows_[i].*value);
    }
};

// Richardson-extrapolated central difference of f at x with base step h.
template <class F>
double richardson_derivative(F&& f, double x, double h) {
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    const double d1 = central(h), d2 = central(0.5 * h), d3 = central(0.25 * h);
    const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

class NumericProfileSpeed final : public SpeedModel {
public:
    explicit NumericProfileSpeed(SpeedPtr base) : base_(std::move(base)) {
        if (!base_ || !base_->has_pointwise()) throw DomainError("numeric profile: need a pointwise speed");
    }
    int n() const override { return base_->n(); }
    std::string name() const override { return base_->name() + "+numeric-profile"; }
    double eval(const CurvaturePair& c) const override { return base_->eval(c); }
    double d_kappa1(const CurvaturePair& c) const override { return base_->d_kappa1(c); }
    double d_kappan(const CurvaturePair& c) const override { return base_->d_kappan(c); }
    EtaProfile eta_profile(double eta) const override { return numeric_eta_profile(*base_, eta); }
    std::optional<double> homogeneity_degree() const override { return base_->homogeneity_degree(); }

private:
    SpeedPtr base_;
};

}  // namespace

SpeedPtr make_mean_curvature(int n) { return std::make_shared<MeanCurvatureSpeed>(n); }
SpeedPtr make_elementary(int n, int r) { return std::make_shared<ElementarySpeed>(n, r); }
SpeedPtr make_mean_curvature_pow(int n, double k) { return std::make_shared<MeanCurvaturePowSpeed>(n, k); }
SpeedPtr make_polynomial_example(int n, double d, int variant) {
    return std::make_shared<PolynomialExampleSpeed>(n, d, variant);
}
SpeedPtr make_tabulated(int n, std::vector<double> eta, std::vector<EtaProfile> rows, std::string label) {
    return std::make_shared<TabulatedSpeed>(n, std::move(eta), std::move(rows), std::move(label));
}
SpeedPtr make_numeric_profile_speed(SpeedPtr base) { return std::make_shared<NumericProfileSpeed>(std::move(base)); }

SpeedPtr load_tabulated(int n, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("tabulated speed: cannot open " + path);
    std::vector<double> eta;
    std::vector<EtaProfile> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double v[10];
        int k = 0;
        while (k < 10 && (ls >> v[k])) ++k;
        if (k == 0) {
            // Blank line or a header row.
            continue;
        }
        if (k != 10) throw DomainError("tabulated speed: expected 10 columns at line " + std::to_string(lineno));
        eta.push_back(v[0]);
        rows.push_back({v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return make_tabulated(n, std::move(eta), std::move(rows), "table:" + path);
}

SpeedPtr make_speed(const std::string& spec, int n, double d) {
    auto arg = [&](const std::string& prefix) { return spec.substr(prefix.size()); };
    if (spec == "mean-curvature") return make_mean_curvature(n);
    if (spec.rfind("elementary:", 0) == 0) return make_elementary(n, std::stoi(arg("elementary:")));
    if (spec.rfind("mean-curvature-pow:", 0) == 0)
        return make_mean_curvature_pow(n, std::stod(arg("mean-curvature-pow:")));
    if (spec == "remark-example-1") return make_polynomial_example(n, d, 1);
    if (spec == "remark-example-2") return make_polynomial_example(n, d, 2);
    if (spec.rfind("table:", 0) == 0) return load_tabulated(n, arg("table:"));
    throw DomainError("unknown speed preset '" + spec + "'");
}

EtaProfile numeric_eta_profile(const SpeedModel& speed, double eta) {
    if (!(eta > 0.0)) throw DomainError("numeric_eta_profile: eta must be positive");
    const double m = speed.n() - 1;
    auto at = [&](double e, double kn) { return CurvaturePair{e / m, kn}; };
    auto F1 = [&](double e) { return speed.d_kappa1(at(e, 0.0)); };
    auto Fn = [&](double e) { return speed.d_kappan(at(e, 0.0)); };
    const double kappa = eta / m;
    const double he = 0.05 * eta;
    const double hk = 0.05 * std::max(kappa, 1e-3);
    auto Fnn_at = [&](double e) {
        return richardson_derivative([&](double kn) { return speed.d_kappan(at(e, kn)); }, 0.0, hk);
    };
    EtaProfile p;
    p.F1 = F1(eta);
    p.Fn = Fn(eta);
    p.F1p = richardson_derivative(F1, eta, he);
    p.Fnp = richardson_derivative(Fn, eta, he);
    p.F1pp = richardson_derivative([&](double e) { return richardson_derivative(F1, e, he); }, eta, he);
    p.Fnpp = richardson_derivative([&](double e) { return richardson_derivative(Fn, e, he); }, eta, he);
    p.Fnn = Fnn_at(eta);
    p.Fnnp = richardson_derivative(Fnn_at, eta, he);
    p.Fnnn = richardson_derivative(
        [&](double kn) {
            return richardson_derivative([&](double t) { return speed.d_kappan(at(eta, t)); }, kn, hk);
        },
        0.0, hk);
    return p;
}

}  // namespace curvlab
