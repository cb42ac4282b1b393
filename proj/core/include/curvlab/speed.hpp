#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/geometry.hpp"

namespace curvlab {

// Derivatives of the speed at the cylinder curvature kappa = (eta/(n-1), 0):
// F1 = dF/dkappa_1 and Fn = dF/dkappa_n, their first and second eta
// derivatives (suffix p, pp), and the second/third kappa_n derivatives.
struct EtaProfile {
    double F1 = 0, Fn = 0;
    double F1p = 0, Fnp = 0;
    double F1pp = 0, Fnpp = 0;
    double Fnn = 0, Fnnp = 0, Fnnn = 0;
};

// Speed function F evaluated at axially symmetric curvature arguments.
// d_kappa1 differentiates with respect to a single one of the n-1 equal
// rotational slots, so that F1(eta) = d_kappa1(eta/(n-1), 0).
class SpeedModel {
public:
    virtual ~SpeedModel() = default;

    virtual int n() const = 0;
    virtual std::string name() const = 0;

    // Pointwise evaluation. Tabulated speeds cannot do this and throw.
    virtual bool has_pointwise() const { return true; }
    virtual double eval(const CurvaturePair& c) const = 0;
    virtual double d_kappa1(const CurvaturePair& c) const = 0;
    virtual double d_kappan(const CurvaturePair& c) const = 0;

    virtual EtaProfile eta_profile(double eta) const = 0;
    virtual std::optional<double> homogeneity_degree() const { return std::nullopt; }
};

using SpeedPtr = std::shared_ptr<const SpeedModel>;

// F = E_1 = (n-1) kappa1 + kappan. Homogeneous of degree 1.
SpeedPtr make_mean_curvature(int n);
// F = E_r, 1 <= r <= n. Homogeneous of degree r.
SpeedPtr make_elementary(int n, int r);
// F = E_1^k, k > 0. Homogeneous of degree k.
SpeedPtr make_mean_curvature_pow(int n, double k);
// F = E_n + alpha sum kappa_i^2 + beta sum kappa_i^3, a non-homogeneous
// polynomial speed. variant 1 uses alpha = pi^2/(12 d^2), variant 2 uses
// alpha = pi^2/(6 d^2); both use beta = pi^2/(18 d^2).
SpeedPtr make_polynomial_example(int n, double d, int variant);

// Speed known only through its eta profile, read from a table with columns
// eta, F1, Fn, F1p, Fnp, F1pp, Fnpp, Fnn, Fnnp, Fnnn. Values between rows are
// cubic Hermite interpolants where a derivative column exists, linear
// otherwise. Pointwise evaluation is unavailable.
SpeedPtr make_tabulated(int n, std::vector<double> eta, std::vector<EtaProfile> rows, std::string label = "tabulated");
SpeedPtr load_tabulated(int n, const std::string& path);

// Builds a speed from its preset name: "mean-curvature", "elementary:r",
// "mean-curvature-pow:k", "remark-example-1", "remark-example-2", or
// "table:PATH".
SpeedPtr make_speed(const std::string& spec, int n, double d);

// Eta profile computed from the pointwise partial derivatives alone by
// Richardson-extrapolated central differences. Used for custom speeds without
// analytic eta derivatives and to cross-check the presets.
EtaProfile numeric_eta_profile(const SpeedModel& speed, double eta);

// Wraps any pointwise speed and reports its eta profile numerically.
SpeedPtr make_numeric_profile_speed(SpeedPtr base);

}  // namespace curvlab
