#pragma once

#include <vector>

#include "curvlab/grid.hpp"

namespace curvlab {

// Samples of the profile rho on the uniform grid of [0, d] for an
// n-dimensional axially symmetric hypersurface. The even extension across
// both ends is implied; the orthogonal boundary condition is structural.
struct RadialProfile {
    int n = 2;
    double d = 1.0;
    Vec values;

    int size() const noexcept { return static_cast<int>(values.size()); }
    double min() const;
    double max() const;
};

// Validates n >= 2, N >= 16 and strictly positive samples.
void check_profile(const RadialProfile& p);
RadialProfile cylinder(int n, double d, int N, double R);

// Principal curvatures at one point: kappa1 (multiplicity n-1, rotational)
// and kappan (profile curvature).
struct CurvaturePair {
    double kappa1 = 0.0;
    double kappan = 0.0;
};

// Curvatures at a cylinder of radius R.
inline CurvaturePair cylinder_curvatures(double R) { return {1.0 / R, 0.0}; }

std::vector<CurvaturePair> principal_curvatures(const RadialProfile& p, const GridCalculus& g);

// E_a at the axisymmetric argument (kappa1 repeated n-1 times, kappan once).
double elementary_symmetric(int a, const CurvaturePair& c, int n);

// Xi = sum_a c_a E_a. Coefficients c_0..c_n; the pure c_n weight is excluded
// because it makes the conserved quantity constant.
class WeightModel {
public:
    explicit WeightModel(std::vector<double> coeffs);

    // c_a = delta_{a0}: plain enclosed volume.
    static WeightModel volume(int n);
    // c_a = delta_{ab}: the mixed-volume weight, 0 <= b <= n-1.
    static WeightModel mixed(int n, int b);

    int n() const noexcept { return static_cast<int>(c_.size()) - 1; }
    double coeff(int a) const { return (a >= 0 && a < static_cast<int>(c_.size())) ? c_[a] : 0.0; }
    const std::vector<double>& coeffs() const noexcept { return c_; }
    // Index b when the weight is exactly delta_{ab}, else -1.
    int mixed_index() const noexcept;

    double eval(const CurvaturePair& c) const;
    // Xi at a cylinder of radius R: sum c_a C(n-1,a) R^-a.
    double at_cylinder(double R) const;
    // Partial derivatives with respect to one kappa1 slot and kappan.
    double d_kappa1(const CurvaturePair& c) const;
    double d_kappan(const CurvaturePair& c) const;

private:
    std::vector<double> c_;
};

double weight_eval(const WeightModel& w, const CurvaturePair& c, int n);

// Pointwise Q(u) = c0 u^n + sum_{a>=1} (n c_a / a) E_{a-1} u^{n-1} L.
Vec q_density(const RadialProfile& p, const WeightModel& w, const GridCalculus& g);
// Integral of Q over the circle of circumference 2d.
double weighted_volume(const RadialProfile& p, const WeightModel& w, const GridCalculus& g);
// V_b for 1 <= b <= n+1, normalised so that
// WVol = (2/omega_n)(c0 V_{n+1} + sum_{a>=1} c_a C(n+1,a) V_{n+1-a}).
double mixed_volume(int b, const RadialProfile& p, const GridCalculus& g);

Vec project_meanzero(const Vec& v, const GridCalculus& g);

// Pointwise geometric data reused by the flow right-hand sides.
struct SurfaceFields {
    Vec du, ddu, L;
    std::vector<CurvaturePair> kappa;
};
SurfaceFields surface_fields(const RadialProfile& p, const GridCalculus& g);

}  // namespace curvlab
