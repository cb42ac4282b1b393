#pragma once

#include <string>
#include <vector>

#include "curvlab/geometry.hpp"

namespace curvlab {

// Half-period unduloid between the plates z = 0 and z = d. s is the
// neck-bulge asymmetry (rho(d) - rho(0)) / (rho(d) + rho(0)).
struct UnduloidParams {
    int n = 2;
    double d = 1.0;
    double s = 0.1;
};

// Largest dimension accepted by the unduloid routines (exact coefficient
// arithmetic is carried out in 128-bit integers).
inline constexpr int kMaxUnduloidDimension = 40;

// Right end of the normalised radius range, (1+s)/(1-s).
double unduloid_upper(double s);

// Integrand of the normalised arc-length map, finite on the open interval
// (1, (1+s)/(1-s)) with inverse-square-root poles at both ends.
double g_s(double x, const UnduloidParams& p);
// Its derivative in x.
double g_s_prime(double x, const UnduloidParams& p);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

// Integral of g_s over the open interval, by tanh-sinh quadrature.
QuadratureResult unduloid_length_integral(const UnduloidParams& p);
// Same integral by the cosine-substitution trapezoid rule (independent route).
QuadratureResult unduloid_length_integral_spectral(const UnduloidParams& p);

// Neck radius d / int g_s.
double rho0(const UnduloidParams& p);
// Constant mean curvature (sum of principal curvatures) of the unduloid.
double mean_curvature(const UnduloidParams& p);

// Samples rho_s on the uniform grid of N nodes by inverting z(x).
RadialProfile unduloid_profile(const UnduloidParams& p, int N);

// Joins `copies` reflected half periods into a profile on [0, copies*d].
RadialProfile reflect_concatenate(const RadialProfile& half, int copies);

struct BifurcationSample {
    double s = 0.0;
    double eta = 0.0;
    double eta_bar = 0.0;
    double rho0 = 0.0;
    double H = 0.0;
    double quadrature_error_estimate = 0.0;  // relative, propagated to eta
};

// Critical eta of the cylinder family for the mean-curvature speed, pi sqrt(n-1)/d.
double critical_eta(int n, double d);

// eta(s) for the mixed-volume weight c_a = delta_{ab}, 0 <= b <= n-1.
BifurcationSample eta_curve(const UnduloidParams& p, int b);
// eta(s) by the spectral route, for cross-checks.
double eta_curve_spectral(const UnduloidParams& p, int b);

struct TurningPoint {
    double s = 0.0;
    std::string kind;  // "max" or "min" of eta_bar
};

std::vector<TurningPoint> turning_points_from_values(const std::vector<double>& s, const std::vector<double>& eta_bar);
std::vector<TurningPoint> turning_points(int n, int b, const std::vector<double>& s_grid, double d = 1.0);

// Geometric grid of `samples` points on [lo, hi], dense near zero.
std::vector<double> default_s_grid(int samples = 200, double lo = 0.01, double hi = 0.97);
// Uniform grid of `samples` points on [lo, hi].
std::vector<double> uniform_grid(int samples, double lo, double hi);

}  // namespace curvlab
