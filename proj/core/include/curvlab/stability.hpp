#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/geometry.hpp"
#include "curvlab/reduction.hpp"
#include "curvlab/speed.hpp"

namespace curvlab {

// lambda_m(eta) = -Fn(eta) (m pi/d)^2 + eta^2 F1(eta)/(n-1): eigenvalue of the
// reduced linearisation at the cylinder of radius (n-1)/eta on mode cos(m pi z/d).
double linear_eigenvalue(int m, double eta, const SpeedModel& speed, int n, double d);
// lambda_1 viewed as a function of eta; its sign change locates R_crit.
double critical_function(double eta, const SpeedModel& speed, int n, double d);

struct CriticalRadius {
    double R_crit = 0.0;
    double eta = 0.0;
    double residual = 0.0;  // |critical_function(eta)|
    double scale = 0.0;     // size of the two competing terms at the root
};

// Locates the unique sign change of critical_function in the bracket. Returns
// nullopt when there is none; throws AmbiguityError listing every root when
// there is more than one.
std::optional<CriticalRadius> r_crit_find(const SpeedModel& speed, int n, double d, Bracket bracket,
                                          int scan_points = 4000);

// 2 F1 + eta (F1' - F1 Fn'/Fn); nonzero certifies transversality.
double bif_condition(double eta, const SpeedModel& speed, int n);

// The eta derivatives of F at eta0 and the composite coefficients of the
// second-order expansion of the bifurcation curve.
struct BifShapeCoefficients {
    int n = 2;
    double eta0 = 0.0;
    EtaProfile F;
    double script_F = 0.0;
    double script_F1 = 0.0, script_F2 = 0.0, script_F3 = 0.0, script_F4 = 0.0;
};

BifShapeCoefficients bif_shape_coefficients(const SpeedModel& speed, int n, double eta0);
// The composite coefficient rebuilt from the four partial coefficients, before
// expansion. Must agree with script_F; used as a transcription guard.
double script_F_from_parts(const BifShapeCoefficients& c);

// Weight contribution 6 S1/((n-1) S0) shared by the curvature formulas.
double weight_correction(const BifShapeCoefficients& c, const WeightModel& w);

// Normalisation-free bracket of eta''(0): script_F/BC - weight_correction.
// eta''(0) has the sign of minus this value.
double eta_dd_bracket(const BifShapeCoefficients& c, const WeightModel& w);
int eta_dd_sign(const BifShapeCoefficients& c, const WeightModel& w);

// Bracket of lambda''(0): script_F - weight_correction * BC. Negative means
// the bifurcating stationary solutions are stable.
double lambda_dd_bracket(const BifShapeCoefficients& c, const WeightModel& w);
int lambda_dd_sign(const BifShapeCoefficients& c, const WeightModel& w);

// Left side of the stability condition for speeds homogeneous of degree k,
// written with the constants F1 = F1(1), Fn, Fnn, Fnnn. Negative means stable.
double homog_condition(int n, double k, double F1, double Fn, double Fnn, double Fnnn, const WeightModel& w,
                       double d);

using Rational = boost::rational<long long>;

// -(n^3 - (b+10) n^2 + 2(5b-1) n - 2b(3b-4)) / (n-b), exactly.
Rational mixed_volume_condition(int n, int b);

struct GammaRoot {
    double value = 0.0;
    double residual = 0.0;  // cubic evaluated at value (long double)
    double radical = 0.0;   // closed-form radical evaluation, cross-check only
};

// Unique real root of n^3 - (b+10) n^2 + 2(5b-1) n - 2b(3b-4).
GammaRoot gamma_root(int b);
double gamma_radical(int b);

struct StabilityTableEntry {
    int n = 0, b = 0;
    Rational value;
    bool stable = false;
};

std::vector<StabilityTableEntry> stability_table(int n_max, int b_max);

struct ModeResponse {
    int m = 0;
    double rayleigh = 0.0;      // <D Gbar[v], v> / <v, v>
    double off_mode = 0.0;      // relative size of the response outside v
    double step = 0.0;          // finite-difference amplitude that was selected
    double richardson_gap = 0.0;
};

// Directional finite differences of the reduced right-hand side at ubar = 0
// along cos(m pi z/d). The amplitude is picked from a ladder as the one whose
// Richardson estimate agrees best with the next finer one.
std::vector<ModeResponse> jacobian_fd(double eta, const SpeedModel& speed, const WeightModel& w,
                                      const GridCalculus& g, const std::vector<int>& modes);

enum class Verdict { Stable, Unstable, Degenerate };
std::string to_string(Verdict v);

struct StabilityReport {
    int n = 2;
    std::string speed;
    std::string weight;
    double d = 1.0;
    double R_crit = 0.0;
    double eta0 = 0.0;
    std::vector<std::pair<int, double>> lambda;  // (m, lambda_m(eta0))
    double bif_cond_value = 0.0;
    double eta_dd_bracket = 0.0;
    double lambda_dd_bracket = 0.0;
    int eta_dd_sign = 0;
    int lambda_dd_sign = 0;
    Verdict verdict = Verdict::Degenerate;
    std::vector<std::pair<std::string, std::string>> provenance;  // quantity -> how it was obtained
};

StabilityReport stability_report(const SpeedModel& speed, const WeightModel& w, int n, double d, Bracket bracket,
                                 int max_mode = 5);

// Verdicts of the stability conditions that apply to one (speed, weight)
// pair: the general lambda'' bracket always, the homogeneous closed form when
// the speed is homogeneous, and the exact mixed-volume condition when the
// speed is the mean curvature and the weight is a single mixed volume.
struct ConditionChain {
    double eta0 = 0.0;
    Verdict general = Verdict::Degenerate;
    std::optional<Verdict> homogeneous;
    std::optional<Verdict> mixed_volume;

    bool consistent() const {
        return (!homogeneous || *homogeneous == general) && (!mixed_volume || *mixed_volume == general);
    }
};

// Throws DegeneracyError when the pair has no critical radius in the bracket.
ConditionChain condition_chain(const SpeedModel& speed, const WeightModel& w, int n, double d, Bracket bracket);

}  // namespace curvlab
