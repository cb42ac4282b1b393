#pragma once

#include <string>
#include <utility>
#include <vector>

#include "curvlab/fitting.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/speed.hpp"

namespace curvlab {

enum class FlowMode { Full, Reduced };

// Closed-form starting profile: a cylinder of radius R or a half-period
// unduloid with asymmetry s, multiplied by 1 + sum eps_k cos(k pi z / d).
struct InitialCondition {
    enum class Family { Cylinder, Unduloid };
    Family family = Family::Cylinder;
    double R = 1.0;
    double s = 0.1;
    std::vector<std::pair<int, double>> modes;  // (k, relative amplitude)
};

RadialProfile make_initial_profile(const InitialCondition& ic, int n, double d, int N);

struct FlowConfig {
    int n = 2;
    double d = 1.0;
    int N = 128;
    SpeedPtr speed;
    WeightModel weight = WeightModel::volume(2);
    InitialCondition initial;
    double t_end = 1.0;
    double rtol = 1e-8;
    double atol = 1e-8;
    FlowMode mode = FlowMode::Full;
    double record_every = 0.05;
    // Termination threshold for the axis-approach event.
    double min_rho = 1e-6;
    long max_steps = 5'000'000;
    // Semi-implicit splitting with the constant-coefficient diffusion
    // Fn(eta0) u'' treated implicitly. Off by default; meant for N > 256.
    bool semi_implicit = false;
    DiffMode diff_mode = DiffMode::SpectralCosine;
};

// Throws DomainError when a field is out of range or the speed is missing.
void validate(const FlowConfig& cfg);

enum class Termination { Completed, AxisApproach, WeightNonPositive };
std::string to_string(Termination t);

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<RadialProfile> states;
    std::vector<double> wvol;
    std::vector<double> sup_dev;  // max |u - mean u|
    std::vector<double> eta;      // conserved cylinder parameter (reduced mode) or its full-mode equivalent
    StepStats stats;
    Termination termination = Termination::Completed;
    std::string message;

    bool empty() const noexcept { return times.empty(); }
};

Trajectory integrate(const FlowConfig& cfg);
// Starts from an explicit profile instead of cfg.initial.
Trajectory integrate_from(const FlowConfig& cfg, const RadialProfile& u0);

// max_j |wvol_j - wvol_0| / |wvol_0|.
double conservation_drift(const Trajectory& t);

// Least-squares slope of log sup_dev over the records with t in [t_lo, t_hi].
LineFit decay_rate_fit(const Trajectory& t, double t_lo, double t_hi);

// Runs the full flow from u0 and the reduced flow from psi^{-1}(u0) and
// returns the largest sup difference between the two over the records.
double equivalence_check(const FlowConfig& cfg);

// sqrt(sum (u_j - u_{N-1-j})^2 / sum u_j^2): the part of the profile that is
// odd about the midpoint z = d/2, relative to the whole.
double mirror_asymmetry(const RadialProfile& p);

}  // namespace curvlab
