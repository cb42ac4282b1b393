#pragma once

#include <optional>
#include <utility>

#include "curvlab/geometry.hpp"
#include "curvlab/speed.hpp"

namespace curvlab {

// Mean-zero even perturbation plus the scalar that fixes the conserved
// weighted volume.
struct ReducedState {
    Vec ubar;
    double eta = 1.0;
};

// Q evaluated on the cylinder of radius (n-1)/eta.
double qtilde(double eta, const WeightModel& w, int n);
// Its eta derivative, -n (n-1)^n / eta^(n+1) * Xi at that cylinder.
double qtilde_prime(double eta, const WeightModel& w, int n);

struct Bracket {
    double lo, hi;
};

// Solves qtilde(eta) = x for eta in the bracket. Throws DomainError when
// qtilde is not strictly monotone there and RangeError when x is not attained.
double qtilde_inv(double x, const WeightModel& w, int n, Bracket bracket);
// Same, starting from the bracket [guess/10, 10 guess] and widening it
// geometrically (up to four times) until x is attained.
double qtilde_inv_near(double x, const WeightModel& w, int n, double guess);

struct PsiResult {
    RadialProfile profile;
    double offset = 0.0;    // the constant c with profile = ubar + c
    double residual = 0.0;  // |mean Q(profile) - qtilde(eta)|
    int iterations = 0;
};

// psi(ubar, eta) = ubar + c where c solves mean Q(ubar + c) = qtilde(eta) by a
// safeguarded Newton iteration. offset_guess warm-starts the iteration.
PsiResult psi_solve_detailed(const ReducedState& s, int n, double d, const WeightModel& w, const GridCalculus& g,
                             std::optional<double> offset_guess = std::nullopt);
RadialProfile psi_solve(const ReducedState& s, int n, double d, const WeightModel& w, const GridCalculus& g);

// psi^{-1}(u) = (P0 u, qtilde^{-1}(mean Q(u))).
ReducedState psi_inverse(const RadialProfile& p, const WeightModel& w, const GridCalculus& g);

// G(u) = L (int F Xi dmu / int Xi dmu - F) with dmu = u^(n-1) L dz.
Vec full_rhs(const RadialProfile& p, const SpeedModel& speed, const WeightModel& w, const GridCalculus& g);

// Gbar(ubar, eta) = P0[G(psi(ubar, eta))].
Vec reduced_rhs(const ReducedState& s, int n, double d, const SpeedModel& speed, const WeightModel& w,
                const GridCalculus& g);

}  // namespace curvlab
