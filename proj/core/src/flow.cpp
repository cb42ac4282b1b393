#include "curvlab/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>

#include "curvlab/errors.hpp"
#include "curvlab/reduction.hpp"
#include "curvlab/unduloid.hpp"

namespace curvlab {

RadialProfile make_initial_profile(const InitialCondition& ic, int n, double d, int N) {
    RadialProfile p;
    if (ic.family == InitialCondition::Family::Cylinder) {
        if (!(ic.R > 0.0)) throw DomainError("initial condition: radius must be positive");
        p = cylinder(n, d, N, ic.R);
    } else {
        p = unduloid_profile({n, d, ic.s}, N);
    }
    for (int j = 0; j < N; ++j) {
        const double z = d * j / (N - 1);
        double factor = 1.0;
        for (const auto& [k, eps] : ic.modes) {
            if (k < 0) throw DomainError("initial condition: cosine mode index must be non-negative");
            factor += eps * std::cos(k * std::numbers::pi * z / d);
        }
        p.values[j] *= factor;
    }
    check_profile(p);
    return p;
}

void validate(const FlowConfig& cfg) {
    if (cfg.n < 2) throw DomainError("flow: n must be at least 2");
    if (!(cfg.d > 0.0)) throw DomainError("flow: d must be positive");
    if (cfg.N < 16) throw DomainError("flow: N must be at least 16");
    if (!cfg.speed) throw DomainError("flow: no speed model");
    if (cfg.speed->n() != cfg.n) throw DomainError("flow: speed dimension does not match n");
    if (!cfg.speed->has_pointwise()) throw DomainError("flow: speed '" + cfg.speed->name() + "' has no pointwise form");
    if (cfg.weight.n() != cfg.n) throw DomainError("flow: weight dimension does not match n");
    if (!(cfg.t_end > 0.0)) throw DomainError("flow: t_end must be positive");
    if (!(cfg.rtol > 1e-14 && cfg.rtol < 1e-2)) throw DomainError("flow: rtol must lie in (1e-14, 1e-2)");
    if (!(cfg.atol > 1e-14 && cfg.atol < 1e-2)) throw DomainError("flow: atol must lie in (1e-14, 1e-2)");
    if (!(cfg.record_every > 0.0)) throw DomainError("flow: record_every must be positive");
    if (!(cfg.min_rho > 0.0)) throw DomainError("flow: min_rho must be positive");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::AxisApproach: return "min-rho";
        case Termination::WeightNonPositive: return "xi-nonpositive";
    }
    return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// Right-hand side on the state vector plus the mapping from a state to the
// profile it represents. Stage evaluations that leave the admissible set throw
// curvlab::Error; the stepper treats that as a rejected step.
class System {
public:
    System(const FlowConfig& cfg, const GridCalculus& g, const RadialProfile& u0)
        : cfg_(cfg), g_(g), n_(cfg.n), d_(cfg.d) {
        if (cfg.mode == FlowMode::Reduced) {
            const ReducedState r = psi_inverse(u0, cfg.weight, g);
            eta_ = r.eta;
            y0_ = r.ubar;
            offset_ = g.mean(u0.values);
        } else {
            y0_ = u0.values;
            // Diagnostic only in full mode; the cylinder family may not reach this state.
            try {
                eta_ = psi_inverse(u0, cfg.weight, g).eta;
            } catch (const Error&) {
                eta_ = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }

    const Vec& initial_state() const { return y0_; }
    double eta() const { return eta_; }

    RadialProfile profile(const Vec& y) {
        if (cfg_.mode == FlowMode::Full) {
            RadialProfile p{n_, d_, y};
            check_profile(p);
            return p;
        }
        PsiResult r = psi_solve_detailed({y, eta_}, n_, d_, cfg_.weight, g_, offset_);
        offset_ = r.offset;
        return std::move(r.profile);
    }

    Vec rhs(const Vec& y) {
        ++evaluations_;
        const RadialProfile p = profile(y);
        Vec G = full_rhs(p, *cfg_.speed, cfg_.weight, g_);
        for (double v : G)
            if (!std::isfinite(v)) throw DomainError("flow: non-finite right-hand side");
        return cfg_.mode == FlowMode::Reduced ? g_.project_meanzero(G) : G;
    }

    long evaluations() const { return evaluations_; }

private:
    const FlowConfig& cfg_;
    const GridCalculus& g_;
    int n_;
    double d_;
    double eta_ = 1.0;
    Vec y0_;
    std::optional<double> offset_;
    long evaluations_ = 0;
};

double error_norm(const Vec& err, const Vec& y, const Vec& ynew, double rtol, double atol) {
    double e = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        e = std::max(e, std::abs(err[i]) / sc);
    }
    return e;
}

void axpy_into(Vec& out, const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
    out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        const double hc = h * c;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += hc * (*k)[i];
    }
}


// One explicit or semi-implicit step attempt: returns the candidate state and
// a scaled error estimate (<= 1 means accept).
struct Attempt {
    Vec y;
    double err;
};

class DormandPrince {
public:
    DormandPrince(System& sys, const FlowConfig& cfg) : sys_(sys), cfg_(cfg) {}

    static constexpr double order = 5.0;

    Attempt attempt(const Vec& y, double h) {
        if (!fsal_valid_) {
            k1_ = sys_.rhs(y);
            fsal_valid_ = true;
        }
        Vec tmp;
        axpy_into(tmp, y, h, {{a21, &k1_}});
        const Vec k2 = sys_.rhs(tmp);
        axpy_into(tmp, y, h, {{a31, &k1_}, {a32, &k2}});
        const Vec k3 = sys_.rhs(tmp);
        axpy_into(tmp, y, h, {{a41, &k1_}, {a42, &k2}, {a43, &k3}});
        const Vec k4 = sys_.rhs(tmp);
        axpy_into(tmp, y, h, {{a51, &k1_}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        const Vec k5 = sys_.rhs(tmp);
        axpy_into(tmp, y, h, {{a61, &k1_}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        const Vec k6 = sys_.rhs(tmp);
        Vec ynew;
        axpy_into(ynew, y, h, {{b1, &k1_}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        k7_ = sys_.rhs(ynew);
        Vec err(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7_[i]);
        const double e = error_norm(err, y, ynew, cfg_.rtol, cfg_.atol);
        return {std::move(ynew), e};
    }

    void accept() { k1_.swap(k7_); }
    void reject() {}

    // Initial step guess from the size of the first derivative.
    double initial_step(const Vec& y) {
        k1_ = sys_.rhs(y);
        fsal_valid_ = true;
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double sc = cfg_.atol + cfg_.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1_[i]) / sc);
        }
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        return std::min(h, cfg_.t_end);
    }

private:
    System& sys_;
    const FlowConfig& cfg_;
    Vec k1_, k7_;
    bool fsal_valid_ = false;
};

// IMEX ARS(2,2,2): the linear part A u = kdiff u'' is solved exactly in the
// cosine basis, the remainder G - A u is explicit. The error estimate comes
// from step doubling.
class SemiImplicit {
public:
    SemiImplicit(System& sys, const FlowConfig& cfg, const GridCalculus& g, double kdiff)
        : sys_(sys), cfg_(cfg), g_(g), kdiff_(kdiff) {}

    static constexpr double order = 2.0;

    Attempt attempt(const Vec& y, double h) {
        const Vec big = step(y, h);
        const Vec half = step(step(y, 0.5 * h), 0.5 * h);
        Vec err(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) err[i] = (half[i] - big[i]) / 3.0;
        Vec ynew = half;
        for (std::size_t i = 0; i < y.size(); ++i) ynew[i] += err[i];
        const double e = error_norm(err, y, ynew, cfg_.rtol, cfg_.atol);
        return {std::move(ynew), e};
    }
    void accept() {}
    void reject() {}

    double initial_step(const Vec&) { return std::min(1e-4, cfg_.t_end); }

private:
    Vec apply_A(const Vec& u) const {
        Vec v = g_.second_derivative(u);
        for (double& x : v) x *= kdiff_;
        return v;
    }
    Vec explicit_part(const Vec& u) {
        Vec G = sys_.rhs(u);
        const Vec Au = apply_A(u);
        for (std::size_t i = 0; i < G.size(); ++i) G[i] -= Au[i];
        return G;
    }
    // (I - tau A)^{-1} in the cosine basis.
    Vec solve(const Vec& rhs, double tau) const {
        Vec a = g_.cosine_coefficients(rhs);
        const double w = std::numbers::pi / g_.width();
        for (std::size_t k = 0; k < a.size(); ++k) a[k] /= 1.0 + tau * kdiff_ * (w * k) * (w * k);
        return g_.from_cosine_coefficients(a);
    }
    Vec step(const Vec& y, double h) {
        const double gam = 1.0 - 1.0 / std::numbers::sqrt2;
        const double del = 1.0 - 1.0 / (2.0 * gam);
        const std::size_t N = y.size();
        const Vec E1 = explicit_part(y);
        Vec r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + h * gam * E1[i];
        const Vec U2 = solve(r, h * gam);
        const Vec E2 = explicit_part(U2);
        const Vec AU2 = apply_A(U2);
        for (std::size_t i = 0; i < N; ++i)
            r[i] = y[i] + h * ((1.0 - gam) * AU2[i] + del * E1[i] + (1.0 - del) * E2[i]);
        return solve(r, h * gam);
    }

    System& sys_;
    const FlowConfig& cfg_;
    const GridCalculus& g_;
    double kdiff_;
};

// Event check on an accepted profile.
std::optional<Termination> check_events(const RadialProfile& p, const FlowConfig& cfg, const GridCalculus& g) {
    if (p.min() <= cfg.min_rho) return Termination::AxisApproach;
    const SurfaceFields f = surface_fields(p, g);
    for (const auto& k : f.kappa)
        if (!(cfg.weight.eval(k) > 0.0)) return Termination::WeightNonPositive;
    return std::nullopt;
}

template <class Stepper>
Trajectory run(const FlowConfig& cfg, const GridCalculus& g, System& sys, Stepper& stepper) {
    Trajectory tr;
    Vec y = sys.initial_state();
    double t = 0.0;

    auto record = [&](const RadialProfile& p) {
        tr.times.push_back(t);
        tr.wvol.push_back(weighted_volume(p, cfg.weight, g));
        double m = g.mean(p.values), dev = 0.0;
        for (double v : p.values) dev = std::max(dev, std::abs(v - m));
        tr.sup_dev.push_back(dev);
        double eta = sys.eta();
        if (cfg.mode == FlowMode::Full) {
            // Diagnostic only: near an event the inverse may not exist.
            try {
                eta = psi_inverse(p, cfg.weight, g).eta;
            } catch (const Error&) {
                eta = std::numeric_limits<double>::quiet_NaN();
            }
        }
        tr.eta.push_back(eta);
        tr.states.push_back(p);
    };

    {
        const RadialProfile p0 = sys.profile(y);
        if (p0.min() <= 0.0) throw DomainError("flow: initial profile is not positive");
        for (const auto& k : surface_fields(p0, g).kappa)
            if (!(cfg.weight.eval(k) > 0.0)) throw DomainError("flow: weight Xi is not positive on the initial profile");
        record(p0);
    }

    const int n_records = static_cast<int>(std::ceil(cfg.t_end / cfg.record_every - 1e-9));
    auto record_time = [&](int i) { return i >= n_records ? cfg.t_end : i * cfg.record_every; };
    int next_record = 1;

    double h = stepper.initial_step(y);
    constexpr double beta = 0.04;
    const double alpha = 1.0 / Stepper::order - 0.75 * beta;
    double err_prev = 1e-4;
    const double h_min_factor = 1e-14;

    while (t < cfg.t_end) {
        if (tr.stats.accepted + tr.stats.rejected >= cfg.max_steps)
            throw IntegrationError("flow: step budget exhausted", t, y);
        const double target = record_time(next_record);
        bool hits_record = false;
        double h_try = h;
        if (t + h_try >= target - 1e-12 * std::max(1.0, target)) {
            h_try = target - t;
            hits_record = true;
        }
        if (h_try < h_min_factor * std::max(1.0, t))
            throw IntegrationError("flow: step size underflow at t = " + std::to_string(t), t, y);

        Attempt a;
        bool ok = true;
        try {
            a = stepper.attempt(y, h_try);
            ok = std::isfinite(a.err);
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) {
            ++tr.stats.rejected;
            stepper.reject();
            h = 0.25 * h_try;
            continue;
        }
        if (a.err > 1.0) {
            ++tr.stats.rejected;
            stepper.reject();
            const double fac = std::max(0.2, 0.9 * std::pow(a.err, -alpha));
            h = h_try * std::min(1.0, fac);
            continue;
        }
        ++tr.stats.accepted;
        stepper.accept();
        y = std::move(a.y);
        t = hits_record ? target : t + h_try;

        const double e = std::max(a.err, 1e-10);
        double fac = 0.9 * std::pow(e, -alpha) * std::pow(err_prev, beta);
        fac = std::clamp(fac, 0.2, 10.0);
        err_prev = e;
        // A record-clamped step says nothing about the natural step size.
        h = hits_record ? std::max(h, h_try * fac) : h_try * fac;

        RadialProfile p;
        try {
            p = sys.profile(y);
        } catch (const Error& ex) {
            throw IntegrationError(std::string("flow: state left the admissible set: ") + ex.what(), t, y);
        }
        if (const auto ev = check_events(p, cfg, g)) {
            record(p);
            tr.termination = *ev;
            tr.message = "terminated at t = " + std::to_string(t) + " (" + to_string(*ev) + ")";
            break;
        }
        if (hits_record) {
            record(p);
            ++next_record;
        }
    }
    tr.stats.rhs_evaluations = sys.evaluations();
    if (tr.termination == Termination::Completed) tr.message = "completed";
    return tr;
}

}  // namespace

Trajectory integrate_from(const FlowConfig& cfg, const RadialProfile& u0) {
    validate(cfg);
    if (u0.size() != cfg.N || u0.n != cfg.n) throw DomainError("flow: initial profile does not match the grid");
    const GridCalculus g(cfg.N, cfg.d, cfg.diff_mode);
    System sys(cfg, g, u0);
    if (cfg.semi_implicit) {
        const double kdiff = cfg.speed->eta_profile(sys.eta()).Fn;
        SemiImplicit stepper(sys, cfg, g, kdiff);
        return run(cfg, g, sys, stepper);
    }
    DormandPrince stepper(sys, cfg);
    return run(cfg, g, sys, stepper);
}

Trajectory integrate(const FlowConfig& cfg) {
    validate(cfg);
    return integrate_from(cfg, make_initial_profile(cfg.initial, cfg.n, cfg.d, cfg.N));
}

double conservation_drift(const Trajectory& t) {
    if (t.empty()) throw DomainError("conservation_drift: empty trajectory");
    double m = 0.0;
    for (double w : t.wvol) m = std::max(m, std::abs(w - t.wvol.front()));
    return m / std::abs(t.wvol.front());
}

LineFit decay_rate_fit(const Trajectory& t, double t_lo, double t_hi) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        if (t.times[i] < t_lo || t.times[i] > t_hi) continue;
        if (!(t.sup_dev[i] > 0.0)) continue;
        x.push_back(t.times[i]);
        y.push_back(std::log(t.sup_dev[i]));
    }
    if (x.size() < 5)
        throw InsufficientDataError("decay_rate_fit: fewer than 5 records with positive deviation in the window");
    return fit_line(x, y);
}

double equivalence_check(const FlowConfig& cfg) {
    FlowConfig full = cfg, reduced = cfg;
    full.mode = FlowMode::Full;
    reduced.mode = FlowMode::Reduced;
    const RadialProfile u0 = make_initial_profile(cfg.initial, cfg.n, cfg.d, cfg.N);
    const Trajectory a = integrate_from(full, u0);
    const Trajectory b = integrate_from(reduced, u0);
    const std::size_t m = std::min(a.times.size(), b.times.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, a.times[i]))
            throw Error("equivalence_check: record times differ");
        for (int j = 0; j < cfg.N; ++j)
            worst = std::max(worst, std::abs(a.states[i].values[j] - b.states[i].values[j]));
    }
    return worst;
}

double mirror_asymmetry(const RadialProfile& p) {
    const int N = p.size();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
        const double diff = p.values[j] - p.values[N - 1 - j];
        num += diff * diff;
        den += p.values[j] * p.values[j];
    }
    return std::sqrt(num / den);
}

}  // namespace curvlab
