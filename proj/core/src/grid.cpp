#include "curvlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {
namespace {

// FFTW's planner is not re-entrant; plan creation and destruction go through
// this lock. Execution with the new-array interface is thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

struct GridCalculus::Plans {
    fftw_plan dct = nullptr;  // REDFT00 of length N
    fftw_plan dst = nullptr;  // RODFT00 of length N-2

    explicit Plans(int N) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        Vec a(N), b(N);
        dct = fftw_plan_r2r_1d(N, a.data(), b.data(), FFTW_REDFT00, kPlanFlags);
        dst = fftw_plan_r2r_1d(N - 2, a.data(), b.data(), FFTW_RODFT00, kPlanFlags);
        if (!dct || !dst) throw Error("GridCalculus: FFTW planning failed");
    }
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (dct) fftw_destroy_plan(dct);
        if (dst) fftw_destroy_plan(dst);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;

    void dct_exec(const double* in, double* out) const {
        fftw_execute_r2r(dct, const_cast<double*>(in), out);
    }
    void dst_exec(const double* in, double* out) const {
        fftw_execute_r2r(dst, const_cast<double*>(in), out);
    }
};

GridCalculus::GridCalculus(int N, double d, DiffMode mode) : N_(N), d_(d), mode_(mode) {
    if (N < 16) throw DomainError("GridCalculus: N must be at least 16");
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("GridCalculus: width must be positive");
    plans_ = std::make_shared<const Plans>(N);
}

Vec GridCalculus::nodes() const {
    return sample([](double z) { return z; });
}

void GridCalculus::check_size(const Vec& u) const {
    if (static_cast<int>(u.size()) != N_) throw DomainError("GridCalculus: vector size does not match grid");
}

Vec GridCalculus::cosine_coefficients(const Vec& u) const {
    check_size(u);
    Vec y(N_);
    plans_->dct_exec(u.data(), y.data());
    const double scale = 1.0 / (2.0 * (N_ - 1));
    for (int k = 0; k < N_; ++k) y[k] *= (k == 0 || k == N_ - 1) ? scale : 2.0 * scale;
    return y;
}

Vec GridCalculus::from_cosine_coefficients(const Vec& a) const {
    check_size(a);
    // Undo the interior doubling, then REDFT00 reproduces the sum exactly.
    Vec y(a);
    for (int k = 1; k < N_ - 1; ++k) y[k] *= 0.5;
    Vec u(N_);
    plans_->dct_exec(y.data(), u.data());
    return u;
}

void GridCalculus::spectral(const Vec& u, Vec* du, Vec* ddu) const {
    const int N = N_;
    Vec y(N);
    plans_->dct_exec(u.data(), y.data());
    const double norm = 1.0 / (2.0 * (N - 1));
    const double w = std::numbers::pi / d_;
    if (ddu) {
        Vec t(N);
        for (int k = 0; k < N; ++k) {
            const double kw = k * w;
            t[k] = -kw * kw * y[k];
        }
        ddu->resize(N);
        plans_->dct_exec(t.data(), ddu->data());
        for (double& v : *ddu) v *= norm;
    }
    if (du) {
        // u' = sum_{k=1}^{N-2} -a_k (k pi/d) sin(k pi z/d); the k = N-1 sine
        // vanishes at every node.
        Vec x(N - 2), s(N - 2);
        for (int k = 1; k <= N - 2; ++k) x[k - 1] = -(2.0 * norm * y[k]) * k * w;
        plans_->dst_exec(x.data(), s.data());
        du->assign(N, 0.0);
        for (int j = 1; j <= N - 2; ++j) (*du)[j] = 0.5 * s[j - 1];
    }
}

void GridCalculus::finite_difference(const Vec& u, Vec* du, Vec* ddu) const {
    const int N = N_;
    const double h = spacing();
    // Even reflection about both ends: u[-i] = u[i], u[N-1+i] = u[N-1-i].
    auto at = [&](int j) {
        if (j < 0) j = -j;
        if (j > N - 1) j = 2 * (N - 1) - j;
        return u[j];
    };
    if (du) {
        du->assign(N, 0.0);
        for (int j = 1; j < N - 1; ++j)
            (*du)[j] = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
    }
    if (ddu) {
        ddu->resize(N);
        for (int j = 0; j < N; ++j)
            (*ddu)[j] = (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1) - at(j - 2)) / (12.0 * h * h);
    }
}

Vec GridCalculus::first_derivative(const Vec& u) const {
    check_size(u);
    Vec du;
    if (mode_ == DiffMode::SpectralCosine)
        spectral(u, &du, nullptr);
    else
        finite_difference(u, &du, nullptr);
    return du;
}

Vec GridCalculus::second_derivative(const Vec& u) const {
    check_size(u);
    Vec ddu;
    if (mode_ == DiffMode::SpectralCosine)
        spectral(u, nullptr, &ddu);
    else
        finite_difference(u, nullptr, &ddu);
    return ddu;
}

void GridCalculus::derivatives(const Vec& u, Vec& du, Vec& ddu) const {
    check_size(u);
    if (mode_ == DiffMode::SpectralCosine)
        spectral(u, &du, &ddu);
    else
        finite_difference(u, &du, &ddu);
}

double GridCalculus::integrate(const Vec& u) const {
    check_size(u);
    double s = 0.5 * (u.front() + u.back());
    for (int j = 1; j < N_ - 1; ++j) s += u[j];
    return s * spacing();
}

double GridCalculus::mean(const Vec& u) const { return integrate(u) / d_; }

double GridCalculus::dot(const Vec& u, const Vec& v) const {
    check_size(u);
    check_size(v);
    double s = 0.5 * (u.front() * v.front() + u.back() * v.back());
    for (int j = 1; j < N_ - 1; ++j) s += u[j] * v[j];
    return s * spacing();
}

Vec GridCalculus::project_meanzero(const Vec& u) const {
    const double m = mean(u);
    Vec r(u);
    for (double& v : r) v -= m;
    return r;
}

}  // namespace curvlab
