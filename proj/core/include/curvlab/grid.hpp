#pragma once

#include <memory>
#include <vector>

namespace curvlab {

using Vec = std::vector<double>;

enum class DiffMode { SpectralCosine, FiniteDifference4 };

// Calculus on the even extension of a function sampled at z_j = j d/(N-1).
//
// The even extension lives on a circle of circumference 2d. In spectral mode
// derivatives come from the cosine series of the samples (DCT-I); in fourth
// order finite-difference mode the stencils use even-reflection ghosts. Both
// modes make u'(0) = u'(d) = 0 hold by construction.
//
// Instances are cheap to copy (transform plans are shared) and all methods are
// const and thread-safe.
class GridCalculus {
public:
    GridCalculus(int N, double d, DiffMode mode = DiffMode::SpectralCosine);

    int size() const noexcept { return N_; }
    double width() const noexcept { return d_; }
    double spacing() const noexcept { return d_ / (N_ - 1); }
    DiffMode mode() const noexcept { return mode_; }

    double node(int j) const noexcept { return j * spacing(); }
    Vec nodes() const;

    // Sample a function of z on the grid.
    template <class F>
    Vec sample(F&& f) const {
        Vec v(N_);
        for (int j = 0; j < N_; ++j) v[j] = f(node(j));
        return v;
    }

    Vec first_derivative(const Vec& u) const;
    Vec second_derivative(const Vec& u) const;
    // Both derivatives from a single forward transform.
    void derivatives(const Vec& u, Vec& du, Vec& ddu) const;

    // Coefficients a_k of u(z) = sum_k a_k cos(k pi z / d), k = 0..N-1.
    Vec cosine_coefficients(const Vec& u) const;
    // Inverse of cosine_coefficients (values at the nodes).
    Vec from_cosine_coefficients(const Vec& a) const;

    // Circle average of the even extension (trapezoid, exact for the cosine basis).
    double mean(const Vec& u) const;
    // Trapezoid integral over [0, d].
    double integrate(const Vec& u) const;
    // Trapezoid inner product over [0, d].
    double dot(const Vec& u, const Vec& v) const;

    // P0[u] = u - mean(u).
    Vec project_meanzero(const Vec& u) const;

private:
    struct Plans;
    int N_;
    double d_;
    DiffMode mode_;
    std::shared_ptr<const Plans> plans_;

    void check_size(const Vec& u) const;
    void spectral(const Vec& u, Vec* du, Vec* ddu) const;
    void finite_difference(const Vec& u, Vec* du, Vec* ddu) const;
};

}  // namespace curvlab
