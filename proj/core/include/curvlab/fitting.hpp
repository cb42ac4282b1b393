#pragma once

#include <vector>

namespace curvlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;  // root-mean-square residual of the fit
    int samples = 0;
};

// Ordinary least-squares line through (x, y).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares polynomial of the given degree, returned as monomial
// coefficients about x = 0 (a_0 + a_1 x + ...). The solve runs in a variable
// scaled to [-1, 1] with column-pivoting QR, then maps back.
std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, int degree);

}  // namespace curvlab
