#pragma once

#include <complex>
#include <functional>

namespace gricci {

/// Adaptive 2D quadrature (tensor Simpson with Richardson acceptance) of
/// a complex integrand over [x0,x1] x [y0,y1] to absolute tolerance.
std::complex<double> adaptive_quad_2d(
    const std::function<std::complex<double>(double, double)>& f, double x0,
    double x1, double y0, double y1, double abs_tol, int max_depth = 22);

/// 1D adaptive Simpson, used for surface-integral cross checks.
double adaptive_quad_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 30);

}  // namespace gricci
