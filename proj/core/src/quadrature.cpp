#include "gricci/quadrature.hpp"

#include <array>
#include <cmath>

namespace gricci {

namespace {

using Cd = std::complex<double>;
using Fn2 = std::function<Cd(double, double)>;

// tensor-product Simpson on a 3x3 stencil
Cd simpson_cell(const Fn2& f, double x0, double x1, double y0, double y1,
                const std::array<Cd, 9>& v) {
  static const double wts[3] = {1.0, 4.0, 1.0};
  Cd s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += wts[i] * wts[j] * v[i * 3 + j];
  (void)f;
  return s * ((x1 - x0) * (y1 - y0) / 36.0);
}

std::array<Cd, 9> sample_cell(const Fn2& f, double x0, double x1, double y0, double y1) {
  std::array<Cd, 9> v;
  double xs[3] = {x0, 0.5 * (x0 + x1), x1};
  double ys[3] = {y0, 0.5 * (y0 + y1), y1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[i * 3 + j] = f(xs[i], ys[j]);
  return v;
}

Cd adaptive_cell(const Fn2& f, double x0, double x1, double y0, double y1,
                 const std::array<Cd, 9>& v, Cd whole, double tol, int depth) {
  double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  std::array<std::array<Cd, 9>, 4> sub;
  double bx[4] = {x0, xm, x0, xm};
  double by[4] = {y0, y0, ym, ym};
  Cd refined = 0;
  std::array<Cd, 4> parts;
  for (int k = 0; k < 4; ++k) {
    sub[k] = sample_cell(f, bx[k], bx[k] + 0.5 * (x1 - x0), by[k], by[k] + 0.5 * (y1 - y0));
    parts[k] = simpson_cell(f, bx[k], bx[k] + 0.5 * (x1 - x0), by[k],
                            by[k] + 0.5 * (y1 - y0), sub[k]);
    refined += parts[k];
  }
  Cd err = refined - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) return refined + err / 15.0;
  Cd total = 0;
  for (int k = 0; k < 4; ++k)
    total += adaptive_cell(f, bx[k], bx[k] + 0.5 * (x1 - x0), by[k],
                           by[k] + 0.5 * (y1 - y0), sub[k], parts[k], tol / 4.0,
                           depth - 1);
  return total;
}

}  // namespace

std::complex<double> adaptive_quad_2d(const Fn2& f, double x0, double x1, double y0,
                                      double y1, double abs_tol, int max_depth) {
  // start from a 4x4 cell split so narrow features are not missed
  Cd total = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double cx0 = x0 + (x1 - x0) * i / 4.0, cx1 = x0 + (x1 - x0) * (i + 1) / 4.0;
      double cy0 = y0 + (y1 - y0) * j / 4.0, cy1 = y0 + (y1 - y0) * (j + 1) / 4.0;
      auto v = sample_cell(f, cx0, cx1, cy0, cy1);
      Cd whole = simpson_cell(f, cx0, cx1, cy0, cy1, v);
      total += adaptive_cell(f, cx0, cx1, cy0, cy1, v, whole, abs_tol / 16.0,
                             max_depth);
    }
  return total;
}

namespace {

double simpson_1d(const std::function<double(double)>& f, double a, double b,
                  double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_1d(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_1d(f, a, m, fa, flm, fm);
  double right = simpson_1d(f, m, b, fm, frm, fb);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive_1d(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_1d(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_quad_1d(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson_1d(f, a, b, fa, fm, fb);
  return adaptive_1d(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace gricci
