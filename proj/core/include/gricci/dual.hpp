#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace gricci {

/// Forward-mode dual number carrying N directional derivatives.
template <int N>
struct Dual {
  double v = 0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit by design
  static Dual seed(double value, int slot) {
    Dual x(value);
    x.d[slot] = 1.0;
    return x;
  }

  Dual operator-() const {
    Dual r(-v);
    for (int i = 0; i < N; ++i) r.d[i] = -d[i];
    return r;
  }
  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    double inv2 = 1.0 / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }
  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
};

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  double g = 0.5 / r.v;
  for (int i = 0; i < N; ++i) r.d[i] = g * a.d[i];
  return r;
}

template <int N>
Dual<N> exp(const Dual<N>& a) {
  Dual<N> r(std::exp(a.v));
  for (int i = 0; i < N; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) { return x.v; }

using std::exp;
using std::sqrt;

}  // namespace gricci
