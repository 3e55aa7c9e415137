#pragma once

#include <Eigen/Dense>
#include <complex>

#include "gricci/poly.hpp"

namespace gricci {

/// A smooth compactly supported scalar field on H^3 (halfspace chart):
/// amplitude * poly(x, y, h) * bump(|q - center| / radius), where bump is
/// the standard exp(1 - 1/(1 - r^2)) profile, normalized to 1 at the
/// center. Zero amplitude means the component is absent.
struct BumpField {
  std::complex<double> amplitude{0, 0};
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
  Polynomial poly = Polynomial::constant(3, 1.0);

  std::complex<double> eval(const Eigen::Vector3d& q) const;
  bool is_zero() const { return amplitude == std::complex<double>(0, 0); }
};

double bump_profile(double r);

/// Compactly supported test form of degree 0, 1 or 2 with closed-form
/// components in the frame (dz, dzbar, dh), z = x + iy.
struct TestForm {
  int degree = 1;
  BumpField f;                    // degree 0
  BumpField aplus, aminus, ah;    // degree 1
  BumpField cpm, cph, cmh;        // degree 2: dz^dzbar, dz^dh, dzbar^dh

  std::complex<double> eval0(const Eigen::Vector3d& q) const;
  std::complex<double> eval1(const Eigen::Vector3d& q, const Eigen::Vector3d& v) const;
  std::complex<double> eval2(const Eigen::Vector3d& q, const Eigen::Vector3d& v,
                             const Eigen::Vector3d& w) const;

  /// Bounding box of the union of component supports.
  Eigen::AlignedBox3d support() const;

  /// Real bump 1-form amplitude * bump * dx = (amp/2) bump (dz + dzbar).
  static TestForm bump_one_form(const Eigen::Vector3d& center, double radius,
                                double amplitude = 1.0);
  /// Bump 0-form.
  static TestForm bump_zero_form(const Eigen::Vector3d& center, double radius,
                                 double amplitude = 1.0);
  /// Real bump 2-form amplitude * bump * dx^dy = (i amp/2) bump dz^dzbar.
  static TestForm bump_two_form(const Eigen::Vector3d& center, double radius,
                                double amplitude = 1.0);
  /// Bump 1-form with only a dh component (should integrate to zero in
  /// the boundary lemmas).
  static TestForm bump_dh_form(const Eigen::Vector3d& center, double radius,
                               double amplitude = 1.0);
  /// Bump 2-form with only vertical components (dz^dh, dzbar^dh), i.e.
  /// amplitude * bump * dx^dh.
  static TestForm bump_vertical_two_form(const Eigen::Vector3d& center, double radius,
                                         double amplitude = 1.0);
};

void validate_form(const TestForm& form);

}  // namespace gricci
