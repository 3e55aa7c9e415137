#include "gricci/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace gricci {

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

std::complex<double> BumpField::eval(const Eigen::Vector3d& q) const {
  if (is_zero()) return {0, 0};
  double r = (q - center).norm() / radius;
  double b = bump_profile(r);
  if (b == 0.0) return {0, 0};
  return amplitude * poly.eval(q) * b;
}

namespace {

std::complex<double> dz_of(const Eigen::Vector3d& v) { return {v.x(), v.y()}; }
std::complex<double> dzbar_of(const Eigen::Vector3d& v) { return {v.x(), -v.y()}; }

}  // namespace

std::complex<double> TestForm::eval0(const Eigen::Vector3d& q) const {
  return f.eval(q);
}

std::complex<double> TestForm::eval1(const Eigen::Vector3d& q,
                                     const Eigen::Vector3d& v) const {
  std::complex<double> out{0, 0};
  if (!aplus.is_zero()) out += aplus.eval(q) * dz_of(v);
  if (!aminus.is_zero()) out += aminus.eval(q) * dzbar_of(v);
  if (!ah.is_zero()) out += ah.eval(q) * v.z();
  return out;
}

std::complex<double> TestForm::eval2(const Eigen::Vector3d& q, const Eigen::Vector3d& v,
                                     const Eigen::Vector3d& w) const {
  std::complex<double> out{0, 0};
  if (!cpm.is_zero())
    out += cpm.eval(q) * (dz_of(v) * dzbar_of(w) - dz_of(w) * dzbar_of(v));
  if (!cph.is_zero()) out += cph.eval(q) * (dz_of(v) * w.z() - dz_of(w) * v.z());
  if (!cmh.is_zero()) out += cmh.eval(q) * (dzbar_of(v) * w.z() - dzbar_of(w) * v.z());
  return out;
}

Eigen::AlignedBox3d TestForm::support() const {
  Eigen::AlignedBox3d box;
  auto extend = [&box](const BumpField& c) {
    if (c.is_zero()) return;
    Eigen::Vector3d r(c.radius, c.radius, c.radius);
    box.extend(Eigen::AlignedBox3d(c.center - r, c.center + r));
  };
  extend(f);
  extend(aplus);
  extend(aminus);
  extend(ah);
  extend(cpm);
  extend(cph);
  extend(cmh);
  if (box.isEmpty()) box = Eigen::AlignedBox3d(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  return box;
}

namespace {

BumpField bump_component(const Eigen::Vector3d& center, double radius,
                         std::complex<double> amplitude) {
  BumpField c;
  c.amplitude = amplitude;
  c.center = center;
  c.radius = radius;
  return c;
}

}  // namespace

TestForm TestForm::bump_one_form(const Eigen::Vector3d& center, double radius,
                                 double amplitude) {
  TestForm form;
  form.degree = 1;
  form.aplus = bump_component(center, radius, amplitude / 2.0);
  form.aminus = bump_component(center, radius, amplitude / 2.0);
  return form;
}

TestForm TestForm::bump_zero_form(const Eigen::Vector3d& center, double radius,
                                  double amplitude) {
  TestForm form;
  form.degree = 0;
  form.f = bump_component(center, radius, amplitude);
  return form;
}

TestForm TestForm::bump_two_form(const Eigen::Vector3d& center, double radius,
                                 double amplitude) {
  TestForm form;
  form.degree = 2;
  // dx^dy = (i/2) dz^dzbar
  form.cpm = bump_component(center, radius, std::complex<double>(0, amplitude / 2.0));
  return form;
}

TestForm TestForm::bump_dh_form(const Eigen::Vector3d& center, double radius,
                                double amplitude) {
  TestForm form;
  form.degree = 1;
  form.ah = bump_component(center, radius, amplitude);
  return form;
}

TestForm TestForm::bump_vertical_two_form(const Eigen::Vector3d& center, double radius,
                                          double amplitude) {
  TestForm form;
  form.degree = 2;
  // dx^dh = (1/2)(dz + dzbar)^dh
  form.cph = bump_component(center, radius, amplitude / 2.0);
  form.cmh = bump_component(center, radius, amplitude / 2.0);
  return form;
}

void validate_form(const TestForm& form) {
  if (form.degree < 0 || form.degree > 2)
    throw std::invalid_argument("test form: degree must be 0, 1 or 2");
  auto check = [](const BumpField& c, const char* name) {
    if (c.is_zero()) return;
    if (!(c.radius > 0))
      throw std::invalid_argument(std::string("test form: nonpositive radius in ") + name);
    if (c.poly.nvars() != 3)
      throw std::invalid_argument(std::string("test form: component ") + name +
                                  " needs a 3-variable polynomial");
  };
  bool has01 = !form.f.is_zero();
  bool has1 = !form.aplus.is_zero() || !form.aminus.is_zero() || !form.ah.is_zero();
  bool has2 = !form.cpm.is_zero() || !form.cph.is_zero() || !form.cmh.is_zero();
  if ((form.degree == 0 && (has1 || has2)) || (form.degree == 1 && (has01 || has2)) ||
      (form.degree == 2 && (has01 || has1)))
    throw std::invalid_argument("test form: components of the wrong degree present");
  check(form.f, "f");
  check(form.aplus, "a+");
  check(form.aminus, "a-");
  check(form.ah, "ah");
  check(form.cpm, "c+-");
  check(form.cph, "c+h");
  check(form.cmh, "c-h");
}

}  // namespace gricci
