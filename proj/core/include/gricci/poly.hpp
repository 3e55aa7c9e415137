#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace gricci {

/// Multivariate polynomial with real coefficients, exact derivatives.
/// Exponent vectors all share the ambient dimension nvars.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  static Polynomial constant(int nvars, double value);
  static Polynomial variable(int nvars, int index);

  int nvars() const { return nvars_; }
  int degree() const;
  bool is_zero() const;

  void add_term(const std::vector<int>& exponents, double coeff);

  double eval(const Eigen::VectorXd& x) const;
  Polynomial derivative(int var) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  double max_abs_coeff() const;
  const std::map<std::vector<int>, double>& terms() const { return terms_; }

 private:
  int nvars_ = 0;
  std::map<std::vector<int>, double> terms_;
  void prune();
};

}  // namespace gricci
