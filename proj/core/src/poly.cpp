#include "gricci/poly.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gricci {

Polynomial Polynomial::constant(int nvars, double value) {
  Polynomial p(nvars);
  p.add_term(std::vector<int>(nvars, 0), value);
  return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  e.at(index) = 1;
  p.add_term(e, 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_)
    d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

bool Polynomial::is_zero() const { return terms_.empty(); }

void Polynomial::add_term(const std::vector<int>& exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != nvars_)
    throw std::invalid_argument("Polynomial: exponent vector has wrong length");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::eval(const Eigen::VectorXd& x) const {
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x(i);
    s += m;
  }
  return s;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> e2 = e;
    e2[var] -= 1;
    out.add_term(e2, c * e[var]);
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(nvars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      std::vector<int> e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
      out.add_term(e, c1 * c2);
    }
  return out;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

double Polynomial::max_abs_coeff() const {
  double m = 0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::prune() {}

}  // namespace gricci
