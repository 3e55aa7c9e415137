#pragma once

#include <memory>
#include <string>

namespace gricci {

/// A closed-form scalar function of the boundary chart coordinates (x, y),
/// parsed from a minimal grammar: numeric literals, x, y, +, -, *, /, ^,
/// exp(...), parentheses.
class Expr {
 public:
  struct Node;

  Expr() = default;  // the constant 1
  static Expr parse(const std::string& text);
  static Expr constant(double c);

  double eval(double x, double y) const;
  const std::string& text() const { return text_; }
  bool is_constant() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_ = "1";
};

}  // namespace gricci
