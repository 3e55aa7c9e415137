#include "gricci/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace gricci {

struct Expr::Node {
  enum Kind { kConst, kX, kY, kAdd, kSub, kMul, kDiv, kPow, kNeg, kExp } kind;
  double value = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Node::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::kConst;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("expr: trailing input at '" + s_.substr(pos_) + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr sum() {
    NodePtr e = product();
    while (true) {
      if (eat('+'))
        e = make(Expr::Node::kAdd, e, product());
      else if (eat('-'))
        e = make(Expr::Node::kSub, e, product());
      else
        return e;
    }
  }

  NodePtr product() {
    NodePtr e = power();
    while (true) {
      if (eat('*'))
        e = make(Expr::Node::kMul, e, power());
      else if (eat('/'))
        e = make(Expr::Node::kDiv, e, power());
      else
        return e;
    }
  }

  NodePtr power() {
    NodePtr base = unary();
    if (eat('^')) return make(Expr::Node::kPow, base, unary());  // right-assoc via recursion
    return base;
  }

  NodePtr unary() {
    if (eat('-')) return make(Expr::Node::kNeg, unary());
    if (eat('+')) return unary();
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw std::invalid_argument("expr: unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) throw std::invalid_argument("expr: missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start) throw std::invalid_argument("expr: bad number");
      pos_ += static_cast<std::size_t>(end - start);
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Expr::Node::kX);
      if (name == "y") return make(Expr::Node::kY);
      if (name == "exp") {
        if (!eat('(')) throw std::invalid_argument("expr: exp expects '('");
        NodePtr arg = sum();
        if (!eat(')')) throw std::invalid_argument("expr: missing ')' after exp");
        return make(Expr::Node::kExp, arg);
      }
      throw std::invalid_argument("expr: unknown identifier '" + name + "'");
    }
    throw std::invalid_argument(std::string("expr: unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node* n, double x, double y) {
  switch (n->kind) {
    case Expr::Node::kConst: return n->value;
    case Expr::Node::kX: return x;
    case Expr::Node::kY: return y;
    case Expr::Node::kAdd: return eval_node(n->lhs.get(), x, y) + eval_node(n->rhs.get(), x, y);
    case Expr::Node::kSub: return eval_node(n->lhs.get(), x, y) - eval_node(n->rhs.get(), x, y);
    case Expr::Node::kMul: return eval_node(n->lhs.get(), x, y) * eval_node(n->rhs.get(), x, y);
    case Expr::Node::kDiv: return eval_node(n->lhs.get(), x, y) / eval_node(n->rhs.get(), x, y);
    case Expr::Node::kPow:
      return std::pow(eval_node(n->lhs.get(), x, y), eval_node(n->rhs.get(), x, y));
    case Expr::Node::kNeg: return -eval_node(n->lhs.get(), x, y);
    case Expr::Node::kExp: return std::exp(eval_node(n->lhs.get(), x, y));
  }
  return 0;
}

bool uses_coords(const Expr::Node* n) {
  if (!n) return false;
  if (n->kind == Expr::Node::kX || n->kind == Expr::Node::kY) return true;
  return uses_coords(n->lhs.get()) || uses_coords(n->rhs.get());
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expr Expr::constant(double c) {
  Expr e;
  e.root_ = make_const(c);
  e.text_ = std::to_string(c);
  return e;
}

double Expr::eval(double x, double y) const {
  if (!root_) return 1.0;
  return eval_node(root_.get(), x, y);
}

bool Expr::is_constant() const { return !root_ || !uses_coords(root_.get()); }

}  // namespace gricci
