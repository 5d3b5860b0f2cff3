#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thinfilm {

// Closed-form scalar expression in a declared subset of the variables
// {x, y, t}. Grammar: + - * / ^ (right-associative), unary minus, sin, cos,
// exp, parentheses, decimal literals, and the constant pi. Parsing a variable
// outside the declared subset is a ConfigError, so a profile expression
// cannot silently depend on y.
class Expr {
 public:
  Expr() = default;

  // vars: any combination of 'x', 'y', 't'.
  static Expr parse(std::string_view text, std::string_view vars);

  double eval(double x, double y, double t) const;
  bool uses_var(char v) const;
  const std::string& text() const { return text_; }
  bool empty() const { return nodes_.empty(); }

  // same source text means same tree, which is all equality is used for
  friend bool operator==(const Expr& a, const Expr& b) { return a.text_ == b.text_; }

 private:
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
  struct Node {
    Op op;
    double value = 0.0;  // Num payload
    char var = 0;        // Var payload
    int a = -1;          // child indices into nodes_
    int b = -1;
  };

  // post-order arena: children precede parents, eval is one forward pass
  std::vector<Node> nodes_;
  std::string text_;

  friend class ExprParser;
};

}  // namespace thinfilm
