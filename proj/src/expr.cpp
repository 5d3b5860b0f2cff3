#include "thinfilm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view text, std::string_view vars, Expr& out)
      : text_(text), vars_(vars), out_(out) {}

  void run() {
    const int root = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    (void)root;  // root is the last arena entry by construction
  }

 private:
  std::string_view text_;
  std::string_view vars_;
  Expr& out_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at position " + std::to_string(pos_ + 1) + " in \"" +
                      std::string(text_) + "\": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int emit(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (consume('+')) {
        const int rhs = parse_product();
        lhs = emit({Expr::Op::Add, 0.0, 0, lhs, rhs});
      } else if (consume('-')) {
        const int rhs = parse_product();
        lhs = emit({Expr::Op::Sub, 0.0, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        const int rhs = parse_unary();
        lhs = emit({Expr::Op::Mul, 0.0, 0, lhs, rhs});
      } else if (consume('/')) {
        const int rhs = parse_unary();
        lhs = emit({Expr::Op::Div, 0.0, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (consume('-')) {
      const int a = parse_unary();
      return emit({Expr::Op::Neg, 0.0, 0, a, -1});
    }
    return parse_power();
  }

  // right-associative: 2^3^2 = 512
  int parse_power() {
    const int base = parse_atom();
    if (consume('^')) {
      const int exp = parse_unary();
      return emit({Expr::Op::Pow, 0.0, 0, base, exp});
    }
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (!consume(')')) fail("missing closing parenthesis");
      return inner;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<size_t>(end - begin);
      if (!std::isfinite(v)) fail("number out of range");
      return emit({Expr::Op::Num, v, 0, -1, -1});
    }

    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      const std::string_view word = text_.substr(pos_, end - pos_);
      if (word == "pi") {
        pos_ = end;
        return emit({Expr::Op::Num, std::numbers::pi, 0, -1, -1});
      }
      if (word == "sin" || word == "cos" || word == "exp") {
        pos_ = end;
        if (!consume('(')) fail("function " + std::string(word) + " needs parentheses");
        const int arg = parse_sum();
        if (!consume(')')) fail("missing closing parenthesis");
        const Expr::Op op = word == "sin"   ? Expr::Op::Sin
                            : word == "cos" ? Expr::Op::Cos
                                            : Expr::Op::Exp;
        return emit({op, 0.0, 0, arg, -1});
      }
      if (word.size() == 1 && (word[0] == 'x' || word[0] == 'y' || word[0] == 't')) {
        if (vars_.find(word[0]) == std::string_view::npos) {
          fail("variable " + std::string(word) + " is not available in this context");
        }
        pos_ = end;
        return emit({Expr::Op::Var, 0.0, word[0], -1, -1});
      }
      fail("unknown name \"" + std::string(word) + "\"");
    }

    fail(std::string("unexpected character '") + c + "'");
  }
};

Expr Expr::parse(std::string_view text, std::string_view vars) {
  Expr e;
  e.text_ = std::string(text);
  ExprParser(text, vars, e).run();
  return e;
}

double Expr::eval(double x, double y, double t) const {
  if (nodes_.empty()) throw NumericsError("eval of an empty expression");
  // children always precede parents, so a single sweep suffices
  std::vector<double> val(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Num:
        val[i] = n.value;
        break;
      case Op::Var:
        val[i] = n.var == 'x' ? x : (n.var == 'y' ? y : t);
        break;
      case Op::Add:
        val[i] = val[n.a] + val[n.b];
        break;
      case Op::Sub:
        val[i] = val[n.a] - val[n.b];
        break;
      case Op::Mul:
        val[i] = val[n.a] * val[n.b];
        break;
      case Op::Div:
        val[i] = val[n.a] / val[n.b];
        break;
      case Op::Pow:
        val[i] = std::pow(val[n.a], val[n.b]);
        break;
      case Op::Neg:
        val[i] = -val[n.a];
        break;
      case Op::Sin:
        val[i] = std::sin(val[n.a]);
        break;
      case Op::Cos:
        val[i] = std::cos(val[n.a]);
        break;
      case Op::Exp:
        val[i] = std::exp(val[n.a]);
        break;
    }
  }
  return val.back();
}

bool Expr::uses_var(char v) const {
  for (const Node& n : nodes_) {
    if (n.op == Op::Var && n.var == v) return true;
  }
  return false;
}

}  // namespace thinfilm
