#include "semistab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "semistab/error.hpp"

namespace semistab {

namespace detail {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Abs, Sqrt, Sign };

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

}  // namespace detail

namespace {

using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

double apply_unary(Op op, double a) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    case Op::Abs: return std::fabs(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return std::pow(a, b);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

NodePtr make_unary(Op op, NodePtr a) {
  if (a->op == Op::Const) return make_const(apply_unary(op, a->value));
  if (op == Op::Neg && a->op == Op::Neg) return a->a;
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(apply_binary(op, a->value, b->value));
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary(Op::Neg, b);
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return make_unary(Op::Neg, b);
      if (is_const(b, -1.0)) return make_unary(Op::Neg, a);
      break;
    case Op::Div:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return make_const(1.0);
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double eval(const Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      return static_cast<std::size_t>(n.var) < x.size() ? x[static_cast<std::size_t>(n.var)]
                                                        : std::numeric_limits<double>::quiet_NaN();
    case Op::Neg:
    case Op::Exp:
    case Op::Log:
    case Op::Abs:
    case Op::Sqrt:
    case Op::Sign: return apply_unary(n.op, eval(*n.a, x));
    default: return apply_binary(n.op, eval(*n.a, x), eval(*n.b, x));
  }
}

NodePtr differentiate(const NodePtr& n, int v) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->var == v ? 1.0 : 0.0);
    case Op::Neg: return make_unary(Op::Neg, differentiate(n->a, v));
    case Op::Add: return make_binary(Op::Add, differentiate(n->a, v), differentiate(n->b, v));
    case Op::Sub: return make_binary(Op::Sub, differentiate(n->a, v), differentiate(n->b, v));
    case Op::Mul:
      return make_binary(Op::Add, make_binary(Op::Mul, differentiate(n->a, v), n->b),
                         make_binary(Op::Mul, n->a, differentiate(n->b, v)));
    case Op::Div: {
      auto num = make_binary(Op::Sub, make_binary(Op::Mul, differentiate(n->a, v), n->b),
                             make_binary(Op::Mul, n->a, differentiate(n->b, v)));
      return make_binary(Op::Div, num, make_binary(Op::Pow, n->b, make_const(2.0)));
    }
    case Op::Pow: {
      auto da = differentiate(n->a, v);
      if (n->b->op == Op::Const) {
        const double k = n->b->value;
        return make_binary(Op::Mul, make_binary(Op::Mul, make_const(k), make_binary(Op::Pow, n->a, make_const(k - 1.0))),
                           da);
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      auto db = differentiate(n->b, v);
      auto inner = make_binary(Op::Add, make_binary(Op::Mul, db, make_unary(Op::Log, n->a)),
                               make_binary(Op::Div, make_binary(Op::Mul, n->b, da), n->a));
      return make_binary(Op::Mul, n, inner);
    }
    case Op::Exp: return make_binary(Op::Mul, n, differentiate(n->a, v));
    case Op::Log: return make_binary(Op::Div, differentiate(n->a, v), n->a);
    case Op::Abs: return make_binary(Op::Mul, make_unary(Op::Sign, n->a), differentiate(n->a, v));
    case Op::Sqrt:
      return make_binary(Op::Div, differentiate(n->a, v), make_binary(Op::Mul, make_const(2.0), n));
    case Op::Sign: return make_const(0.0);
  }
  return make_const(0.0);
}

int max_var(const Node& n) {
  switch (n.op) {
    case Op::Const: return -1;
    case Op::Var: return n.var;
    default: {
      int m = n.a ? max_var(*n.a) : -1;
      if (n.b) m = std::max(m, max_var(*n.b));
      return m;
    }
  }
}

// Printing precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: return (n.value < 0.0 || std::signbit(n.value)) ? 3 : 5;
    default: return 5;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    case Op::Sign: return "sign";
    default: return "?";
  }
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Node& n, std::string& out) {
  static const char* names[] = {"x", "y", "z"};
  switch (n.op) {
    case Op::Const: out += format_double(n.value); return;
    case Op::Var: out += names[n.var]; return;
    case Op::Neg:
      out += '-';
      print_child(*n.a, 3, out);
      return;
    case Op::Add:
      print_child(*n.a, 1, out);
      out += " + ";
      print_child(*n.b, 2, out);
      return;
    case Op::Sub:
      print_child(*n.a, 1, out);
      out += " - ";
      print_child(*n.b, 2, out);
      return;
    case Op::Mul:
      print_child(*n.a, 2, out);
      out += '*';
      print_child(*n.b, 3, out);
      return;
    case Op::Div:
      print_child(*n.a, 2, out);
      out += '/';
      print_child(*n.b, 3, out);
      return;
    case Op::Pow:
      print_child(*n.a, 5, out);
      out += '^';
      print_child(*n.b, 3, out);
      return;
    default:
      out += function_name(n.op);
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view text, int max_dims) : text_(text), max_dims_(max_dims) {}

  NodePtr run() {
    auto n = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(text_) + "' at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make_binary(Op::Add, n, term());
      else if (accept('-')) n = make_binary(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make_binary(Op::Mul, n, unary());
      else if (accept('/')) n = make_binary(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x" || word == "y" || word == "z") {
        const int index = word[0] == 'x' ? 0 : (word[0] == 'y' ? 1 : 2);
        if (index >= max_dims_) fail("variable '" + std::string(word) + "' not available in dimension " +
                                     std::to_string(max_dims_));
        return make_var(index);
      }
      if (word == "pi") return make_const(std::numbers::pi);
      if (word == "e") return make_const(std::numbers::e);
      if (word == "inf") return make_const(std::numeric_limits<double>::infinity());
      Op op;
      if (word == "exp") op = Op::Exp;
      else if (word == "log") op = Op::Log;
      else if (word == "abs") op = Op::Abs;
      else if (word == "sqrt") op = Op::Sqrt;
      else if (word == "sign") op = Op::Sign;
      else fail("unknown identifier '" + std::string(word) + "'");
      if (!accept('(')) fail("expected '(' after " + std::string(word));
      auto arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make_unary(op, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make_const(v);
  }

  std::string_view text_;
  int max_dims_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

Expression::Expression() : root_(make_const(0.0)) {}

Expression::Expression(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}

Expression Expression::constant(double value) { return Expression(make_const(value)); }

Expression Expression::variable(int index) { return Expression(make_var(index)); }

Expression Expression::parse(std::string_view text, int max_dims) {
  return Expression(Parser(text, max_dims).run());
}

double Expression::operator()(double x) const { return eval(*root_, std::span<const double>(&x, 1)); }

double Expression::operator()(std::span<const double> point) const { return eval(*root_, point); }

Expression Expression::derivative(int index) const { return Expression(differentiate(root_, index)); }

std::optional<double> Expression::constant_value() const {
  if (root_->op == Op::Const) return root_->value;
  return std::nullopt;
}

int Expression::max_variable() const { return max_var(*root_); }

std::string Expression::str() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Add, a.root_, b.root_));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Sub, a.root_, b.root_));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Mul, a.root_, b.root_));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Div, a.root_, b.root_));
}
Expression operator-(const Expression& a) { return Expression(make_unary(Op::Neg, a.root_)); }
Expression pow(const Expression& base, const Expression& exponent) {
  return Expression(make_binary(Op::Pow, base.root_, exponent.root_));
}

}  // namespace semistab
