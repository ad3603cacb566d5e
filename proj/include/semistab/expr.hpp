#pragma once

// Minimal arithmetic expressions over the variables x, y, z.
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | 'x' | 'y' | 'z' | 'pi' | 'e' | 'inf'
//            | fn '(' expr ')' | '(' expr ')'
//   fn      := exp | log | abs | sqrt | sign
//
// Expressions are immutable and cheap to copy; evaluation is pure and thread safe.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace semistab {

namespace detail {
struct Node;
}

class Expression {
 public:
  /// The constant 0.
  Expression();

  static Expression constant(double value);
  static Expression variable(int index);

  /// Parses `text`; variables beyond `max_dims` are rejected. Throws ParseError.
  static Expression parse(std::string_view text, int max_dims = 3);

  double operator()(double x) const;
  double operator()(std::span<const double> point) const;

  /// Symbolic partial derivative with respect to variable `index`.
  Expression derivative(int index = 0) const;

  /// Value when the expression does not depend on any variable.
  std::optional<double> constant_value() const;
  bool is_constant() const { return constant_value().has_value(); }

  /// Highest variable index referenced, or -1 for constants.
  int max_variable() const;

  /// Text in the input grammar; parse(str()) evaluates identically.
  std::string str() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& base, const Expression& exponent);

 private:
  explicit Expression(std::shared_ptr<const detail::Node> root);
  std::shared_ptr<const detail::Node> root_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace semistab
