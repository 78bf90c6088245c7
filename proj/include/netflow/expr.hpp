#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace netflow {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Lexical, Syntax, NonIntegerExponent };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const { return kind_; }
  /// 0-based character offset into the source.
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnaryOp { Neg, Sin, Cos };
enum class BinaryOp { Add, Sub, Mul, Div };

/// Immutable expression tree for a scalar weight w(t) or a profile f(x).
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' integer)?
///   atom   := number | var | 'pi' | ('sin'|'cos') '(' expr ')' | '(' expr ')' | '-' atom
class Expr;

namespace expr_node {
struct Number;
struct Variable;
struct Pi;
struct Unary;
struct Binary;
struct Power;
}  // namespace expr_node

class Expr {
 public:
  using Number = expr_node::Number;
  using Variable = expr_node::Variable;
  using Pi = expr_node::Pi;
  using Unary = expr_node::Unary;
  using Binary = expr_node::Binary;
  using Power = expr_node::Power;
  using Node = std::variant<Number, Variable, Pi, Unary, Binary, Power>;

  /// The constant 0.
  Expr();

  /// `v` must be finite and nonnegative; negation is a Unary node.
  static Expr number(double v);
  static Expr variable(char name = 't');
  static Expr pi();
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  const Node& node() const;

  /// Evaluates with every variable bound to `value`. Throws EvalError on
  /// division by zero.
  double operator()(double value) const;

  bool depends_on_variable() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(Node node);
  std::shared_ptr<const Node> node_;
};

namespace expr_node {
struct Number {
  double value;
};
struct Variable {
  char name;
};
struct Pi {};
struct Unary {
  UnaryOp op;
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Power {
  Expr base;
  int exponent;
};
}  // namespace expr_node

inline const Expr::Node& Expr::node() const { return *node_; }

/// Parses `source`; `variable` is the only free identifier accepted ('t' for
/// weights, 'x' for initial profiles).
Expr parse_expr(std::string_view source, char variable = 't');

/// Canonical text form; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

inline double eval_expr(const Expr& e, double t) { return e(t); }

/// Behaviour of an expression under the shift t -> t + 1.
enum class ShiftParity { Periodic, Antiperiodic, Unknown };

/// Sound structural test for 1-periodicity: the variable may only occur
/// inside sin/cos with argument k*pi*t + c for integer k. Odd k flips sign
/// under the shift, so such factors must pair up.
ShiftParity shift_parity(const Expr& e);
inline bool is_one_periodic(const Expr& e) { return shift_parity(e) == ShiftParity::Periodic; }

/// Zeros in [0, 1) of every sin/cos factor whose argument is affine in the
/// variable, sorted and deduplicated.
std::vector<double> trig_zero_times(const Expr& e);

}  // namespace netflow
