#pragma once

// Math expressions over the symbols t, s and x: the formulas that define
// kernels, nonlinearities, right-hand sides and discontinuity curves.
//
// Grammar (ASCII '-' and U+2212 are both accepted as minus):
//   expr    := term (("+" | "-") term)*
//   term    := unary (("*" | "/") unary)*
//   unary   := "-" unary | power
//   power   := primary ("^" unary)?          right-associative
//   primary := number | "t" | "s" | "x" | func "(" expr ")" | "(" expr ")"
//   func    := sin | cos | exp | log | sqrt
//
// Expressions are immutable; copies share structure and are safe to
// evaluate from any number of threads.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace volterra {

enum class Variable : std::uint8_t { T = 0, S = 1, X = 2 };
enum class UnaryOp : std::uint8_t { Neg, Sin, Cos, Exp, Log, Sqrt };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

std::string_view name(Variable v);

struct Bindings {
  std::optional<double> t = std::nullopt;
  std::optional<double> s = std::nullopt;
  std::optional<double> x = std::nullopt;

  std::optional<double> get(Variable v) const;
};

class Expression {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Unary, Binary };

  /// The constant 0.
  Expression();

  static Expression constant(double value);
  static Expression variable(Variable v);
  static Expression unary(UnaryOp op, Expression operand);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

  Kind kind() const;
  double value() const;           // Constant
  Variable variable() const;      // Variable
  UnaryOp unary_op() const;       // Unary
  BinaryOp binary_op() const;     // Binary
  Expression operand() const;     // Unary
  Expression lhs() const;         // Binary
  Expression rhs() const;         // Binary

  bool uses(Variable v) const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Throws UnboundVariableError or DomainError; never returns NaN from a
  /// domain violation.
  double evaluate(const Bindings& bindings) const;

  /// Exact symbolic derivative, lightly simplified.
  Expression derivative(Variable wrt) const;

  /// Text that parses back to an expression with identical values.
  std::string to_string() const;

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expression parse(std::string_view text);

inline double evaluate(const Expression& e, const Bindings& b) { return e.evaluate(b); }
inline Expression differentiate(const Expression& e, Variable wrt) { return e.derivative(wrt); }
inline std::string print(const Expression& e) { return e.to_string(); }

/// Constant folding plus the identities x+0, 0+x, x-0, x*1, 1*x, x*0, 0*x,
/// x/1, x^1, x^0 and double negation.
Expression simplify(const Expression& e);

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);

/// base^exponent as used by every evaluation path. Integral exponents go
/// through repeated squaring; a negative base with a non-integral exponent
/// and zero to a negative power are domain errors.
double power(double base, double exponent);

/// Argument of a batched evaluation: either one value shared by all points
/// or a column with one value per point.
class Arg {
 public:
  Arg() = default;
  Arg(double value) : value_(value), bound_(true) {}                      // NOLINT
  Arg(std::span<const double> column) : column_(column), bound_(true) {}  // NOLINT

  bool bound() const { return bound_; }
  bool is_column() const { return column_.data() != nullptr; }
  double value() const { return value_; }
  std::span<const double> column() const { return column_; }

 private:
  std::span<const double> column_{};
  double value_ = 0.0;
  bool bound_ = false;
};

/// An expression lowered to straight-line code over columns, evaluated in
/// blocks through the SIMD kernels. Bit-identical to Expression::evaluate.
class CompiledExpression {
 public:
  CompiledExpression();
  explicit CompiledExpression(Expression e);
  ~CompiledExpression();
  CompiledExpression(const CompiledExpression&);
  CompiledExpression& operator=(const CompiledExpression&);
  CompiledExpression(CompiledExpression&&) noexcept;
  CompiledExpression& operator=(CompiledExpression&&) noexcept;

  const Expression& source() const { return source_; }

  /// out[i] = e(t_i, s_i, x_i); column arguments must have out.size() entries.
  void evaluate(Arg t, Arg s, Arg x, std::span<double> out) const;
  double operator()(double t, double s, double x) const;

 private:
  struct Program;
  Expression source_;
  std::unique_ptr<Program> program_;
};

}  // namespace volterra
