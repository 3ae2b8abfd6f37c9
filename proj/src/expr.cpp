#include "volterra/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "volterra/error.hpp"

namespace volterra {

struct Expression::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  Variable var = Variable::T;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  std::uint8_t vars = 0;  // bit i set when Variable(i) occurs below
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

std::string_view name(Variable v) {
  switch (v) {
    case Variable::T: return "t";
    case Variable::S: return "s";
    case Variable::X: return "x";
  }
  return "?";
}

std::optional<double> Bindings::get(Variable v) const {
  switch (v) {
    case Variable::T: return t;
    case Variable::S: return s;
    case Variable::X: return x;
  }
  return std::nullopt;
}

Expression::Expression() : Expression(constant(0.0)) {}
Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  n->vars = static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
  return Expression(std::move(n));
}

Expression Expression::unary(UnaryOp op, Expression operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->vars = operand.node_->vars;
  n->a = std::move(operand.node_);
  return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->vars = static_cast<std::uint8_t>(lhs.node_->vars | rhs.node_->vars);
  n->a = std::move(lhs.node_);
  n->b = std::move(rhs.node_);
  return Expression(std::move(n));
}

Expression::Kind Expression::kind() const { return node_->kind; }
double Expression::value() const { return node_->value; }
Variable Expression::variable() const { return node_->var; }
UnaryOp Expression::unary_op() const { return node_->uop; }
BinaryOp Expression::binary_op() const { return node_->bop; }
Expression Expression::operand() const { return Expression(node_->a); }
Expression Expression::lhs() const { return Expression(node_->a); }
Expression Expression::rhs() const { return Expression(node_->b); }

bool Expression::uses(Variable v) const {
  return (node_->vars & (1u << static_cast<unsigned>(v))) != 0;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double ipow(double base, unsigned long long n) {
  double result = 1.0;
  while (n != 0) {
    if (n & 1ULL) result *= base;
    n >>= 1;
    if (n != 0) base *= base;
  }
  return result;
}

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double power(double base, double exponent) {
  if (exponent == std::trunc(exponent) && std::abs(exponent) <= 1024.0) {
    if (exponent >= 0.0) return ipow(base, static_cast<unsigned long long>(exponent));
    if (base == 0.0) throw DomainError("0 raised to negative power " + fmt_value(exponent));
    return 1.0 / ipow(base, static_cast<unsigned long long>(-exponent));
  }
  if (base < 0.0) {
    throw DomainError("negative base " + fmt_value(base) + " with non-integer exponent " +
                      fmt_value(exponent));
  }
  if (base == 0.0 && exponent < 0.0) {
    throw DomainError("0 raised to negative power " + fmt_value(exponent));
  }
  return std::pow(base, exponent);
}

namespace {

double apply(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::Neg: return -a;
    case UnaryOp::Sin: return std::sin(a);
    case UnaryOp::Cos: return std::cos(a);
    case UnaryOp::Exp: return std::exp(a);
    case UnaryOp::Log:
      if (a <= 0.0) throw DomainError("log of non-positive value " + fmt_value(a));
      return std::log(a);
    case UnaryOp::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value " + fmt_value(a));
      return std::sqrt(a);
  }
  return a;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    case BinaryOp::Pow: return power(a, b);
  }
  return a;
}

}  // namespace

double Expression::evaluate(const Bindings& bindings) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: {
      auto v = bindings.get(n.var);
      if (!v) throw UnboundVariableError("unbound variable '" + std::string(name(n.var)) + "'");
      return *v;
    }
    case Kind::Unary: return apply(n.uop, Expression(n.a).evaluate(bindings));
    case Kind::Binary: {
      const double a = Expression(n.a).evaluate(bindings);
      const double b = Expression(n.b).evaluate(bindings);
      return apply(n.bop, a, b);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Building and simplification

Expression operator+(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::Add, a, b);
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::Sub, a, b);
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::Mul, a, b);
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::Div, a, b);
}
Expression operator-(const Expression& a) { return Expression::unary(UnaryOp::Neg, a); }

namespace {

// Folds only when the result is an ordinary finite number.
std::optional<double> try_fold(const Expression& e) {
  try {
    const double v = e.evaluate(Bindings{});
    if (std::isfinite(v)) return v;
  } catch (const Error&) {
  }
  return std::nullopt;
}

Expression simplify_node(const Expression& e) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Constant:
    case K::Variable: return e;
    case K::Unary: {
      Expression a = simplify_node(e.operand());
      if (e.unary_op() == UnaryOp::Neg && a.kind() == K::Unary && a.unary_op() == UnaryOp::Neg) {
        return a.operand();
      }
      Expression out = Expression::unary(e.unary_op(), a);
      if (a.is_constant()) {
        if (auto v = try_fold(out)) return Expression::constant(*v);
      }
      return out;
    }
    case K::Binary: {
      Expression a = simplify_node(e.lhs());
      Expression b = simplify_node(e.rhs());
      if (a.is_constant() && b.is_constant()) {
        Expression out = Expression::binary(e.binary_op(), a, b);
        if (auto v = try_fold(out)) return Expression::constant(*v);
        return out;
      }
      switch (e.binary_op()) {
        case BinaryOp::Add:
          if (a.is_constant(0.0)) return b;
          if (b.is_constant(0.0)) return a;
          break;
        case BinaryOp::Sub:
          if (b.is_constant(0.0)) return a;
          if (a.is_constant(0.0)) return simplify_node(-b);
          break;
        case BinaryOp::Mul:
          if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
          if (a.is_constant(1.0)) return b;
          if (b.is_constant(1.0)) return a;
          break;
        case BinaryOp::Div:
          if (b.is_constant(1.0)) return a;
          break;
        case BinaryOp::Pow:
          if (b.is_constant(1.0)) return a;
          if (b.is_constant(0.0)) return Expression::constant(1.0);
          break;
      }
      return Expression::binary(e.binary_op(), a, b);
    }
  }
  return e;
}

}  // namespace

Expression simplify(const Expression& e) { return simplify_node(e); }

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expression d(const Expression& e, Variable wrt) {
  using K = Expression::Kind;
  const Expression zero = Expression::constant(0.0);
  const Expression one = Expression::constant(1.0);
  if (!e.uses(wrt)) return zero;
  switch (e.kind()) {
    case K::Constant: return zero;
    case K::Variable: return e.variable() == wrt ? one : zero;
    case K::Unary: {
      const Expression a = e.operand();
      const Expression da = d(a, wrt);
      switch (e.unary_op()) {
        case UnaryOp::Neg: return -da;
        case UnaryOp::Sin: return Expression::unary(UnaryOp::Cos, a) * da;
        case UnaryOp::Cos: return -Expression::unary(UnaryOp::Sin, a) * da;
        case UnaryOp::Exp: return Expression::unary(UnaryOp::Exp, a) * da;
        case UnaryOp::Log: return da / a;
        case UnaryOp::Sqrt:
          return da / (Expression::constant(2.0) * Expression::unary(UnaryOp::Sqrt, a));
      }
      break;
    }
    case K::Binary: {
      const Expression a = e.lhs();
      const Expression b = e.rhs();
      switch (e.binary_op()) {
        case BinaryOp::Add: return d(a, wrt) + d(b, wrt);
        case BinaryOp::Sub: return d(a, wrt) - d(b, wrt);
        case BinaryOp::Mul: return d(a, wrt) * b + a * d(b, wrt);
        case BinaryOp::Div:
          return (d(a, wrt) * b - a * d(b, wrt)) /
                 Expression::binary(BinaryOp::Pow, b, Expression::constant(2.0));
        case BinaryOp::Pow: {
          if (!b.uses(wrt)) {
            const Expression reduced = simplify(b - one);
            return b * Expression::binary(BinaryOp::Pow, a, reduced) * d(a, wrt);
          }
          const Expression ln_a = Expression::unary(UnaryOp::Log, a);
          if (!a.uses(wrt)) return e * ln_a * d(b, wrt);
          return e * (d(b, wrt) * ln_a + b * d(a, wrt) / a);
        }
      }
      break;
    }
  }
  return zero;
}

}  // namespace

Expression Expression::derivative(Variable wrt) const { return simplify(d(*this, wrt)); }

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

std::string_view function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Neg: return "-";
  }
  return "?";
}

struct Printed {
  std::string text;
  int prec;
};

std::string wrap(const Printed& p, bool parens) { return parens ? "(" + p.text + ")" : p.text; }

Printed render(const Expression& e) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Constant: {
      const double v = e.value();
      if (std::signbit(v)) return {"(-" + fmt_value(-v) + ")", kPrecAtom};
      return {fmt_value(v), kPrecAtom};
    }
    case K::Variable: return {std::string(name(e.variable())), kPrecAtom};
    case K::Unary: {
      const Printed a = render(e.operand());
      if (e.unary_op() == UnaryOp::Neg) {
        // A space keeps "- -x" from reading as a different token stream.
        return {"-" + std::string(a.text.starts_with("-") ? " " : "") + wrap(a, a.prec < kPrecNeg),
                kPrecNeg};
      }
      return {std::string(function_name(e.unary_op())) + "(" + a.text + ")", kPrecAtom};
    }
    case K::Binary: {
      const Printed a = render(e.lhs());
      const Printed b = render(e.rhs());
      switch (e.binary_op()) {
        case BinaryOp::Add:
          return {wrap(a, a.prec < kPrecAdd) + " + " + wrap(b, b.prec <= kPrecAdd), kPrecAdd};
        case BinaryOp::Sub:
          return {wrap(a, a.prec < kPrecAdd) + " - " + wrap(b, b.prec <= kPrecAdd), kPrecAdd};
        case BinaryOp::Mul:
          return {wrap(a, a.prec < kPrecMul) + "*" + wrap(b, b.prec <= kPrecMul), kPrecMul};
        case BinaryOp::Div:
          return {wrap(a, a.prec < kPrecMul) + "/" + wrap(b, b.prec <= kPrecMul), kPrecMul};
        case BinaryOp::Pow:
          return {wrap(a, a.prec <= kPrecPow) + "^" + wrap(b, b.prec < kPrecNeg), kPrecPow};
      }
      break;
    }
  }
  return {"0", kPrecAtom};
}

}  // namespace

std::string Expression::to_string() const { return render(*this).text; }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression run() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expression e = expr();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  // Consumes '-' or the UTF-8 encoding of U+2212.
  bool accept_minus() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (text_.substr(pos_).starts_with("\xE2\x88\x92")) {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression expr() {
    Expression lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept_minus()) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expression term() {
    Expression lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expression unary() {
    if (accept_minus()) return -unary();
    return pow_expr();
  }

  Expression pow_expr() {
    Expression base = primary();
    if (accept('^')) return Expression::binary(BinaryOp::Pow, base, unary());
    return base;
  }

  Expression primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  Expression number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < text_.size() && text_[end] >= '0' && text_[end] <= '9') {
        ++end;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
      if (probe < text_.size() && text_[probe] >= '0' && text_[probe] <= '9') {
        end = probe;
        digits();
      } else {
        throw ParseError("malformed exponent", end);
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) {
      throw ParseError("malformed number", start);
    }
    pos_ = end;
    return Expression::constant(value);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);
    skip_space();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';

    static constexpr std::pair<std::string_view, UnaryOp> kFunctions[] = {
        {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
        {"log", UnaryOp::Log}, {"sqrt", UnaryOp::Sqrt},
    };
    for (const auto& [fname, op] : kFunctions) {
      if (id == fname) {
        if (!call) throw ParseError("function '" + std::string(id) + "' needs '('", pos_);
        ++pos_;
        Expression arg = expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return Expression::unary(op, arg);
      }
    }
    if (call) throw ParseError("unknown function '" + std::string(id) + "'", start);
    if (id == "t") return Expression::variable(Variable::T);
    if (id == "s") return Expression::variable(Variable::S);
    if (id == "x") return Expression::variable(Variable::X);
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text) { return Parser(text).run(); }

}  // namespace volterra
