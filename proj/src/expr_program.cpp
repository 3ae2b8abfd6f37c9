#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "volterra/error.hpp"
#include "volterra/expr.hpp"
#include "volterra/simd.hpp"

namespace volterra {

namespace {

enum class Op : std::uint8_t {
  Fill,  // dest = constant a
  Add, Sub, Mul, Div, Pow,
  IntPow,
  Neg, Sin, Cos, Exp, Log, Sqrt,
};

struct Operand {
  bool is_const = false;
  int reg = -1;
  double value = 0.0;
};

struct Instr {
  Op op;
  Operand a;
  Operand b;
  long long exponent = 0;  // IntPow
  int dest = -1;
};

constexpr int kVarRegs = 3;  // t, s, x
constexpr std::size_t kBlock = 256;

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

struct CompiledExpression::Program {
  std::vector<Instr> code;
  Operand result;
  int temps = 0;
  std::uint8_t used = 0;

  int new_temp() { return kVarRegs + temps++; }

  Operand emit(const Expression& e) {
    using K = Expression::Kind;
    switch (e.kind()) {
      case K::Constant: return Operand{true, -1, e.value()};
      case K::Variable: return Operand{false, static_cast<int>(e.variable()), 0.0};
      case K::Unary: {
        Operand a = materialize(emit(e.operand()));
        Instr in{};
        switch (e.unary_op()) {
          case UnaryOp::Neg: in.op = Op::Neg; break;
          case UnaryOp::Sin: in.op = Op::Sin; break;
          case UnaryOp::Cos: in.op = Op::Cos; break;
          case UnaryOp::Exp: in.op = Op::Exp; break;
          case UnaryOp::Log: in.op = Op::Log; break;
          case UnaryOp::Sqrt: in.op = Op::Sqrt; break;
        }
        in.a = a;
        in.dest = new_temp();
        code.push_back(in);
        return Operand{false, in.dest, 0.0};
      }
      case K::Binary: {
        const Expression rhs = e.rhs();
        if (e.binary_op() == BinaryOp::Pow && rhs.is_constant() &&
            rhs.value() == std::trunc(rhs.value()) && std::abs(rhs.value()) <= 1024.0) {
          Instr in{};
          in.op = Op::IntPow;
          in.a = materialize(emit(e.lhs()));
          in.exponent = static_cast<long long>(rhs.value());
          in.dest = new_temp();
          code.push_back(in);
          return Operand{false, in.dest, 0.0};
        }
        Operand a = emit(e.lhs());
        Operand b = emit(rhs);
        if (a.is_const && b.is_const) a = materialize(a);
        if (e.binary_op() == BinaryOp::Pow) {
          a = materialize(a);
          b = materialize(b);
        }
        Instr in{};
        switch (e.binary_op()) {
          case BinaryOp::Add: in.op = Op::Add; break;
          case BinaryOp::Sub: in.op = Op::Sub; break;
          case BinaryOp::Mul: in.op = Op::Mul; break;
          case BinaryOp::Div: in.op = Op::Div; break;
          case BinaryOp::Pow: in.op = Op::Pow; break;
        }
        in.a = a;
        in.b = b;
        in.dest = new_temp();
        code.push_back(in);
        return Operand{false, in.dest, 0.0};
      }
    }
    return Operand{true, -1, 0.0};
  }

  Operand materialize(Operand o) {
    if (!o.is_const) return o;
    Instr in{};
    in.op = Op::Fill;
    in.a = o;
    in.dest = new_temp();
    code.push_back(in);
    return Operand{false, in.dest, 0.0};
  }

  void run_block(const double* const* vars, double* scratch, std::size_t n, double* out) const {
    const simd::Kernels& k = simd::active();
    auto reg = [&](int r) -> double* {
      return r < kVarRegs ? const_cast<double*>(vars[r])
                          : scratch + static_cast<std::size_t>(r - kVarRegs) * kBlock;
    };
    for (const Instr& in : code) {
      double* dst = reg(in.dest);
      const double* a = in.a.is_const ? nullptr : reg(in.a.reg);
      const double* b = in.b.is_const ? nullptr : reg(in.b.reg);
      switch (in.op) {
        case Op::Fill: k.fill(in.a.value, dst, n); break;
        case Op::Add:
          if (!b) k.add_scalar(a, in.b.value, dst, n);
          else if (!a) k.add_scalar(b, in.a.value, dst, n);
          else k.add(a, b, dst, n);
          break;
        case Op::Sub:
          if (!b) k.sub_scalar(a, in.b.value, dst, n);
          else if (!a) k.scalar_sub(in.a.value, b, dst, n);
          else k.sub(a, b, dst, n);
          break;
        case Op::Mul:
          if (!b) k.mul_scalar(a, in.b.value, dst, n);
          else if (!a) k.mul_scalar(b, in.a.value, dst, n);
          else k.mul(a, b, dst, n);
          break;
        case Op::Div:
          if (!b) {
            if (in.b.value == 0.0) throw DomainError("division by zero");
            k.div_scalar(a, in.b.value, dst, n);
          } else {
            if (k.first_eq(b, 0.0, n) < n) throw DomainError("division by zero");
            if (!a) k.scalar_div(in.a.value, b, dst, n);
            else k.div(a, b, dst, n);
          }
          break;
        case Op::Pow:
          for (std::size_t i = 0; i < n; ++i) dst[i] = power(a[i], b[i]);
          break;
        case Op::IntPow: int_pow(k, a, in.exponent, dst, scratch_tail(scratch), n); break;
        case Op::Neg: k.neg(a, dst, n); break;
        case Op::Sin:
          for (std::size_t i = 0; i < n; ++i) dst[i] = std::sin(a[i]);
          break;
        case Op::Cos:
          for (std::size_t i = 0; i < n; ++i) dst[i] = std::cos(a[i]);
          break;
        case Op::Exp:
          for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(a[i]);
          break;
        case Op::Log: {
          const std::size_t bad = k.first_le(a, 0.0, n);
          if (bad < n) throw DomainError("log of non-positive value " + fmt_value(a[bad]));
          // log(NaN) stays NaN and is reported by the caller's finiteness check.
          for (std::size_t i = 0; i < n; ++i) dst[i] = std::log(a[i]);
          break;
        }
        case Op::Sqrt: {
          const std::size_t bad = k.first_lt(a, 0.0, n);
          if (bad < n) throw DomainError("sqrt of negative value " + fmt_value(a[bad]));
          k.sqrt(a, dst, n);
          break;
        }
      }
    }
    const double* r = result.is_const ? nullptr : reg(result.reg);
    if (r == nullptr) {
      k.fill(result.value, out, n);
    } else if (r != out) {
      std::memcpy(out, r, n * sizeof(double));
    }
  }

  double* scratch_tail(double* scratch) const {
    return scratch + static_cast<std::size_t>(temps) * kBlock;
  }

  // Same multiplication sequence as power(): square-and-multiply from 1.
  static void int_pow(const simd::Kernels& k, const double* a, long long exponent, double* dst,
                      double* base, std::size_t n) {
    unsigned long long e = static_cast<unsigned long long>(exponent < 0 ? -exponent : exponent);
    k.fill(1.0, dst, n);
    std::memcpy(base, a, n * sizeof(double));
    while (e != 0) {
      if (e & 1ULL) k.mul(dst, base, dst, n);
      e >>= 1;
      if (e != 0) k.mul(base, base, base, n);
    }
    if (exponent < 0) {
      if (k.first_eq(dst, 0.0, n) < n) {
        throw DomainError("0 raised to negative power " + std::to_string(exponent));
      }
      k.scalar_div(1.0, dst, dst, n);
    }
  }
};

CompiledExpression::CompiledExpression() : CompiledExpression(Expression::constant(0.0)) {}

CompiledExpression::CompiledExpression(Expression e)
    : source_(std::move(e)), program_(std::make_unique<Program>()) {
  program_->result = program_->emit(source_);
  for (Variable v : {Variable::T, Variable::S, Variable::X}) {
    if (source_.uses(v)) program_->used |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
  }
}

CompiledExpression::~CompiledExpression() = default;
CompiledExpression::CompiledExpression(const CompiledExpression& other)
    : source_(other.source_), program_(std::make_unique<Program>(*other.program_)) {}
CompiledExpression& CompiledExpression::operator=(const CompiledExpression& other) {
  if (this != &other) {
    source_ = other.source_;
    program_ = std::make_unique<Program>(*other.program_);
  }
  return *this;
}
CompiledExpression::CompiledExpression(CompiledExpression&&) noexcept = default;
CompiledExpression& CompiledExpression::operator=(CompiledExpression&&) noexcept = default;

void CompiledExpression::evaluate(Arg t, Arg s, Arg x, std::span<double> out) const {
  const Arg args[kVarRegs] = {t, s, x};
  for (int v = 0; v < kVarRegs; ++v) {
    if ((program_->used >> v) & 1u) {
      if (!args[v].bound()) {
        throw UnboundVariableError("unbound variable '" +
                                   std::string(name(static_cast<Variable>(v))) + "'");
      }
      if (args[v].is_column() && args[v].column().size() != out.size()) {
        throw Error("column length mismatch in batched evaluation");
      }
    }
  }

  // temps + one spare block for IntPow + one block per broadcast variable
  thread_local std::vector<double> scratch;
  const std::size_t need = (static_cast<std::size_t>(program_->temps) + 1 + kVarRegs) * kBlock;
  if (scratch.size() < need) scratch.resize(need);
  double* broadcast = scratch.data() + (static_cast<std::size_t>(program_->temps) + 1) * kBlock;

  const simd::Kernels& k = simd::active();
  for (std::size_t offset = 0; offset < out.size(); offset += kBlock) {
    const std::size_t n = std::min(kBlock, out.size() - offset);
    const double* vars[kVarRegs] = {nullptr, nullptr, nullptr};
    for (int v = 0; v < kVarRegs; ++v) {
      if (!((program_->used >> v) & 1u)) continue;
      if (args[v].is_column()) {
        vars[v] = args[v].column().data() + offset;
      } else {
        double* col = broadcast + static_cast<std::size_t>(v) * kBlock;
        k.fill(args[v].value(), col, n);
        vars[v] = col;
      }
    }
    program_->run_block(vars, scratch.data(), n, out.data() + offset);
  }
}

double CompiledExpression::operator()(double t, double s, double x) const {
  double out = 0.0;
  evaluate(t, s, x, std::span<double>(&out, 1));
  return out;
}

}  // namespace volterra
