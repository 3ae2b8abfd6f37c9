#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "volterra/expr.hpp"

namespace volterra {

/// A vector function t -> (x_1(t), ..., x_n(t)); component c is defined on
/// [0, horizon(c)].
class Approximation {
 public:
  virtual ~Approximation() = default;

  virtual std::size_t components() const = 0;
  virtual double horizon(std::size_t component) const = 0;
  virtual void evaluate(std::size_t component, std::span<const double> t,
                        std::span<double> out) const = 0;

  /// Points where the component may jump; quadrature splits its panels there.
  virtual std::span<const double> breakpoints(std::size_t /*component*/) const { return {}; }

  double value(std::size_t component, double t) const;
};

/// Components given as expressions in t (initial guesses, exact solutions).
class ExpressionApproximation final : public Approximation {
 public:
  ExpressionApproximation(std::vector<Expression> components, std::vector<double> horizons);

  std::size_t components() const override { return compiled_.size(); }
  double horizon(std::size_t component) const override { return horizons_.at(component); }
  void evaluate(std::size_t component, std::span<const double> t,
                std::span<double> out) const override;

 private:
  std::vector<CompiledExpression> compiled_;
  std::vector<double> horizons_;
};

/// Uniform sample of [0, horizon] with `samples` points including both ends.
std::vector<double> uniform_samples(double horizon, std::size_t samples);

}  // namespace volterra
