#include "volterra/approximation.hpp"

#include "volterra/error.hpp"

namespace volterra {

double Approximation::value(std::size_t component, double t) const {
  double out = 0.0;
  evaluate(component, std::span<const double>(&t, 1), std::span<double>(&out, 1));
  return out;
}

ExpressionApproximation::ExpressionApproximation(std::vector<Expression> components,
                                                 std::vector<double> horizons)
    : horizons_(std::move(horizons)) {
  if (components.size() != horizons_.size()) {
    throw Error("expression approximation: one horizon per component required");
  }
  compiled_.reserve(components.size());
  for (Expression& e : components) {
    if (e.uses(Variable::S) || e.uses(Variable::X)) {
      throw Error("component expression may only depend on t: " + e.to_string());
    }
    compiled_.emplace_back(std::move(e));
  }
}

void ExpressionApproximation::evaluate(std::size_t component, std::span<const double> t,
                                       std::span<double> out) const {
  compiled_.at(component).evaluate(t, Arg(), Arg(), out);
}

std::vector<double> uniform_samples(double horizon, std::size_t samples) {
  std::vector<double> t(samples);
  if (samples == 1) {
    t[0] = 0.0;
    return t;
  }
  const double last = static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) t[i] = horizon * (static_cast<double>(i) / last);
  t[samples - 1] = horizon;
  return t;
}

}  // namespace volterra
