#pragma once

#include <cstddef>
#include <vector>

#include "volterra/expr.hpp"

namespace volterra {

/// Discontinuity curves 0 = alpha_0(t) <= alpha_1(t) <= ... <= alpha_n(t) = t
/// on [0, T]. Band j (0-based) is the strip alpha_j(t) < s <= alpha_{j+1}(t).
class CurveFamily {
 public:
  CurveFamily() = default;
  /// `interior` holds alpha_1 .. alpha_{n-1} as expressions in t.
  CurveFamily(double horizon, std::vector<Expression> interior);

  double horizon() const { return horizon_; }
  std::size_t bands() const { return interior_.size() + 1; }

  /// alpha_j(t) for j in 0..bands().
  double value(std::size_t j, double t) const;
  /// alpha_j'(t) for j in 0..bands().
  double derivative(std::size_t j, double t) const;

  const std::vector<Expression>& interior() const { return interior_; }
  const std::vector<Expression>& interior_derivatives() const { return derivatives_; }

 private:
  double horizon_ = 0.0;
  std::vector<Expression> interior_;
  std::vector<Expression> derivatives_;
};

}  // namespace volterra
