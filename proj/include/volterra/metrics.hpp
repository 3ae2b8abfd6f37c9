#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "volterra/approximation.hpp"

namespace volterra {

inline constexpr std::size_t kDefaultErrorSamples = 2001;

struct ErrorSummary {
  std::vector<double> component_errors;  // sup |approx - exact| per component
  std::vector<double> worst_points;      // where each sup is attained
  double aggregate = 0.0;                // sqrt(sum of squares)
};

/// Sup-norm errors on `samples` uniform points of each component's domain
/// [0, approx.horizon(c)]. Non-finite values count as infinite error.
ErrorSummary sup_errors(const Approximation& approx, const Approximation& exact,
                        std::size_t samples = kDefaultErrorSamples);

double aggregate_error(std::span<const double> component_errors);

/// max over components and `samples` uniform points of |next - prev|.
double correction_norm(const Approximation& prev, const Approximation& next,
                       std::size_t samples = kDefaultErrorSamples);

}  // namespace volterra
