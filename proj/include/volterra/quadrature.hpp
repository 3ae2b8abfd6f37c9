#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "volterra/curves.hpp"

namespace volterra {

using ScalarIntegrand = std::function<double(double)>;
/// Fills out[p] with the integrand at s[p].
using BatchIntegrand = std::function<void(std::span<const double> s, std::span<double> out)>;

/// sum_{p=1..panels} f(midpoint_p) * (hi - lo) / panels; exactly 0 when
/// lo == hi. A non-finite integrand value raises QuadratureError carrying the
/// abscissa.
double composite_midpoint(const ScalarIntegrand& f, double lo, double hi, std::size_t panels);
double composite_midpoint(const BatchIntegrand& f, double lo, double hi, std::size_t panels);

/// Midpoint abscissae of [lo, hi] and the common weight (hi - lo) / panels.
struct MidpointGrid {
  std::vector<double> nodes;
  double weight = 0.0;
};
MidpointGrid midpoint_grid(double lo, double hi, std::size_t panels);

/// Weighted sum of integrand samples on a MidpointGrid, with the same
/// finiteness check as composite_midpoint.
double midpoint_sum(const MidpointGrid& grid, std::span<const double> values);

struct BandSegment {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t band = 0;  // 0-based
  bool empty() const { return !(hi > lo); }
  double length() const { return hi - lo; }
};

struct BandDecomposition {
  double t = 0.0;
  std::vector<BandSegment> segments;
};

/// Splits (0, t] at alpha_1(t) .. alpha_{n-1}(t). Orderings violated by more
/// than 1e-12 raise ValidationError; smaller inversions collapse to
/// zero-length segments.
BandDecomposition decompose(double t, const CurveFamily& curves);

}  // namespace volterra
