#include "volterra/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "volterra/error.hpp"
#include "volterra/simd.hpp"

namespace volterra {

namespace {

constexpr std::size_t kChunk = 1024;

void check_interval(double lo, double hi, std::size_t panels) {
  if (panels == 0) throw Error("composite midpoint needs at least one panel");
  if (!(lo <= hi)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "integration interval reversed: [%.17g, %.17g]", lo, hi);
    throw Error(buf);
  }
}

[[noreturn]] void non_finite(double abscissa, double value) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "non-finite integrand value %g at s = %.17g", value, abscissa);
  throw QuadratureError(buf, abscissa);
}

}  // namespace

double composite_midpoint(const ScalarIntegrand& f, double lo, double hi, std::size_t panels) {
  check_interval(lo, hi, panels);
  if (lo == hi) return 0.0;
  const double width = (hi - lo) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double s = lo + width * (static_cast<double>(p) + 0.5);
    const double v = f(s);
    if (!std::isfinite(v)) non_finite(s, v);
    total += v;
  }
  return total * width;
}

double composite_midpoint(const BatchIntegrand& f, double lo, double hi, std::size_t panels) {
  check_interval(lo, hi, panels);
  if (lo == hi) return 0.0;
  const simd::Kernels& k = simd::active();
  const double width = (hi - lo) / static_cast<double>(panels);
  std::array<double, kChunk> nodes;
  std::array<double, kChunk> values;
  double total = 0.0;
  for (std::size_t first = 0; first < panels; first += kChunk) {
    const std::size_t n = std::min(kChunk, panels - first);
    k.midpoints(lo, width, first, nodes.data(), n);
    f(std::span<const double>(nodes.data(), n), std::span<double>(values.data(), n));
    const std::size_t bad = k.first_nonfinite(values.data(), n);
    if (bad < n) non_finite(nodes[bad], values[bad]);
    total += k.sum(values.data(), n);
  }
  return total * width;
}

MidpointGrid midpoint_grid(double lo, double hi, std::size_t panels) {
  check_interval(lo, hi, panels);
  MidpointGrid grid;
  if (lo == hi) return grid;
  grid.weight = (hi - lo) / static_cast<double>(panels);
  grid.nodes.resize(panels);
  simd::active().midpoints(lo, grid.weight, 0, grid.nodes.data(), panels);
  return grid;
}

double midpoint_sum(const MidpointGrid& grid, std::span<const double> values) {
  if (values.size() != grid.nodes.size()) throw Error("midpoint_sum: sample count mismatch");
  if (values.empty()) return 0.0;
  const simd::Kernels& k = simd::active();
  const std::size_t bad = k.first_nonfinite(values.data(), values.size());
  if (bad < values.size()) non_finite(grid.nodes[bad], values[bad]);
  return k.sum(values.data(), values.size()) * grid.weight;
}

BandDecomposition decompose(double t, const CurveFamily& curves) {
  constexpr double kOrderingTolerance = 1e-12;
  BandDecomposition out;
  out.t = t;
  const std::size_t n = curves.bands();
  out.segments.reserve(n);
  double lo = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double hi = curves.value(j + 1, t);
    if (hi < lo) {
      if (lo - hi > kOrderingTolerance) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "curve ordering violated at t = %.17g: alpha_%zu = %.17g > alpha_%zu = %.17g",
                      t, j, lo, j + 1, hi);
        throw ValidationError(buf);
      }
      hi = lo;
    }
    out.segments.push_back(BandSegment{lo, hi, j});
    lo = hi;
  }
  return out;
}

}  // namespace volterra
