#include "volterra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/error.hpp"
#include "volterra/simd.hpp"

namespace volterra {

namespace {

struct Deviation {
  double value;
  double where;
};

Deviation max_deviation(const Approximation& a, const Approximation& b, std::size_t component,
                        double horizon, std::size_t samples) {
  const std::vector<double> t = uniform_samples(horizon, samples);
  std::vector<double> va(samples), vb(samples);
  a.evaluate(component, t, va);
  b.evaluate(component, t, vb);
  const simd::Kernels& k = simd::active();
  for (const std::vector<double>* v : {&va, &vb}) {
    const std::size_t bad = k.first_nonfinite(v->data(), samples);
    if (bad < samples) return {std::numeric_limits<double>::infinity(), t[bad]};
  }
  std::size_t arg = 0;
  const double d = k.max_abs_diff(va.data(), vb.data(), samples, &arg);
  return {d, t[arg]};
}

}  // namespace

ErrorSummary sup_errors(const Approximation& approx, const Approximation& exact, std::size_t samples) {
  if (approx.components() != exact.components()) throw Error("sup_errors: component count mismatch");
  if (samples < 2) throw Error("sup_errors: need at least two samples");
  ErrorSummary out;
  for (std::size_t c = 0; c < approx.components(); ++c) {
    const Deviation d = max_deviation(approx, exact, c, approx.horizon(c), samples);
    out.component_errors.push_back(d.value);
    out.worst_points.push_back(d.where);
  }
  out.aggregate = aggregate_error(out.component_errors);
  return out;
}

double aggregate_error(std::span<const double> component_errors) {
  double sum = 0.0;
  for (double e : component_errors) sum += e * e;
  return std::sqrt(sum);
}

double correction_norm(const Approximation& prev, const Approximation& next, std::size_t samples) {
  if (prev.components() != next.components()) throw Error("correction_norm: component count mismatch");
  if (samples < 2) throw Error("correction_norm: need at least two samples");
  double norm = 0.0;
  for (std::size_t c = 0; c < next.components(); ++c) {
    const double horizon = std::min(prev.horizon(c), next.horizon(c));
    norm = std::max(norm, max_deviation(prev, next, c, horizon, samples).value);
  }
  return norm;
}

}  // namespace volterra
