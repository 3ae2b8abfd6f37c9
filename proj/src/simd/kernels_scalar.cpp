#include <cmath>

#include "kernels.hpp"

namespace volterra::simd::detail {
namespace {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}
void add_scalar(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + c;
}
void sub_scalar(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - c;
}
void mul_scalar(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * c;
}
void div_scalar(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / c;
}
void scalar_sub(double c, const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c - a[i];
}
void scalar_div(double c, const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c / a[i];
}
void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
void sqrt_(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void fill(double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c;
}
void midpoints(double lo, double width, std::size_t first, double* out, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    out[p] = lo + width * (static_cast<double>(first + p) + 0.5);
  }
}
double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}
double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}
std::size_t first_nonfinite(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i])) return i;
  }
  return n;
}
std::size_t first_le(const double* a, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] <= c) return i;
  }
  return n;
}
std::size_t first_lt(const double* a, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < c) return i;
  }
  return n;
}
std::size_t first_eq(const double* a, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == c) return i;
  }
  return n;
}
double max_abs_diff(const double* a, const double* b, std::size_t n, std::size_t* argmax) {
  double best = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > best) {
      best = d;
      at = i;
    }
  }
  if (argmax != nullptr) *argmax = at;
  return best;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{
      Backend::Scalar, add,        sub,        mul,       div,          add_scalar,
      sub_scalar,      mul_scalar, div_scalar, scalar_sub, scalar_div,  neg,
      sqrt_,           fill,       midpoints,  sum,        dot,         first_nonfinite,
      first_le,        first_lt,   first_eq,   max_abs_diff,
  };
  return table;
}

}  // namespace volterra::simd::detail
