// AArch64 Advanced SIMD variant. Two double lanes per register; no fused
// multiply-add so results stay identical to the scalar reference.

#include <arm_neon.h>

#include <cfloat>
#include <cmath>

#include "kernels.hpp"

namespace volterra::simd::detail {
namespace {

constexpr std::size_t kLanes = 2;

template <class Op>
inline void binary(const double* a, const double* b, double* out, std::size_t n, Op op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, op(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = vgetq_lane_f64(op(vdupq_n_f64(a[i]), vdupq_n_f64(b[i])), 0);
}

template <class Op>
inline void with_scalar(const double* a, double c, double* out, std::size_t n, Op op) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, op(vld1q_f64(a + i), vc));
  for (; i < n; ++i) out[i] = vgetq_lane_f64(op(vdupq_n_f64(a[i]), vc), 0);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vaddq_f64(x, y); });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vsubq_f64(x, y); });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vmulq_f64(x, y); });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vdivq_f64(x, y); });
}
void add_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vaddq_f64(x, y); });
}
void sub_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vsubq_f64(x, y); });
}
void mul_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vmulq_f64(x, y); });
}
void div_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vdivq_f64(x, y); });
}
void scalar_sub(double c, const double* a, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vsubq_f64(y, x); });
}
void scalar_div(double c, const double* a, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](float64x2_t x, float64x2_t y) { return vdivq_f64(y, x); });
}
void neg(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vnegq_f64(vld1q_f64(a + i)));
  for (; i < n; ++i) out[i] = -a[i];
}
void sqrt_(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vsqrtq_f64(vld1q_f64(a + i)));
  for (; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void fill(double c, double* out, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vc);
  for (; i < n; ++i) out[i] = c;
}
void midpoints(double lo, double width, std::size_t first, double* out, std::size_t n) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vw = vdupq_n_f64(width);
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t p = 0;
  for (; p + kLanes <= n; p += kLanes) {
    const double idx[2] = {static_cast<double>(first + p), static_cast<double>(first + p + 1)};
    vst1q_f64(out + p, vaddq_f64(vlo, vmulq_f64(vw, vaddq_f64(vld1q_f64(idx), half))));
  }
  for (; p < n; ++p) out[p] = lo + width * (static_cast<double>(first + p) + 0.5);
}
double sum(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(a + i + kLanes));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i];
  return total;
}
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + kLanes), vld1q_f64(b + i + kLanes)));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

template <class Cmp>
inline std::size_t first_match(const double* a, std::size_t n, Cmp cmp) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const uint64x2_t m = cmp(vld1q_f64(a + i));
    if (vgetq_lane_u64(m, 0) != 0) return i;
    if (vgetq_lane_u64(m, 1) != 0) return i + 1;
  }
  for (; i < n; ++i) {
    if (vgetq_lane_u64(cmp(vdupq_n_f64(a[i])), 0) != 0) return i;
  }
  return n;
}

std::size_t first_nonfinite(const double* a, std::size_t n) {
  const float64x2_t largest = vdupq_n_f64(DBL_MAX);
  // !(|x| <= max) is true for infinities and NaN.
  return first_match(a, n, [&](float64x2_t x) {
    return veorq_u64(vcleq_f64(vabsq_f64(x), largest), vdupq_n_u64(~0ULL));
  });
}
std::size_t first_le(const double* a, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  return first_match(a, n, [&](float64x2_t x) { return vcleq_f64(x, vc); });
}
std::size_t first_lt(const double* a, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  return first_match(a, n, [&](float64x2_t x) { return vcltq_f64(x, vc); });
}
std::size_t first_eq(const double* a, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  return first_match(a, n, [&](float64x2_t x) { return vceqq_f64(x, vc); });
}

double max_abs_diff(const double* a, const double* b, std::size_t n, std::size_t* argmax) {
  float64x2_t best = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t d = vabsq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    best = vbslq_f64(vcgtq_f64(d, best), d, best);
  }
  double top = 0.0;
  for (double v : {vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1)}) {
    if (v > top) top = v;
  }
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > top) top = d;
  }
  if (argmax != nullptr) {
    std::size_t at = 0;
    if (top > 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(a[j] - b[j]) == top) {
          at = j;
          break;
        }
      }
    }
    *argmax = at;
  }
  return top;
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels table{
      Backend::Neon,   add,        sub,        mul,        div,        add_scalar,
      sub_scalar,      mul_scalar, div_scalar, scalar_sub, scalar_div, neg,
      sqrt_,           fill,       midpoints,  sum,        dot,        first_nonfinite,
      first_le,        first_lt,   first_eq,   max_abs_diff,
  };
  return table;
}

}  // namespace volterra::simd::detail
