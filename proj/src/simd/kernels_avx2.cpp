// Built with -mavx2 and dispatched only after a runtime CPU check. No FMA:
// the elementwise results must match the scalar reference bit-for-bit.

#include <immintrin.h>

#include <cfloat>
#include <cmath>

#include "kernels.hpp"

namespace volterra::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

template <class Op>
inline void binary(const double* a, const double* b, double* out, std::size_t n, Op op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) {
    out[i] = _mm256_cvtsd_f64(op(_mm256_set1_pd(a[i]), _mm256_set1_pd(b[i])));
  }
}

template <class Op>
inline void with_scalar(const double* a, double c, double* out, std::size_t n, Op op) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), vc));
  }
  for (; i < n; ++i) {
    out[i] = _mm256_cvtsd_f64(op(_mm256_set1_pd(a[i]), vc));
  }
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); });
}
void add_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); });
}
void sub_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); });
}
void mul_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); });
}
void div_scalar(const double* a, double c, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); });
}
void scalar_sub(double c, const double* a, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(y, x); });
}
void scalar_div(double c, const double* a, double* out, std::size_t n) {
  with_scalar(a, c, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(y, x); });
}
void neg(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign));
  }
  for (; i < n; ++i) out[i] = -a[i];
}
void sqrt_(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void fill(double c, double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, vc);
  for (; i < n; ++i) out[i] = c;
}
void midpoints(double lo, double width, std::size_t first, double* out, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vw = _mm256_set1_pd(width);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t p = 0;
  for (; p + kLanes <= n; p += kLanes) {
    const std::size_t k = first + p;
    const __m256d idx = _mm256_set_pd(static_cast<double>(k + 3), static_cast<double>(k + 2),
                                      static_cast<double>(k + 1), static_cast<double>(k));
    _mm256_storeu_pd(out + p, _mm256_add_pd(vlo, _mm256_mul_pd(vw, _mm256_add_pd(idx, half))));
  }
  for (; p < n; ++p) out[p] = lo + width * (static_cast<double>(first + p) + 0.5);
}

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + kLanes));
  }
  double total = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += a[i];
  return total;
}
double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + kLanes),
                                             _mm256_loadu_pd(b + i + kLanes)));
  }
  double total = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

template <class Cmp>
inline std::size_t first_match(const double* a, std::size_t n, Cmp cmp) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const int mask = _mm256_movemask_pd(cmp(_mm256_loadu_pd(a + i)));
    if (mask != 0) return i + static_cast<std::size_t>(__builtin_ctz(mask));
  }
  for (; i < n; ++i) {
    if (_mm256_movemask_pd(cmp(_mm256_set1_pd(a[i]))) & 1) return i;
  }
  return n;
}

std::size_t first_nonfinite(const double* a, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d largest = _mm256_set1_pd(DBL_MAX);
  return first_match(a, n, [&](__m256d x) {
    return _mm256_cmp_pd(_mm256_and_pd(x, abs_mask), largest, _CMP_NLE_UQ);
  });
}
std::size_t first_le(const double* a, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  return first_match(a, n, [&](__m256d x) { return _mm256_cmp_pd(x, vc, _CMP_LE_OQ); });
}
std::size_t first_lt(const double* a, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  return first_match(a, n, [&](__m256d x) { return _mm256_cmp_pd(x, vc, _CMP_LT_OQ); });
}
std::size_t first_eq(const double* a, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  return first_match(a, n, [&](__m256d x) { return _mm256_cmp_pd(x, vc, _CMP_EQ_OQ); });
}

double max_abs_diff(const double* a, const double* b, std::size_t n, std::size_t* argmax) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d =
        _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)), abs_mask);
    // NaN never compares greater, matching the scalar loop.
    best = _mm256_blendv_pd(best, d, _mm256_cmp_pd(d, best, _CMP_GT_OQ));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, best);
  double top = 0.0;
  for (double v : lanes) {
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

const Kernels& avx2_kernels() {
  static const Kernels table{
      Backend::Avx2,   add,        sub,        mul,        div,        add_scalar,
      sub_scalar,      mul_scalar, div_scalar, scalar_sub, scalar_div, neg,
      sqrt_,           fill,       midpoints,  sum,        dot,        first_nonfinite,
      first_le,        first_lt,   first_eq,   max_abs_diff,
  };
  return table;
}

}  // namespace volterra::simd::detail
