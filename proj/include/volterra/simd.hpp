#pragma once

// Data-parallel kernels behind expression evaluation and quadrature sums.
//
// Every kernel has a portable scalar reference implementation. Vector
// backends (AVX2 on x86-64, NEON on AArch64) are selected at runtime.
// Elementwise kernels produce bit-identical results on every backend;
// reductions may differ from the reference only by summation order.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace volterra::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view name(Backend backend);

struct Kernels {
  Backend backend;

  // out[i] = a[i] op b[i]
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);

  // out[i] = a[i] op c
  void (*add_scalar)(const double* a, double c, double* out, std::size_t n);
  void (*sub_scalar)(const double* a, double c, double* out, std::size_t n);
  void (*mul_scalar)(const double* a, double c, double* out, std::size_t n);
  void (*div_scalar)(const double* a, double c, double* out, std::size_t n);

  // out[i] = c op a[i]
  void (*scalar_sub)(double c, const double* a, double* out, std::size_t n);
  void (*scalar_div)(double c, const double* a, double* out, std::size_t n);

  void (*neg)(const double* a, double* out, std::size_t n);
  void (*sqrt)(const double* a, double* out, std::size_t n);
  void (*fill)(double c, double* out, std::size_t n);

  // out[p] = lo + width * ((first + p) + 0.5)
  void (*midpoints)(double lo, double width, std::size_t first, double* out, std::size_t n);

  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);

  // Index of the first element matching the predicate, or n.
  std::size_t (*first_nonfinite)(const double* a, std::size_t n);
  std::size_t (*first_le)(const double* a, double c, std::size_t n);
  std::size_t (*first_lt)(const double* a, double c, std::size_t n);
  std::size_t (*first_eq)(const double* a, double c, std::size_t n);

  // Largest |a[i] - b[i]|; *argmax receives the first index attaining it.
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n, std::size_t* argmax);
};

bool available(Backend backend);
std::vector<Backend> available_backends();

/// Kernel table for a specific backend; throws if it is not available here.
const Kernels& kernels(Backend backend);

/// Kernel table currently in use. Defaults to the widest available backend,
/// or to VOLTERRA_SIMD=scalar|avx2|neon when that variable is set.
const Kernels& active();
Backend active_backend();
void set_backend(Backend backend);

/// Restores the previous backend on destruction.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend backend) : previous_(active_backend()) { set_backend(backend); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

}  // namespace volterra::simd
