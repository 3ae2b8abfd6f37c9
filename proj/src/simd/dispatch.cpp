#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels.hpp"
#include "volterra/error.hpp"

namespace volterra::simd {
namespace {

bool cpu_has_avx2() {
#if defined(VOLTERRA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend widest() {
  if (available(Backend::Avx2)) return Backend::Avx2;
  if (available(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

Backend initial_backend() {
  if (const char* env = std::getenv("VOLTERRA_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && available(Backend::Avx2)) return Backend::Avx2;
    if (v == "neon" && available(Backend::Neon)) return Backend::Neon;
  }
  return widest();
}

std::atomic<const Kernels*>& current() {
  static std::atomic<const Kernels*> table{&kernels(initial_backend())};
  return table;
}

}  // namespace

std::string_view name(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool available(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
    case Backend::Neon:
#if defined(VOLTERRA_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (available(b)) out.push_back(b);
  }
  return out;
}

const Kernels& kernels(Backend backend) {
  if (!available(backend)) {
    throw Error("SIMD backend '" + std::string(name(backend)) + "' is not available on this CPU");
  }
  switch (backend) {
#if defined(VOLTERRA_HAVE_AVX2)
    case Backend::Avx2: return detail::avx2_kernels();
#endif
#if defined(VOLTERRA_HAVE_NEON)
    case Backend::Neon: return detail::neon_kernels();
#endif
    default: return detail::scalar_kernels();
  }
}

const Kernels& active() { return *current().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

void set_backend(Backend backend) { current().store(&kernels(backend), std::memory_order_release); }

}  // namespace volterra::simd
