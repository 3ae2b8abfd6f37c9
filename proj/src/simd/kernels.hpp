#pragma once

#include "volterra/simd.hpp"

namespace volterra::simd::detail {

const Kernels& scalar_kernels();
#if defined(VOLTERRA_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(VOLTERRA_HAVE_NEON)
const Kernels& neon_kernels();
#endif

}  // namespace volterra::simd::detail
