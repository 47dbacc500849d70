#pragma once

#include "soliton_squeeze/simd/kernels.hpp"

namespace soliton_squeeze::simd::detail {

const KernelTable& scalar_table();
#if defined(SOLITON_SQUEEZE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(SOLITON_SQUEEZE_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace soliton_squeeze::simd::detail
