#pragma once

#include "qpsim/simd.hpp"

namespace qpsim::simd::detail {

extern const KernelTable kScalarTable;

#if defined(QPSIM_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

#if defined(QPSIM_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace qpsim::simd::detail
