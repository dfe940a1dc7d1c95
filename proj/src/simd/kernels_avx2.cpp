// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma
// and is only entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_tables.hpp"

namespace qpsim::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
    }
    for (; k + 4 <= n; k += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sq_weighted_dot(const double* v, const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256d v0 = _mm256_loadu_pd(v + k);
        const __m256d v1 = _mm256_loadu_pd(v + k + 4);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(v0, v0), _mm256_loadu_pd(x + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(v1, v1), _mm256_loadu_pd(x + k + 4), acc1);
    }
    for (; k + 4 <= n; k += 4) {
        const __m256d v0 = _mm256_loadu_pd(v + k);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(v0, v0), _mm256_loadu_pd(x + k), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += v[k] * v[k] * x[k];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    }
    for (; k < n; ++k) y[k] += alpha * x[k];
}

void hadamard_axpy(double alpha, const double* x, const double* v, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d xv = _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(v + k));
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(a, xv, _mm256_loadu_pd(y + k)));
    }
    for (; k < n; ++k) y[k] += alpha * (x[k] * v[k]);
}

double sq_diff_of_squares(const double* v, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d a = _mm256_loadu_pd(v + k);
        const __m256d b = _mm256_loadu_pd(w + k);
        const __m256d diff = _mm256_fmsub_pd(a, a, _mm256_mul_pd(b, b));
        acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double diff = v[k] * v[k] - w[k] * w[k];
        s += diff * diff;
    }
    return s;
}

double positive_part_sq_sum(const double* g, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256d p0 = _mm256_max_pd(_mm256_loadu_pd(g + k), zero);
        const __m256d p1 = _mm256_max_pd(_mm256_loadu_pd(g + k + 4), zero);
        acc0 = _mm256_fmadd_pd(p0, p0, acc0);
        acc1 = _mm256_fmadd_pd(p1, p1, acc1);
    }
    for (; k + 4 <= n; k += 4) {
        const __m256d p0 = _mm256_max_pd(_mm256_loadu_pd(g + k), zero);
        acc0 = _mm256_fmadd_pd(p0, p0, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) {
        if (g[k] > 0.0) s += g[k] * g[k];
    }
    return s;
}

double max_abs(const double* a, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    __m256d nan_seen = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d x = _mm256_andnot_pd(sign, _mm256_loadu_pd(a + k));
        nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, x);
    }
    if (_mm256_movemask_pd(nan_seen) != 0) return std::numeric_limits<double>::quiet_NaN();
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; k < n; ++k) {
        const double x = std::abs(a[k]);
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        r = std::max(r, x);
    }
    return r;
}

}  // namespace

const KernelTable kAvx2Table{
    Level::Avx2,      &dot,           &sq_weighted_dot,        &axpy,
    &hadamard_axpy,   &sq_diff_of_squares, &positive_part_sq_sum, &max_abs,
};

}  // namespace qpsim::simd::detail
