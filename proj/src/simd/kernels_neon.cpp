// NEON kernels for AArch64, where Advanced SIMD is part of the base ISA.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_tables.hpp"

namespace qpsim::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sq_weighted_dot(const double* v, const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const float64x2_t v0 = vld1q_f64(v + k);
        const float64x2_t v1 = vld1q_f64(v + k + 2);
        acc0 = vfmaq_f64(acc0, vmulq_f64(v0, v0), vld1q_f64(x + k));
        acc1 = vfmaq_f64(acc1, vmulq_f64(v1, v1), vld1q_f64(x + k + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) s += v[k] * v[k] * x[k];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), a, vld1q_f64(x + k)));
    for (; k < n; ++k) y[k] += alpha * x[k];
}

void hadamard_axpy(double alpha, const double* x, const double* v, double* y, std::size_t n) {
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t xv = vmulq_f64(vld1q_f64(x + k), vld1q_f64(v + k));
        vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), a, xv));
    }
    for (; k < n; ++k) y[k] += alpha * (x[k] * v[k]);
}

double sq_diff_of_squares(const double* v, const double* w, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t a = vld1q_f64(v + k);
        const float64x2_t b = vld1q_f64(w + k);
        const float64x2_t diff = vfmsq_f64(vmulq_f64(a, a), b, b);
        acc = vfmaq_f64(acc, diff, diff);
    }
    double s = vaddvq_f64(acc);
    for (; k < n; ++k) {
        const double diff = v[k] * v[k] - w[k] * w[k];
        s += diff * diff;
    }
    return s;
}

double positive_part_sq_sum(const double* g, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t p = vmaxnmq_f64(vld1q_f64(g + k), zero);
        acc = vfmaq_f64(acc, p, p);
    }
    double s = vaddvq_f64(acc);
    for (; k < n; ++k) {
        if (g[k] > 0.0) s += g[k] * g[k];
    }
    return s;
}

double max_abs(const double* a, std::size_t n) {
    double r = 0.0;
    std::size_t k = 0;
    float64x2_t m = vdupq_n_f64(0.0);
    for (; k + 2 <= n; k += 2) {
        const float64x2_t x = vabsq_f64(vld1q_f64(a + k));
        const uint64x2_t ordered = vceqq_f64(x, x);
        if ((vgetq_lane_u64(ordered, 0) & vgetq_lane_u64(ordered, 1)) == 0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        m = vmaxq_f64(m, x);
    }
    r = vmaxvq_f64(m);
    for (; k < n; ++k) {
        const double x = std::abs(a[k]);
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        r = std::max(r, x);
    }
    return r;
}

}  // namespace

const KernelTable kNeonTable{
    Level::Neon,      &dot,           &sq_weighted_dot,        &axpy,
    &hadamard_axpy,   &sq_diff_of_squares, &positive_part_sq_sum, &max_abs,
};

}  // namespace qpsim::simd::detail
