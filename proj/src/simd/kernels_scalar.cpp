// Reference kernels. These define the semantics the vector variants are
// tested against.

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_tables.hpp"

namespace qpsim::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sq_weighted_dot(const double* v, const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += v[k] * v[k] * x[k];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void hadamard_axpy(double alpha, const double* x, const double* v, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * (x[k] * v[k]);
}

double sq_diff_of_squares(const double* v, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = v[k] * v[k] - w[k] * w[k];
        s += diff * diff;
    }
    return s;
}

double positive_part_sq_sum(const double* g, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (g[k] > 0.0) s += g[k] * g[k];
    }
    return s;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = std::abs(a[k]);
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        m = std::max(m, x);
    }
    return m;
}

}  // namespace

const KernelTable kScalarTable{
    Level::Scalar,    &dot,           &sq_weighted_dot,        &axpy,
    &hadamard_axpy,   &sq_diff_of_squares, &positive_part_sq_sum, &max_abs,
};

}  // namespace qpsim::simd::detail
