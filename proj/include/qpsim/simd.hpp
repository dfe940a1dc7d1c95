#pragma once
// Vectorized inner-loop kernels with a scalar reference implementation.
//
// Every kernel exists in a portable scalar form and, where the build and the
// running CPU allow it, an AVX2+FMA (x86-64) or NEON (AArch64) form. The
// variant is picked once at startup from the CPU feature flags; the
// environment variable QPSIM_SIMD=scalar|avx2|neon overrides the choice.
//
// Variants agree to within a few ulp per accumulated term. They are not
// bit-identical because the vector forms sum in a different order.

#include <span>
#include <string_view>
#include <vector>

namespace qpsim::simd {

enum class Level { Scalar, Avx2, Neon };

std::string_view to_string(Level level);
Level parse_level(std::string_view name);

struct KernelTable {
    Level level;
    // sum_k a_k b_k
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_k v_k^2 x_k
    double (*sq_weighted_dot)(const double* v, const double* x, std::size_t n);
    // y += alpha x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y += alpha (x .* v)
    void (*hadamard_axpy)(double alpha, const double* x, const double* v, double* y,
                          std::size_t n);
    // sum_k (v_k^2 - w_k^2)^2
    double (*sq_diff_of_squares)(const double* v, const double* w, std::size_t n);
    // sum_k max(g_k, 0)^2
    double (*positive_part_sq_sum)(const double* g, std::size_t n);
    // max_k |a_k|, 0 for empty input; NaN propagates
    double (*max_abs)(const double* a, std::size_t n);
};

/// Kernels currently used by the library.
const KernelTable& active();
Level active_level();

/// Levels compiled into this build and supported by the running CPU.
std::vector<Level> available_levels();

/// Table for a specific level. Throws std::invalid_argument if unavailable.
const KernelTable& table(Level level);

/// Switch the process-wide active table. Not meant to be flipped while
/// trajectories are running on other threads.
void set_active_level(Level level);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sq_weighted_dot(std::span<const double> v, std::span<const double> x) {
    return active().sq_weighted_dot(v.data(), x.data(), v.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void hadamard_axpy(double alpha, std::span<const double> x, std::span<const double> v,
                          std::span<double> y) {
    active().hadamard_axpy(alpha, x.data(), v.data(), y.data(), y.size());
}
inline double sq_diff_of_squares(std::span<const double> v, std::span<const double> w) {
    return active().sq_diff_of_squares(v.data(), w.data(), v.size());
}
inline double positive_part_sq_sum(std::span<const double> g) {
    return active().positive_part_sq_sum(g.data(), g.size());
}
inline double max_abs(std::span<const double> a) {
    return active().max_abs(a.data(), a.size());
}

}  // namespace qpsim::simd
