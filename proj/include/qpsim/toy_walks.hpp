#pragma once
// One-dimensional warm-up walks.
//
//   multiplicative:  v <- v + eta * xi * v,  xi uniform on {-1, +1}
//   additive:        v <- v + eta * xi,      xi ~ N(0, 1)
//
// Both keep E[v] fixed. Under the multiplicative walk E[sqrt(v)] decays
// geometrically, so almost every path collapses towards 0; the additive walk
// spreads out instead.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qpsim {

enum class WalkKind { Multiplicative, Additive };

std::string to_string(WalkKind k);
WalkKind parse_walk_kind(const std::string& s);

struct WalkConfig {
    WalkKind kind = WalkKind::Multiplicative;
    double eta = 0.5;
    std::size_t steps = 200;
    double v0 = 1.0;
    std::uint64_t seed = 0;
    /// Independent coordinates walked side by side.
    std::size_t dims = 1;
    /// Replace per-coordinate noise by eta * ||v||_2 * xi_k on every coordinate.
    bool shared_variance = false;

    void validate() const;
};

struct WalkPoint {
    std::size_t step = 0;
    std::vector<double> v;
    double sqrt_potential = 0.0;  // sum_k sqrt(|v_k|)
};

/// Full trajectory, one point per step including step 0. When forced_xi is
/// non-empty it supplies the noise (steps * dims values, step-major) instead
/// of the seeded stream.
std::vector<WalkPoint> run_walk(const WalkConfig& cfg, std::span<const double> forced_xi = {});

struct WalkCheckpoint {
    std::size_t step = 0;
    double mean_v = 0.0;
    double stderr_v = 0.0;
    double var_v = 0.0;
    double mean_sqrt_v = 0.0;
    double stderr_sqrt_v = 0.0;
    double frac_below = 0.0;  // fraction of trials with |v| < threshold
};

/// Statistics of the first coordinate across trials at steps 1, 2, 4, ...
/// and at cfg.steps. Each trial draws from its own substream of cfg.seed.
std::vector<WalkCheckpoint> walk_ensemble_stats(const WalkConfig& cfg, std::size_t trials, double threshold);

/// E[sqrt(1 + eta * xi)] for the multiplicative walk.
double multiplicative_sqrt_factor(double eta);

/// Exact standard deviation of v_t under the multiplicative walk:
/// v0 * sqrt((1 + eta^2)^t - 1).
double multiplicative_sd(double eta, std::size_t t, double v0 = 1.0);

inline constexpr const char* kWalkCsvHeader =
    "step,mean_v,mean_sqrt_v,frac_below,stderr_v,stderr_sqrt_v,var_v";

void write_walk_csv(const std::filesystem::path& path, std::span<const WalkCheckpoint> stats);

}  // namespace qpsim
