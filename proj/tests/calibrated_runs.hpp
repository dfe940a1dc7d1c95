#pragma once
// Runs of the calibrated three-stage label-noise preset at d=100, n=40, r=5,
// shared by the simulation tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <vector>

#include "qpsim/diagnostics.hpp"
#include "qpsim/trainer.hpp"

namespace calibrated {

inline constexpr std::size_t kD = 100;
inline constexpr std::size_t kN = 40;
inline constexpr std::size_t kR = 5;
inline constexpr double kEpsilon = 0.1;

struct Run {
    qpsim::ParamVector end_stage0;
    qpsim::ParamVector end_stage1;
    qpsim::ParamVector final_v;
    qpsim::ParamVector ground_truth;
    bool diverged = false;
    double linf_error = 0.0;
};

inline qpsim::ScheduleSpec schedule() { return qpsim::three_stage_schedule(qpsim::kCalibratedDelta, kEpsilon); }

inline qpsim::Dataset dataset(std::uint64_t seed) { return qpsim::generate_dataset(kD, kN, kR, seed); }

inline Run run(std::uint64_t seed) {
    const qpsim::Dataset ds = dataset(seed);
    const qpsim::ScheduleSpec sched = schedule();
    const std::size_t b0 = sched.stage_start(1);
    const std::size_t b1 = sched.stage_start(2);
    Run out;
    const auto res = qpsim::run_trajectory(
        ds, qpsim::constant_vector(kD, 1.0), qpsim::NoiseSpec::label_noise(qpsim::kCalibratedDelta), sched,
        sched.total_steps(), seed, [&](std::size_t t, double, std::span<const double> v) {
            if (t == b0) out.end_stage0.assign(v.begin(), v.end());
            if (t == b1) out.end_stage1.assign(v.begin(), v.end());
        });
    out.final_v = res.final_v;
    out.ground_truth = ds.ground_truth;
    out.diverged = res.diverged;
    for (std::size_t k = 0; k < kD; ++k) {
        out.linf_error = std::max(out.linf_error, std::abs(res.final_v[k] - ds.ground_truth[k]));
    }
    if (res.diverged) out.linf_error = INFINITY;
    return out;
}

/// Per-step sqrt-sum potentials over the stage-0 slice of the calibrated
/// schedule, for label noise or for GD at the same learning rate.
struct Stage0Slice {
    std::vector<double> potentials;
    qpsim::ParamVector final_v;
};

inline Stage0Slice stage0_slice(std::uint64_t seed, const qpsim::NoiseSpec& engine) {
    const qpsim::Dataset ds = dataset(seed);
    const qpsim::Stage s0 = schedule().stages[0];
    Stage0Slice out;
    const qpsim::PotentialSpec phi = qpsim::PotentialSpec::sqrt_sum();
    out.potentials.push_back(qpsim::potential(qpsim::constant_vector(kD, 1.0), phi));
    const auto res = qpsim::run_trajectory(ds, qpsim::constant_vector(kD, 1.0), engine,
                                           qpsim::ScheduleSpec{{s0}}, s0.steps, seed,
                                           [&](std::size_t, double, std::span<const double> v) {
                                               out.potentials.push_back(qpsim::potential(v, phi));
                                           });
    out.final_v = res.final_v;
    return out;
}

inline double eta_delta_stage0() { return schedule().stages[0].eta * qpsim::kCalibratedDelta; }

}  // namespace calibrated
